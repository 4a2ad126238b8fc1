#include "ammlab/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace ammlab {

namespace {

[[noreturn]] void bad_field(std::string_view where, std::string_view field, std::string_view what) {
  throw ParameterError(std::string(where) + "." + std::string(field) + ": " + std::string(what));
}

double number_field(const json& j, std::string_view where, const char* field) {
  if (!j.contains(field)) bad_field(where, field, "missing");
  const json& v = j.at(field);
  if (!v.is_number()) bad_field(where, field, "expected a number");
  return v.get<double>();
}

}  // namespace

json to_json(const ExtRate& r) {
  if (r.is_infinite()) return "inf";
  return r.value();
}

ExtRate rate_from_json(const json& j, std::string_view where) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return ExtRate::infinity();
    throw ParameterError(std::string(where) + ": rate string must be \"inf\"");
  }
  if (!j.is_number()) throw ParameterError(std::string(where) + ": rate must be a number or \"inf\"");
  const double v = j.get<double>();
  try {
    return ExtRate::finite(v);
  } catch (const std::exception& e) {
    throw ParameterError(std::string(where) + ": " + e.what());
  }
}

json to_json(const Order& o) {
  json j;
  j["type"] = std::string(to_string(o.type));
  j["rate"] = to_json(o.rate);
  j["qty"] = o.qty;
  if (o.aux) j["aux"] = *o.aux;
  return j;
}

Order order_from_json(const json& j, std::string_view where) {
  if (!j.is_object()) throw ParameterError(std::string(where) + ": order must be an object");
  Order o;
  if (!j.contains("type") || !j.at("type").is_string()) bad_field(where, "type", "expected a string");
  const auto type = parse_order_type(j.at("type").get<std::string>());
  if (!type) bad_field(where, "type", "unknown order type '" + j.at("type").get<std::string>() + "'");
  o.type = *type;
  if (!j.contains("rate")) bad_field(where, "rate", "missing");
  o.rate = rate_from_json(j.at("rate"), std::string(where) + ".rate");
  o.qty = number_field(j, where, "qty");
  if (j.contains("aux") && !j.at("aux").is_null()) o.aux = number_field(j, where, "aux");
  try {
    o.validate();
  } catch (const ParameterError& e) {
    throw ParameterError(std::string(where) + ": " + e.what());
  }
  return o;
}

json to_json(const Outcome& o) { return json{{"dx", o.dx}, {"dy", o.dy}}; }

json to_json(const PoolState& p) { return json{{"x", p.x()}, {"y", p.y()}}; }

json to_json(const BatchResult& r) {
  json j;
  j["outcomes"] = json::array();
  for (const Outcome& o : r.outcomes) j["outcomes"].push_back(to_json(o));
  j["end_pool"] = to_json(r.end_pool);
  j["uniform_price"] = r.uniform_price ? json(*r.uniform_price) : json(nullptr);
  return j;
}

json to_json(const ClearingSolution& s) {
  return json{{"r_star", s.r_star},
              {"p_bar", s.p_bar},
              {"delta_x", s.delta_x},
              {"branch", s.branch == ClearingBranch::ExcessDemand ? "a" : "b"}};
}

json to_json(const AuditReport& r) {
  return json{{"property", r.property}, {"passed", r.passed}, {"witness", r.witness}};
}

json to_json(const TrilemmaCertificate& c) {
  return json{{"r1", c.r1},
              {"r2", c.r2},
              {"delta_x", c.delta_x},
              {"delta_y", c.delta_y},
              {"r2_star", c.r2_star},
              {"x_tot", c.x_tot},
              {"x1", c.x1},
              {"x2", c.x2},
              {"u1_truthful", c.u1_truthful},
              {"u1_deviate", c.u1_deviate},
              {"gap", c.gap}};
}

double round_significant(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // drop negative zero
}

json canonical(const json& j) {
  switch (j.type()) {
    case json::value_t::object: {
      json out = json::object();
      for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = canonical(it.value());
      return out;
    }
    case json::value_t::array: {
      json out = json::array();
      for (const json& v : j) out.push_back(canonical(v));
      return out;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isnan(v)) return "nan";
      if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
      return round_significant(v, 12);
    }
    default:
      return j;
  }
}

std::string dump_canonical(const json& j) { return canonical(j).dump(2); }

}  // namespace ammlab
