#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ammlab/auditors.hpp"
#include "ammlab/json_io.hpp"
#include "ammlab/mechanisms.hpp"
#include "ammlab/scenarios.hpp"

namespace ammlab::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalFlags {
  bool json = false;
  std::optional<double> tol_audit;
  std::optional<std::string> grid_preset;
};

struct StrategicBlock {
  IntrinsicType type;
  StrategyModel model = StrategyModel::WeakFairSequencing;
  GridPreset preset = GridPreset::Default;
  int max_sybil = 2;
  bool include_analytic = true;
};

struct Scenario {
  PoolState pool{1.0, 1.0};
  MechanismId mechanism = MechanismId::Null;
  std::vector<Order> orders;
  std::vector<std::string> audits;
  Tolerances tol;
  std::optional<StrategicBlock> strategic;
};

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open scenario file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

const json& require(const json& j, const char* field, const std::string& where) {
  if (!j.is_object() || !j.contains(field)) throw UsageError(where + ": missing field '" + field + "'");
  return j.at(field);
}

double require_number(const json& j, const char* field, const std::string& where) {
  const json& v = require(j, field, where);
  if (!v.is_number()) throw UsageError(where + "." + field + ": expected a number");
  return v.get<double>();
}

Scenario parse_scenario(const json& j, const GlobalFlags& flags) {
  if (!j.is_object()) throw UsageError("scenario: top level must be an object");
  Scenario s;

  const json& pool = require(j, "pool", "scenario");
  try {
    s.pool = PoolState(require_number(pool, "x", "pool"), require_number(pool, "y", "pool"));
  } catch (const DomainError& e) {
    throw UsageError(std::string("pool: ") + e.what());
  }

  if (j.contains("curve")) {
    const json& curve = j.at("curve");
    if (!curve.is_object() || curve.value("kind", "") != "constant_product") {
      throw UsageError("curve.kind: only \"constant_product\" is supported");
    }
  }

  const json& mech = require(j, "mechanism", "scenario");
  if (!mech.is_string()) throw UsageError("mechanism: expected a string");
  const auto id = parse_mechanism_id(mech.get<std::string>());
  if (!id) throw UsageError("mechanism: unknown id '" + mech.get<std::string>() + "'");
  s.mechanism = *id;

  if (j.contains("orders")) {
    const json& orders = j.at("orders");
    if (!orders.is_array()) throw UsageError("orders: expected an array");
    for (std::size_t i = 0; i < orders.size(); ++i) {
      s.orders.push_back(order_from_json(orders[i], "orders[" + std::to_string(i) + "]"));
    }
  }

  if (j.contains("audits")) {
    const json& audits = j.at("audits");
    if (!audits.is_array()) throw UsageError("audits: expected an array");
    for (const json& a : audits) {
      if (!a.is_string()) throw UsageError("audits: entries must be strings");
      const std::string name = a.get<std::string>();
      static const std::vector<std::string> known{"well_formed", "up", "le", "wle", "arbitrage", "ic"};
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw UsageError("audits: unknown audit '" + name + "'");
      }
      s.audits.push_back(name);
    }
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw UsageError("tolerances: expected an object");
    if (t.contains("tol_root")) s.tol.tol_root = require_number(t, "tol_root", "tolerances");
    if (t.contains("tol_audit")) s.tol.tol_audit = require_number(t, "tol_audit", "tolerances");
    if (t.contains("max_iter")) s.tol.max_iter = static_cast<int>(require_number(t, "max_iter", "tolerances"));
  }
  if (flags.tol_audit) s.tol.tol_audit = *flags.tol_audit;
  s.tol.validate();

  if (j.contains("strategic")) {
    const json& st = j.at("strategic");
    StrategicBlock b;
    const json& type = require(st, "type", "strategic");
    // An intrinsic type may carry qty 0 (no demand), which orders reject.
    json probe = type;
    const bool zero_qty = type.is_object() && type.contains("qty") && type.at("qty").is_number() &&
                          type.at("qty").get<double>() == 0.0;
    if (zero_qty) probe["qty"] = 1.0;
    b.type = order_from_json(probe, "strategic.type");
    if (zero_qty) b.type.qty = 0.0;
    if (st.contains("model")) {
      const auto m = parse_strategy_model(st.at("model").is_string() ? st.at("model").get<std::string>() : "");
      if (!m) throw UsageError("strategic.model: expected \"plain\" or \"weak\"");
      b.model = *m;
    }
    if (st.contains("grid")) {
      const json& g = st.at("grid");
      const auto p = parse_grid_preset(g.is_string() ? g.get<std::string>() : "");
      if (!p) throw UsageError("strategic.grid: expected \"coarse\", \"default\" or \"fine\"");
      b.preset = *p;
    }
    if (st.contains("max_sybil")) b.max_sybil = static_cast<int>(require_number(st, "max_sybil", "strategic"));
    if (st.contains("include_analytic")) {
      if (!st.at("include_analytic").is_boolean()) throw UsageError("strategic.include_analytic: expected a boolean");
      b.include_analytic = st.at("include_analytic").get<bool>();
    }
    s.strategic = b;
  }
  if (flags.grid_preset && s.strategic) {
    const auto p = parse_grid_preset(*flags.grid_preset);
    if (!p) throw UsageError("--grid-preset: expected coarse, default or fine");
    s.strategic->preset = *p;
  }
  return s;
}

Scenario load_scenario(const std::string& path, const GlobalFlags& flags) {
  const json j = read_json_file(path);
  try {
    return parse_scenario(j, flags);
  } catch (const ParameterError& e) {
    throw UsageError(path + ": " + e.what());
  } catch (const UsageError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

struct MechanismFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

BatchResult execute(const Scenario& s) {
  const ConstantProduct curve = ConstantProduct::through(s.pool);
  try {
    return run_mechanism(s.mechanism, curve, s.pool, s.orders, s.tol);
  } catch (const std::exception& e) {
    throw MechanismFailure(std::string(to_string(s.mechanism)) + ": " + e.what());
  }
}

json run_json(const Scenario& s, const BatchResult& r) {
  json orders = json::array();
  for (const Order& o : s.orders) orders.push_back(to_json(o));
  return json{{"mechanism", std::string(to_string(s.mechanism))},
              {"pool", to_json(s.pool)},
              {"orders", orders},
              {"result", to_json(r)}};
}

void print_table(std::ostream& out, const Scenario& s, const BatchResult& r) {
  out << "mechanism " << to_string(s.mechanism) << "\n";
  out << "pool (" << fmt_num(s.pool.x()) << ", " << fmt_num(s.pool.y()) << ") -> ("
      << fmt_num(r.end_pool.x()) << ", " << fmt_num(r.end_pool.y()) << ")\n";
  if (r.uniform_price) out << "uniform price " << fmt_num(*r.uniform_price) << "\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-3s %-7s %-14s %-14s %-20s %-20s\n", "#", "type", "rate", "qty", "dx",
                "dy");
  out << line;
  for (std::size_t i = 0; i < s.orders.size(); ++i) {
    const Order& o = s.orders[i];
    std::snprintf(line, sizeof line, "%-3zu %-7s %-14s %-14s %-20s %-20s\n", i,
                  std::string(to_string(o.type)).c_str(), o.rate.to_string().c_str(),
                  fmt_num(o.qty).c_str(), fmt_num(r.outcomes[i].dx + 0.0).c_str(),
                  fmt_num(r.outcomes[i].dy + 0.0).c_str());
    out << line;
  }
}

int cmd_run(const std::string& path, const GlobalFlags& flags, std::ostream& out) {
  const Scenario s = load_scenario(path, flags);
  const BatchResult r = execute(s);
  if (flags.json) {
    out << dump_canonical(run_json(s, r)) << "\n";
  } else {
    print_table(out, s, r);
  }
  return kOk;
}

AuditReport run_audit(const std::string& name, const Scenario& s, const BatchResult& r) {
  const ConstantProduct curve = ConstantProduct::through(s.pool);
  if (name == "well_formed") return check_well_formed(curve, s.pool, s.orders, r, s.tol);
  if (name == "up") return check_uniform_pricing(s.orders, r, s.tol);
  if (name == "le") return check_local_efficiency(curve, s.pool, s.orders, r, false, s.tol);
  if (name == "wle") return check_local_efficiency(curve, s.pool, s.orders, r, true, s.tol);
  if (name == "arbitrage") return find_arbitrage_subset(r, s.tol);
  // ic: the scenario's orders are the other players.
  if (!s.strategic) throw UsageError("audit 'ic' needs a 'strategic' block");
  const StrategicBlock& b = *s.strategic;
  const double r0 = marginal_rate(curve, s.pool);
  DeviationGrid grid = make_grid(b.preset, r0, b.type.qty);
  grid.max_sybil = b.max_sybil;
  grid.include_analytic = b.include_analytic;
  try {
    return ic_audit(mechanism_for(s.mechanism), curve, s.pool, s.orders, b.type, b.model, grid, s.tol);
  } catch (const ParameterError& e) {
    throw UsageError(std::string("ic: ") + e.what());
  } catch (const SizeError& e) {
    throw UsageError(std::string("ic: ") + e.what());
  }
}

int cmd_audit(const std::string& path, const GlobalFlags& flags, std::ostream& out) {
  const Scenario s = load_scenario(path, flags);
  if (s.audits.empty()) throw UsageError(path + ": no audits listed");
  const BatchResult r = execute(s);

  bool all_passed = true;
  json reports = json::array();
  std::vector<AuditReport> list;
  for (const std::string& name : s.audits) {
    AuditReport rep = run_audit(name, s, r);
    all_passed = all_passed && rep.passed;
    reports.push_back(to_json(rep));
    list.push_back(std::move(rep));
  }

  if (flags.json) {
    json doc = run_json(s, r);
    doc["audits"] = reports;
    doc["passed"] = all_passed;
    out << dump_canonical(doc) << "\n";
  } else {
    for (std::size_t i = 0; i < list.size(); ++i) {
      out << (list[i].passed ? "PASS " : "FAIL ") << s.audits[i] << " (" << list[i].property << ")\n";
      if (!list[i].passed) out << "  witness: " << canonical(list[i].witness).dump() << "\n";
    }
  }
  return all_passed ? kOk : kAuditFailed;
}

struct CounterexampleArgs {
  double pool_x = 100.0;
  double pool_y = 100.0;
  // arbitrage construction
  double q = 10.0;
  double eps31 = 0.1;
  std::vector<double> factors{1.0, 1.05, 1.2};
  // efficiency construction
  double qb = 50.0;
  double eps32 = 1.0;
  double qs = 10.0;
  int samples = 10;
  // trilemma
  double r2 = 2.0;
  std::optional<double> r1;
};

int cmd_counterexample(const std::string& name, const CounterexampleArgs& a, const GlobalFlags& flags,
                       std::ostream& out) {
  Tolerances tol;
  if (flags.tol_audit) tol.tol_audit = *flags.tol_audit;
  tol.validate();
  const PoolState pool(a.pool_x, a.pool_y);
  const ConstantProduct curve = ConstantProduct::through(pool);

  if (name == "thm31") {
    const AuditReport rep = thm31_build_and_verify(curve, pool, a.q, a.eps31, a.factors, tol);
    out << dump_canonical(to_json(rep)) << "\n";
    return rep.passed ? kOk : kVerificationFailed;
  }
  if (name == "thm32") {
    const std::vector<double> xs = even_samples(a.qs, a.samples);
    const AuditReport rep = thm32_build_and_verify(curve, pool, a.qb, a.eps32, a.qs, xs, tol);
    out << dump_canonical(to_json(rep)) << "\n";
    return rep.passed ? kOk : kVerificationFailed;
  }
  // trilemma
  const double r2_star = trilemma_r2_star(curve, pool, a.r2);
  const double r1 = a.r1.value_or(a.r2 + 0.95 * (r2_star - a.r2));
  const TrilemmaCertificate cert = trilemma_certificate(curve, pool, a.r2, r1, tol);
  const AuditReport br = check_best_response_consistency(curve, pool, cert, tol);
  json doc{{"certificate", to_json(cert)}, {"best_response", to_json(br)}, {"gap_positive", cert.gap > 0.0}};
  out << dump_canonical(doc) << "\n";
  return br.passed ? kOk : kVerificationFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-asset AMM batch mechanisms: run, audit and counterexample constructions", "ammlab"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  double tol_audit = 0.0;
  std::string preset;
  app.add_flag("--json", flags.json, "Machine-readable JSON output");
  auto* tol_opt = app.add_option("--tol-audit", tol_audit, "Absolute tolerance for property checks");
  auto* preset_opt = app.add_option("--grid-preset", preset, "IC deviation grid: coarse, default or fine")
                         ->check(CLI::IsMember({"coarse", "default", "fine"}));

  std::string scenario_path;
  auto* run_cmd = app.add_subcommand("run", "Execute a scenario's mechanism and print the outcomes");
  run_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  auto* audit_cmd = app.add_subcommand("audit", "Run the scenario's listed audits on the mechanism output");
  audit_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();

  CounterexampleArgs cx;
  std::string which;
  auto* cx_cmd = app.add_subcommand("counterexample", "Build and verify an impossibility construction");
  cx_cmd->add_option("name", which, "thm31 | thm32 | trilemma")
      ->required()
      ->check(CLI::IsMember({"thm31", "thm32", "trilemma"}));
  cx_cmd->add_option("--pool-x", cx.pool_x, "Initial X reserve");
  cx_cmd->add_option("--pool-y", cx.pool_y, "Initial Y reserve");
  cx_cmd->add_option("--q", cx.q, "thm31: sell quantity q");
  cx_cmd->add_option("--factors", cx.factors, "thm31: sell prices as multiples of r*")->delimiter(',');
  cx_cmd->add_option("--qb", cx.qb, "thm32: buy quantity");
  cx_cmd->add_option("--qs", cx.qs, "thm32: sell quantity");
  cx_cmd->add_option("--samples", cx.samples, "thm32: number of x_s samples");
  double eps = 0.0;
  auto* eps_opt = cx_cmd->add_option("--eps", eps, "thm31/thm32: eps");
  cx_cmd->add_option("--r2", cx.r2, "trilemma: lower rate");
  double r1 = 0.0;
  auto* r1_opt = cx_cmd->add_option("--r1", r1, "trilemma: higher rate (default r2 + 0.95 (r2* - r2))");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }
  if (*tol_opt) flags.tol_audit = tol_audit;
  if (*preset_opt) flags.grid_preset = preset;
  if (*eps_opt) cx.eps31 = cx.eps32 = eps;
  if (*r1_opt) cx.r1 = r1;

  try {
    if (*run_cmd) return cmd_run(scenario_path, flags, out);
    if (*audit_cmd) return cmd_audit(scenario_path, flags, out);
    return cmd_counterexample(which, cx, flags, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const MechanismFailure& e) {
    err << "mechanism error: " << e.what() << "\n";
    return kMechanismError;
  } catch (const VerificationError& e) {
    err << "verification failed: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kVerificationFailed;
  }
}

}  // namespace ammlab::cli
