#include "ammlab/auditors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ammlab/json_io.hpp"
#include "ammlab/preferences.hpp"

namespace ammlab {

std::string_view to_string(StrategyModel m) noexcept {
  return m == StrategyModel::Plain ? "plain" : "weak";
}

std::optional<StrategyModel> parse_strategy_model(std::string_view s) noexcept {
  if (s == "plain") return StrategyModel::Plain;
  if (s == "weak") return StrategyModel::WeakFairSequencing;
  return std::nullopt;
}

void DeviationGrid::validate() const {
  if (rate_points.empty()) throw ParameterError("deviation grid: no rate points");
  if (qty_points.empty()) throw ParameterError("deviation grid: no quantity points");
  for (double q : qty_points) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw ParameterError("deviation grid: bad quantity point");
  }
  if (max_sybil < 1 || max_sybil > 2) throw ParameterError("deviation grid: max_sybil must be 1 or 2");
}

std::optional<GridPreset> parse_grid_preset(std::string_view s) noexcept {
  if (s == "coarse") return GridPreset::Coarse;
  if (s == "default") return GridPreset::Default;
  if (s == "fine") return GridPreset::Fine;
  return std::nullopt;
}

DeviationGrid make_grid(GridPreset preset, double r0, double q_ref) {
  int n_rates = 21;
  int n_qty = 20;
  if (preset == GridPreset::Coarse) {
    n_rates = 9;
    n_qty = 8;
  } else if (preset == GridPreset::Fine) {
    n_rates = 41;
    n_qty = 40;
  }
  if (!(q_ref > 0.0)) q_ref = 1.0;

  DeviationGrid grid;
  const double lo = std::log(r0 / 4.0);
  const double hi = std::log(r0 * 4.0);
  for (int i = 0; i < n_rates; ++i) {
    grid.rate_points.push_back(ExtRate::finite(std::exp(lo + (hi - lo) * i / (n_rates - 1))));
  }
  grid.rate_points.push_back(ExtRate::infinity());
  grid.qty_points.push_back(0.0);
  for (int i = 1; i <= n_qty; ++i) grid.qty_points.push_back(1.5 * q_ref * i / n_qty);
  return grid;
}

AuditReport check_uniform_pricing(std::span<const Order> batch, const BatchResult& result,
                                  const Tolerances& tol) {
  constexpr const char* kProperty = "uniform_pricing";
  if (result.outcomes.size() != batch.size()) {
    throw AlignmentError("check_uniform_pricing: result does not match the batch");
  }
  std::optional<std::size_t> first;
  double first_rate = 0.0;
  for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
    const Outcome& o = result.outcomes[i];
    if (o.dx == 0.0) continue;
    const double rate = -o.dy / o.dx;
    if (!first) {
      first = i;
      first_rate = rate;
    } else if (std::abs(rate - first_rate) > tol.tol_audit) {
      return AuditReport::fail(kProperty, json{{"orders", {*first, i}}, {"rates", {first_rate, rate}}});
    }
  }
  return AuditReport::pass(kProperty);
}

bool is_eligible(const Order& o, double r0) {
  return demands_x(o.type) ? o.rate >= r0 : o.rate <= r0;
}

namespace {

double filled_quantity(const Order& o, const Outcome& out) {
  switch (o.type) {
    case OrderType::BuyX: return out.dx;
    case OrderType::BuyY: return out.dy;
    case OrderType::SellX: return -out.dx;
    case OrderType::SellY: return -out.dy;
  }
  return 0.0;
}

}  // namespace

AuditReport check_local_efficiency(const Curve& curve, const PoolState& pool,
                                   std::span<const Order> batch, const BatchResult& result,
                                   bool weak, const Tolerances& tol) {
  const char* property = weak ? "weak_local_efficiency" : "local_efficiency";
  if (result.outcomes.size() != batch.size()) {
    throw AlignmentError("check_local_efficiency: result does not match the batch");
  }
  const double r0 = marginal_rate(curve, pool);
  const double r_end = marginal_rate(curve, result.end_pool);
  const double eps = tol.tol_audit;

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Order& o = batch[i];
    if (weak && !is_eligible(o, r0)) continue;
    const double filled = filled_quantity(o, result.outcomes[i]);
    if (filled >= o.qty - eps) continue;
    const bool violated = demands_x(o.type) ? o.rate > r_end + eps : o.rate < r_end - eps;
    if (violated) {
      return AuditReport::fail(property, json{{"order", i},
                                              {"rate", to_json(o.rate)},
                                              {"end_rate", r_end},
                                              {"filled", filled},
                                              {"qty", o.qty}});
    }
  }
  return AuditReport::pass(property, json{{"end_rate", r_end}});
}

AuditReport find_arbitrage_subset(const BatchResult& result, const Tolerances& tol) {
  constexpr const char* kProperty = "arbitrage_resilience";
  const auto& out = result.outcomes;
  if (out.size() > kMaxArbitrageBatch) {
    throw SizeError("find_arbitrage_subset: batch of " + std::to_string(out.size()) +
                    " exceeds the exhaustive-search cap");
  }
  const double eps = tol.tol_audit;
  std::vector<std::size_t> stack;

  // Depth-first over index lists in lexicographic order.
  std::optional<json> witness;
  const auto visit = [&](auto&& self, std::size_t start, double dx, double dy) -> bool {
    for (std::size_t i = start; i < out.size(); ++i) {
      stack.push_back(i);
      const double sx = dx + out[i].dx;
      const double sy = dy + out[i].dy;
      if (sx >= -eps && sy >= -eps && (sx > eps || sy > eps)) {
        witness = json{{"subset", stack}, {"dx", sx}, {"dy", sy}};
        return true;
      }
      if (self(self, i + 1, sx, sy)) return true;
      stack.pop_back();
    }
    return false;
  };
  if (visit(visit, 0, 0.0, 0.0)) return AuditReport::fail(kProperty, *witness);
  return AuditReport::pass(kProperty);
}

// ---------------------------------------------------------------------------
// IC audit

namespace {

double aux_of(const Order& o) { return o.aux.value_or(0.0); }

Outcome run_and_extract(const Mechanism& mechanism, const Curve& curve, const PoolState& pool,
                        std::span<const Order> others, const Deviation& d, const Tolerances& tol) {
  std::vector<std::pair<Order, bool>> tagged;
  tagged.reserve(others.size() + d.orders.size());
  for (std::size_t i = 0; i < others.size(); ++i) {
    if (std::find(d.censored.begin(), d.censored.end(), i) == d.censored.end()) {
      tagged.emplace_back(others[i], false);
    }
  }
  for (const Order& o : d.orders) tagged.emplace_back(o, true);
  std::stable_sort(tagged.begin(), tagged.end(), [](const auto& a, const auto& b) {
    return aux_of(a.first) < aux_of(b.first);
  });
  std::vector<Order> batch;
  batch.reserve(tagged.size());
  for (const auto& t : tagged) batch.push_back(t.first);

  const BatchResult r = mechanism(curve, pool, batch, tol);
  Outcome joint;
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    if (tagged[i].second) joint += r.outcomes[i];
  }
  return joint;
}

json orders_json(std::span<const Order> orders) {
  json j = json::array();
  for (const Order& o : orders) j.push_back(to_json(o));
  return j;
}

// Every non-empty subset of {0..n-1}, in increasing bitmask order.
std::vector<std::vector<std::size_t>> censor_sets(std::size_t n) {
  std::vector<std::vector<std::size_t>> sets;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) s.push_back(i);
    }
    sets.push_back(std::move(s));
  }
  return sets;
}

}  // namespace

Outcome play(const Mechanism& mechanism, const Curve& curve, const PoolState& pool,
             std::span<const Order> others, const Deviation& deviation, const Tolerances& tol) {
  return run_and_extract(mechanism, curve, pool, others, deviation, tol);
}

Deviation honest_strategy(const IntrinsicType& type) {
  Deviation d;
  if (type.qty > 0.0) d.orders.push_back(type);
  return d;
}

AuditReport ic_audit(const Mechanism& mechanism, const Curve& curve, const PoolState& pool,
                     std::span<const Order> others, const IntrinsicType& type,
                     StrategyModel model, const DeviationGrid& grid, const Tolerances& tol) {
  constexpr const char* kProperty = "incentive_compatibility";
  grid.validate();
  const bool plain = model == StrategyModel::Plain;
  if (plain && others.size() > 6) {
    throw SizeError("ic_audit: censorship enumeration is limited to 6 other orders");
  }
  const double r0 = marginal_rate(curve, pool);
  const double own_aux = aux_of(type);

  const Deviation honest = honest_strategy(type);
  const Outcome honest_outcome = play(mechanism, curve, pool, others, honest, tol);

  // Candidate single orders, without aux yet.
  std::vector<Order> singles;
  if (type.qty > 0.0) singles.push_back(type);
  const std::vector<OrderType> types =
      grid.types.empty() ? std::vector<OrderType>{type.type} : grid.types;
  for (OrderType t : types) {
    for (const ExtRate& r : grid.rate_points) {
      for (double q : grid.qty_points) {
        if (q > 0.0) singles.push_back(Order{t, r, q, std::nullopt});
      }
    }
  }
  if (grid.include_analytic && demands_x(type.type)) {
    for (const Order& o : others) {
      if (o.rate.is_finite() && o.rate > r0) {
        singles.push_back(
            Order{OrderType::BuyX, ExtRate::infinity(), x_for_avg_rate(curve, pool, o.rate.value()), std::nullopt});
      }
    }
    for (double f : {1e-4, 1e-2}) {
      singles.push_back(Order{OrderType::BuyX, ExtRate::infinity(), f * pool.x(), std::nullopt});
    }
  }

  // Sequencing slots: one aux value per distinct position among the others.
  std::vector<double> aux_candidates{0.0, own_aux};
  for (const Order& o : others) aux_candidates.push_back(aux_of(o));
  std::sort(aux_candidates.begin(), aux_candidates.end());
  aux_candidates.erase(std::unique(aux_candidates.begin(), aux_candidates.end()), aux_candidates.end());
  std::vector<double> slots;
  std::vector<std::size_t> seen_positions;
  for (double a : aux_candidates) {
    if (!plain && a < own_aux) continue;
    const auto pos = static_cast<std::size_t>(
        std::count_if(others.begin(), others.end(), [a](const Order& o) { return aux_of(o) <= a; }));
    if (std::find(seen_positions.begin(), seen_positions.end(), pos) != seen_positions.end()) continue;
    seen_positions.push_back(pos);
    slots.push_back(a);
  }

  std::vector<std::vector<std::size_t>> censorships{{}};
  if (plain) {
    for (auto& s : censor_sets(others.size())) censorships.push_back(std::move(s));
  }

  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::optional<json> witness;

  const auto try_deviation = [&](const Deviation& d) -> bool {
    Outcome out;
    try {
      out = play(mechanism, curve, pool, others, d, tol);
    } catch (const NoSolutionError&) {
      ++skipped;  // the mechanism has no output for this batch
      return false;
    } catch (const DepletionError&) {
      ++skipped;
      return false;
    }
    ++evaluated;
    if (compare(type, honest_outcome, out, tol.tol_audit) != PrefResult::StrictlyBetter) return false;
    witness = json{{"model", std::string(to_string(model))},
                   {"intrinsic_type", to_json(type)},
                   {"deviation", orders_json(d.orders)},
                   {"censored", d.censored},
                   {"honest_outcome", to_json(honest_outcome)},
                   {"deviant_outcome", to_json(out)},
                   {"preference", std::string(to_string(PrefResult::StrictlyBetter))}};
    return true;
  };

  const auto with_aux = [](Order o, double a) {
    o.aux = a;
    return o;
  };

  for (const auto& censored : censorships) {
    if (try_deviation(Deviation{{}, censored})) return AuditReport::fail(kProperty, *witness);
    for (double a : slots) {
      for (std::size_t i = 0; i < singles.size(); ++i) {
        if (try_deviation(Deviation{{with_aux(singles[i], a)}, censored})) {
          return AuditReport::fail(kProperty, *witness);
        }
      }
      if (grid.max_sybil < 2) continue;
      for (std::size_t i = 0; i < singles.size(); ++i) {
        for (std::size_t j = i; j < singles.size(); ++j) {
          if (try_deviation(Deviation{{with_aux(singles[i], a), with_aux(singles[j], a)}, censored})) {
            return AuditReport::fail(kProperty, *witness);
          }
        }
      }
    }
  }
  return AuditReport::pass(kProperty, json{{"result", "no violation found on this grid"},
                                           {"deviations_evaluated", evaluated},
                                           {"deviations_skipped", skipped}});
}

}  // namespace ammlab
