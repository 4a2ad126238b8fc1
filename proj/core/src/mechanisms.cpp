#include "ammlab/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ammlab {

std::string_view to_string(MechanismId id) noexcept {
  switch (id) {
    case MechanismId::Null: return "null";
    case MechanismId::M1_IC_UP: return "m1";
    case MechanismId::M2_UP_WLE: return "m2";
    case MechanismId::SingleSideUniform: return "ssu";
  }
  return "unknown";
}

std::optional<MechanismId> parse_mechanism_id(std::string_view s) noexcept {
  if (s == "null") return MechanismId::Null;
  if (s == "m1") return MechanismId::M1_IC_UP;
  if (s == "m2") return MechanismId::M2_UP_WLE;
  if (s == "ssu") return MechanismId::SingleSideUniform;
  return std::nullopt;
}

Mechanism mechanism_for(MechanismId id) {
  switch (id) {
    case MechanismId::Null: return null_mechanism;
    case MechanismId::M1_IC_UP: return mechanism1;
    case MechanismId::M2_UP_WLE: return mechanism2;
    case MechanismId::SingleSideUniform: return single_side_uniform;
  }
  return null_mechanism;
}

BatchResult run_mechanism(MechanismId id, const Curve& curve, const PoolState& pool,
                          std::span<const Order> batch, const Tolerances& tol) {
  switch (id) {
    case MechanismId::Null: return null_mechanism(curve, pool, batch, tol);
    case MechanismId::M1_IC_UP: return mechanism1(curve, pool, batch, tol);
    case MechanismId::M2_UP_WLE: return mechanism2(curve, pool, batch, tol);
    case MechanismId::SingleSideUniform: return single_side_uniform(curve, pool, batch, tol);
  }
  return null_mechanism(curve, pool, batch, tol);
}

BatchResult null_mechanism(const Curve&, const PoolState& pool, std::span<const Order> batch,
                           const Tolerances&) {
  return BatchResult{std::vector<Outcome>(batch.size()), pool, std::nullopt};
}

// ---------------------------------------------------------------------------
// Mechanism 1

BatchResult mechanism1(const Curve& curve, const PoolState& pool, std::span<const Order> batch,
                       const Tolerances& tol) {
  const double r0 = marginal_rate(curve, pool);

  std::vector<std::size_t> ranked;
  ranked.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Order& o = batch[i];
    if (!demands_x(o.type)) continue;
    if (o.rate < r0) continue;
    ranked.push_back(i);
  }
  BatchResult result{std::vector<Outcome>(batch.size()), pool, std::nullopt};
  if (ranked.empty()) return result;

  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](std::size_t a, std::size_t b) { return batch[a].rate > batch[b].rate; });

  const Order& top = batch[ranked.front()];
  // Floor: the withdrawal whose average price equals the runner-up's rate.
  double floor_x = 0.0;
  if (ranked.size() > 1) {
    const ExtRate& r2 = batch[ranked[1]].rate;
    if (r2.is_infinite()) {
      return result;  // no finite withdrawal averages an infinite rate
    }
    if (r2.value() > r0) floor_x = x_for_avg_rate(curve, pool, r2.value());
  }
  const double target_x = x_for_end_rate(curve, pool, top.rate, tol);

  double cap = top.qty;
  if (top.type == OrderType::SellY) {
    // X bought by spending the whole Y budget at the initial state.
    cap = pool.x() - x_of_y(curve, pool.y() + top.qty);
  }
  if (cap < floor_x) return result;

  const double x_star = std::max(floor_x, std::min(target_x, cap));
  if (x_star <= 0.0) return result;
  double charge = y_of_x(curve, pool.x() - x_star) - pool.y();
  // A Sell(Y) winner stopped by its cap spends exactly its budget; the
  // round trip through x_of_y/y_of_x would otherwise overshoot it by an ulp.
  if (top.type == OrderType::SellY && x_star == cap) charge = top.qty;

  Outcome& out = result.outcomes[ranked.front()];
  out.dx = x_star;
  out.dy = -charge;
  result.end_pool = apply_net_flow(curve, pool, out.dx, out.dy, tol);
  result.uniform_price = charge / x_star;
  return result;
}

// ---------------------------------------------------------------------------
// Mechanism 2

PoolMove pool_move_at_rate(const Curve& curve, const PoolState& pool, double r) {
  const double r0 = marginal_rate(curve, pool);
  if (!(r > 0.0)) throw DomainError("pool_move_at_rate: rate must be positive");
  if (r == r0) return {0.0, r0};
  const double x_end = curve.x_at_slope(r);
  return {pool.x() - x_end, curve.secant_rate(pool.x(), x_end)};
}

EligibleSplit split_eligible(std::span<const Order> batch, double r0) {
  EligibleSplit split;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Order& o = batch[i];
    if (demands_x(o.type)) {
      if (!(o.rate < r0)) split.demand.push_back(i);
    } else {
      if (!(o.rate > r0)) split.supply.push_back(i);
    }
  }
  return split;
}

double x_units(const Order& o, double p) { return quantity_in_y(o.type) ? o.qty / p : o.qty; }

namespace {

enum class Band { Below, AtOrBelow, At, AtOrAbove, Above };

bool in_band(const ExtRate& rate, double r, Band band) {
  switch (band) {
    case Band::Below: return rate < r;
    case Band::AtOrBelow: return rate <= r;
    case Band::At: return rate == r;
    case Band::AtOrAbove: return rate >= r;
    case Band::Above: return rate > r;
  }
  return false;
}

double quantity(std::span<const Order> orders, double r, Band band, double p) {
  double q = 0.0;
  for (const Order& o : orders) {
    if (in_band(o.rate, r, band)) q += x_units(o, p);
  }
  return q;
}

// Quantity of orders whose rate is at least `threshold` (ExtRate-aware).
double quantity_at_least(std::span<const Order> orders, const ExtRate& threshold, double p) {
  double q = 0.0;
  for (const Order& o : orders) {
    if (o.rate >= threshold) q += x_units(o, p);
  }
  return q;
}

double quantity_at_most(std::span<const Order> orders, double threshold, double p) {
  double q = 0.0;
  for (const Order& o : orders) {
    if (o.rate <= threshold) q += x_units(o, p);
  }
  return q;
}

std::vector<double> distinct_finite_rates(std::span<const Order> orders) {
  std::vector<double> rates;
  for (const Order& o : orders) {
    if (o.rate.is_finite()) rates.push_back(o.rate.value());
  }
  std::sort(rates.begin(), rates.end());
  rates.erase(std::unique(rates.begin(), rates.end()), rates.end());
  return rates;
}

}  // namespace

ClearingSolution solve_clearing_rate(const Curve& curve, const PoolState& pool,
                                     std::span<const Order> demand, std::span<const Order> supply,
                                     const Tolerances& tol) {
  const double r0 = marginal_rate(curve, pool);

  const auto condition_a = [&](double r, const PoolMove& m) {
    const double mid = quantity(supply, r, Band::AtOrBelow, m.p_bar) + m.delta_x;
    return quantity(demand, r, Band::Above, m.p_bar) <= mid &&
           mid <= quantity(demand, r, Band::AtOrAbove, m.p_bar);
  };
  const auto condition_b = [&](double r, const PoolMove& m) {
    const double mid = quantity(demand, r, Band::AtOrAbove, m.p_bar) - m.delta_x;
    return quantity(supply, r, Band::Below, m.p_bar) <= mid &&
           mid <= quantity(supply, r, Band::AtOrBelow, m.p_bar);
  };
  const auto solution = [&](double r, ClearingBranch branch) {
    const PoolMove m = pool_move_at_rate(curve, pool, r);
    return ClearingSolution{r, m.p_bar, m.delta_x, branch};
  };

  const PoolMove at_r0{0.0, r0};
  if (condition_a(r0, at_r0)) return {r0, r0, 0.0, ClearingBranch::ExcessDemand};
  if (condition_b(r0, at_r0)) return {r0, r0, 0.0, ClearingBranch::ExcessSupply};

  const bool excess_demand =
      quantity(demand, r0, Band::Above, r0) > quantity(supply, r0, Band::AtOrBelow, r0);
  const bool excess_supply =
      quantity(supply, r0, Band::Below, r0) > quantity(demand, r0, Band::AtOrAbove, r0);

  if (excess_demand) {
    // All supply sits at or below r0, hence inside S_{<=r} for every r >= r0.
    std::vector<double> rates;
    for (double r : distinct_finite_rates(demand)) {
      if (r > r0) rates.push_back(r);
    }
    // Net X surplus on (lo, hi) where D_{>r} is the orders rated >= `floor`.
    const auto surplus_fn = [&](const ExtRate& floor) {
      return [&, floor](double r) {
        const PoolMove m = pool_move_at_rate(curve, pool, r);
        return quantity_at_most(supply, r0, m.p_bar) + m.delta_x -
               quantity_at_least(demand, floor, m.p_bar);
      };
    };

    double prev = r0;
    for (double ri : rates) {
      const PoolMove m = pool_move_at_rate(curve, pool, ri);
      if (condition_a(ri, m)) return {ri, m.p_bar, m.delta_x, ClearingBranch::ExcessDemand};
      const double mid = quantity(supply, ri, Band::AtOrBelow, m.p_bar) + m.delta_x;
      if (mid > quantity(demand, ri, Band::AtOrAbove, m.p_bar)) {
        const double r_star =
            bisect_monotone(surplus_fn(ExtRate::finite(ri)), prev, ri, 0.0, tol);
        return solution(r_star, ClearingBranch::ExcessDemand);
      }
      prev = ri;
    }

    // Only infinite-rate demand remains above `prev`.
    const auto surplus = surplus_fn(ExtRate::infinity());
    double hi = prev * 2.0;
    for (int it = 0; it < tol.max_iter; ++it, hi *= 2.0) {
      if (surplus(hi) >= 0.0) {
        return solution(bisect_monotone(surplus, prev, hi, 0.0, tol), ClearingBranch::ExcessDemand);
      }
    }
    throw NoSolutionError("solve_clearing_rate: infinite-rate demand exceeds what the pool can supply");
  }

  if (excess_supply) {
    // All demand sits at or above r0, hence inside D_{>=r} for every r <= r0.
    std::vector<double> rates;
    for (double r : distinct_finite_rates(supply)) {
      if (r < r0) rates.push_back(r);
    }
    std::reverse(rates.begin(), rates.end());

    double prev = r0;
    for (double ri : rates) {
      const PoolMove m = pool_move_at_rate(curve, pool, ri);
      if (condition_b(ri, m)) return {ri, m.p_bar, m.delta_x, ClearingBranch::ExcessSupply};
      const double mid = quantity(demand, ri, Band::AtOrAbove, m.p_bar) - m.delta_x;
      if (mid > quantity(supply, ri, Band::AtOrBelow, m.p_bar)) {
        const auto surplus = [&, ri](double r) {
          const PoolMove mv = pool_move_at_rate(curve, pool, r);
          return quantity_at_least(demand, ExtRate::finite(r0), mv.p_bar) - mv.delta_x -
                 quantity_at_most(supply, ri, mv.p_bar);
        };
        return solution(bisect_monotone(surplus, ri, prev, 0.0, tol), ClearingBranch::ExcessSupply);
      }
      prev = ri;
    }
  }
  throw NoSolutionError("solve_clearing_rate: could not bracket a clearing rate");
}

namespace {

Outcome fill(const Order& o, double fraction, double p) {
  const double q = o.qty * fraction;
  switch (o.type) {
    case OrderType::BuyX: return {q, -q * p};
    case OrderType::SellY: return {q / p, -q};
    case OrderType::SellX: return {-q, q * p};
    case OrderType::BuyY: return {-q / p, q};
  }
  return {};
}

}  // namespace

std::pair<BatchResult, ClearingSolution> mechanism2_with_solution(const Curve& curve,
                                                                  const PoolState& pool,
                                                                  std::span<const Order> batch,
                                                                  const Tolerances& tol) {
  const double r0 = marginal_rate(curve, pool);
  const EligibleSplit split = split_eligible(batch, r0);

  std::vector<Order> demand;
  std::vector<Order> supply;
  for (std::size_t i : split.demand) demand.push_back(batch[i]);
  for (std::size_t i : split.supply) supply.push_back(batch[i]);

  const ClearingSolution sol = solve_clearing_rate(curve, pool, demand, supply, tol);
  const double r = sol.r_star;
  const double p = sol.p_bar;

  BatchResult result{std::vector<Outcome>(batch.size()), pool, p};

  // The strict side fills completely; the marginal set at r* takes the residual.
  const bool branch_a = sol.branch == ClearingBranch::ExcessDemand;
  const std::vector<std::size_t>& strict_side = branch_a ? split.supply : split.demand;
  const std::vector<std::size_t>& rationed_side = branch_a ? split.demand : split.supply;
  const Band inside = branch_a ? Band::Above : Band::Below;

  double residual = branch_a ? quantity(supply, r, Band::AtOrBelow, p) + sol.delta_x -
                                   quantity(demand, r, Band::Above, p)
                             : quantity(demand, r, Band::AtOrAbove, p) - sol.delta_x -
                                   quantity(supply, r, Band::Below, p);
  const double marginal_q =
      branch_a ? quantity(demand, r, Band::At, p) : quantity(supply, r, Band::At, p);
  const double fraction = marginal_q > 0.0 ? std::clamp(residual / marginal_q, 0.0, 1.0) : 0.0;

  for (std::size_t i : strict_side) result.outcomes[i] = fill(batch[i], 1.0, p);
  for (std::size_t i : rationed_side) {
    const Order& o = batch[i];
    if (in_band(o.rate, r, inside)) {
      result.outcomes[i] = fill(o, 1.0, p);
    } else if (o.rate == r && fraction > 0.0) {
      result.outcomes[i] = fill(o, fraction, p);
    }
  }

  double x_tot = 0.0;
  double y_tot = 0.0;
  for (const Outcome& o : result.outcomes) {
    x_tot += o.dx;
    y_tot += o.dy;
  }
  result.end_pool = apply_net_flow(curve, pool, x_tot, y_tot, tol);
  return {std::move(result), sol};
}

BatchResult mechanism2(const Curve& curve, const PoolState& pool, std::span<const Order> batch,
                       const Tolerances& tol) {
  return mechanism2_with_solution(curve, pool, batch, tol).first;
}

// ---------------------------------------------------------------------------
// Single-side uniform clearing

BatchResult single_side_uniform(const Curve& curve, const PoolState& pool,
                                std::span<const Order> batch, const Tolerances& tol) {
  const double r0 = marginal_rate(curve, pool);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].type != OrderType::BuyX) {
      throw OrderTypeError("single_side_uniform accepts Buy(X) orders only");
    }
    if (!(batch[i].rate < r0)) eligible.push_back(i);
  }
  std::stable_sort(eligible.begin(), eligible.end(),
                   [&](std::size_t a, std::size_t b) { return batch[a].rate > batch[b].rate; });

  // Walk the rate levels from the top: each level is either the jump where
  // r_end(x*) equals its rate, or the plateau just below it.
  double x_star = 0.0;
  std::size_t full_end = 0;      // eligible[0, full_end) fill completely
  std::size_t marginal_end = 0;  // eligible[full_end, marginal_end) share the residual
  double cum = 0.0;
  for (std::size_t begin = 0; begin < eligible.size();) {
    const ExtRate level = batch[eligible[begin]].rate;
    std::size_t end = begin;
    double level_q = 0.0;
    while (end < eligible.size() && batch[eligible[end]].rate == level) {
      level_q += batch[eligible[end]].qty;
      ++end;
    }
    const double through = cum + level_q;
    const double x_end = x_for_end_rate(curve, pool, level, tol);
    if (x_end <= through) {
      if (level.is_infinite()) {
        throw NoSolutionError("single_side_uniform: infinite-rate demand exceeds the pool reserve");
      }
      x_star = std::max(x_end, cum);
      full_end = begin;
      marginal_end = end;
      break;
    }
    const bool last = end == eligible.size();
    if (last || end_rate(curve, pool, through) > batch[eligible[end]].rate) {
      x_star = through;
      full_end = end;
      marginal_end = end;
      break;
    }
    cum = through;
    begin = end;
  }

  BatchResult result{std::vector<Outcome>(batch.size()), pool, std::nullopt};
  const double price = avg_buy_rate(curve, pool, x_star);
  result.uniform_price = price;
  if (x_star <= 0.0) return result;

  double full_q = 0.0;
  for (std::size_t k = 0; k < full_end; ++k) {
    const std::size_t i = eligible[k];
    result.outcomes[i] = {batch[i].qty, -batch[i].qty * price};
    full_q += batch[i].qty;
  }
  double marginal_q = 0.0;
  for (std::size_t k = full_end; k < marginal_end; ++k) marginal_q += batch[eligible[k]].qty;
  if (marginal_q > 0.0) {
    const double fraction = std::clamp((x_star - full_q) / marginal_q, 0.0, 1.0);
    for (std::size_t k = full_end; k < marginal_end; ++k) {
      const std::size_t i = eligible[k];
      const double q = batch[i].qty * fraction;
      if (q > 0.0) result.outcomes[i] = {q, -q * price};
    }
  }

  double x_tot = 0.0;
  double y_tot = 0.0;
  for (const Outcome& o : result.outcomes) {
    x_tot += o.dx;
    y_tot += o.dy;
  }
  result.end_pool = apply_net_flow(curve, pool, x_tot, y_tot, tol);
  return result;
}

}  // namespace ammlab
