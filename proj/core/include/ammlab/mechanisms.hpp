#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ammlab/amm_core.hpp"
#include "ammlab/orders.hpp"

namespace ammlab {

enum class MechanismId { Null, M1_IC_UP, M2_UP_WLE, SingleSideUniform };

/// "null" | "m1" | "m2" | "ssu".
std::string_view to_string(MechanismId id) noexcept;
std::optional<MechanismId> parse_mechanism_id(std::string_view s) noexcept;

/// Deterministic batch mechanism: a pure function of its inputs.
using Mechanism = std::function<BatchResult(const Curve&, const PoolState&, std::span<const Order>,
                                            const Tolerances&)>;

Mechanism mechanism_for(MechanismId id);

BatchResult run_mechanism(MechanismId id, const Curve& curve, const PoolState& pool,
                          std::span<const Order> batch, const Tolerances& tol = {});

/// Leaves every order untouched and the pool unchanged.
BatchResult null_mechanism(const Curve& curve, const PoolState& pool, std::span<const Order> batch,
                           const Tolerances& tol = {});

/// Second-price style single winner with uniform pricing.
///
/// Sell(X)/Buy(Y) orders and Buy(X)/Sell(Y) orders below the market rate r0
/// are ignored. The highest remaining rate r1 wins (ties go to the earlier
/// input position); r2 is the runner-up's rate, or r0 when the winner is
/// alone. The winner must absorb at least x, the withdrawal whose average
/// price is r2, and is extended towards x', where the end rate reaches r1,
/// capped by its quantity (Buy(X)) or by the X its Y budget buys at the
/// initial state (Sell(Y)). If the cap is below x nobody trades.
BatchResult mechanism1(const Curve& curve, const PoolState& pool, std::span<const Order> batch,
                       const Tolerances& tol = {});

enum class ClearingBranch { ExcessDemand, ExcessSupply };  // conditions (a) / (b)

struct ClearingSolution {
  double r_star = 0.0;
  double p_bar = 0.0;    // uniform price at r_star
  double delta_x = 0.0;  // X leaving the pool; negative when the pool buys X
  ClearingBranch branch = ClearingBranch::ExcessDemand;
};

/// Uniform-price pool state for a target end rate r: the X outflow Δx(r) and
/// the average price p̄(r) of the move. At r0 both take their limits (0, r0).
struct PoolMove {
  double delta_x;
  double p_bar;
};
PoolMove pool_move_at_rate(const Curve& curve, const PoolState& pool, double r);

/// Demand side (Buy(X)/Sell(Y)) and supply side (Buy(Y)/Sell(X)) after
/// discarding orders on the wrong side of r0. Indices refer to the input batch.
struct EligibleSplit {
  std::vector<std::size_t> demand;
  std::vector<std::size_t> supply;
};
EligibleSplit split_eligible(std::span<const Order> batch, double r0);

/// Converts an order's quantity to X units at price p.
double x_units(const Order& o, double p);

/// Finds r* satisfying condition (a) (r* >= r0) or (b) (r* <= r0). r0 is
/// tested first; otherwise the declared rates on the deficient side are
/// scanned outward from r0 and the interior equality is bisected between the
/// bracketing rates. Throws NoSolutionError if no bracket exists (e.g.
/// infinite-rate demand the pool cannot cover).
ClearingSolution solve_clearing_rate(const Curve& curve, const PoolState& pool,
                                     std::span<const Order> demand, std::span<const Order> supply,
                                     const Tolerances& tol = {});

/// Uniform-price clearing with weak local efficiency. Orders strictly inside
/// the clearing rate fill completely; the marginal set at r* is rationed
/// pro rata by X-equivalent quantity. Every executed order trades at p̄(r*).
BatchResult mechanism2(const Curve& curve, const PoolState& pool, std::span<const Order> batch,
                       const Tolerances& tol = {});

/// Same as mechanism2 but also returns the clearing solution.
std::pair<BatchResult, ClearingSolution> mechanism2_with_solution(const Curve& curve,
                                                                  const PoolState& pool,
                                                                  std::span<const Order> batch,
                                                                  const Tolerances& tol = {});

/// Buy(X)-only uniform clearing: the fixed point x* = D(r_end(x*)) of the
/// demand step function D(r) = sum of q_i over rates >= r. Everyone executed
/// pays r_avg(x*). Throws OrderTypeError for any other order type.
BatchResult single_side_uniform(const Curve& curve, const PoolState& pool,
                                std::span<const Order> batch, const Tolerances& tol = {});

}  // namespace ammlab
