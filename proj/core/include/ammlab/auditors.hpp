#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ammlab/audit_report.hpp"
#include "ammlab/mechanisms.hpp"
#include "ammlab/orders.hpp"

namespace ammlab {

/// Plain: the strategic player also controls sequencing (censors others,
/// rewrites aux freely). WeakFairSequencing: orders are sequenced by aux and a
/// re-bid may only arrive later (aux' >= aux).
enum class StrategyModel { Plain, WeakFairSequencing };

std::string_view to_string(StrategyModel m) noexcept;
/// "plain" | "weak".
std::optional<StrategyModel> parse_strategy_model(std::string_view s) noexcept;

struct DeviationGrid {
  std::vector<ExtRate> rate_points;
  std::vector<double> qty_points;   // 0 means "post nothing"
  std::vector<OrderType> types;     // empty: the player's own type only
  int max_sybil = 2;
  bool include_analytic = true;

  /// Throws ParameterError on empty lists, negative quantities or max_sybil
  /// outside [1, 2].
  void validate() const;
};

enum class GridPreset { Coarse, Default, Fine };
std::optional<GridPreset> parse_grid_preset(std::string_view s) noexcept;

/// Log-spaced rates on [r0/4, 4 r0] plus infinity; quantities 0 and a linear
/// ramp up to 1.5 q_ref. Coarse 9x8, default 21x20, fine 41x40.
DeviationGrid make_grid(GridPreset preset, double r0, double q_ref);

AuditReport check_uniform_pricing(std::span<const Order> batch, const BatchResult& result,
                                  const Tolerances& tol = {});

/// Buy side (Buy(X)/Sell(Y)) needs rate >= r0, sell side rate <= r0.
bool is_eligible(const Order& o, double r0);

/// LE (weak = false) or wLE (weak = true) at the result's end pool. `pool` is
/// the starting state; it fixes r0 for the eligibility filter.
AuditReport check_local_efficiency(const Curve& curve, const PoolState& pool,
                                   std::span<const Order> batch, const BatchResult& result,
                                   bool weak, const Tolerances& tol = {});

inline constexpr std::size_t kMaxArbitrageBatch = 22;

/// Exhaustive subset search for joint gains dx >= 0, dy >= 0 with one of them
/// strictly positive. The first offending subset in lexicographic order of
/// its sorted index list is reported. Throws SizeError beyond 22 orders.
AuditReport find_arbitrage_subset(const BatchResult& result, const Tolerances& tol = {});

/// One strategy of the audited player: what it posts and how the batch is
/// sequenced around it.
struct Deviation {
  std::vector<Order> orders;           // empty: abstain
  std::vector<std::size_t> censored;   // indices into `others`
};

/// Runs the mechanism on the batch the deviation induces and returns the
/// player's joint outcome. Orders are sequenced by aux (absent counts as 0);
/// the player's orders go after honest orders with the same aux.
Outcome play(const Mechanism& mechanism, const Curve& curve, const PoolState& pool,
             std::span<const Order> others, const Deviation& deviation,
             const Tolerances& tol = {});

/// Truthful strategy for an intrinsic type; posts nothing when its qty is 0.
Deviation honest_strategy(const IntrinsicType& type);

/// Searches the deviation space for a strictly better joint outcome. A pass
/// only means no violation was found on this grid.
///
/// Candidates: abstention, single orders over the grid (and the truthful
/// order), pairs of them when max_sybil == 2, and with include_analytic the
/// infinite-rate bids (inf, x_for_avg_rate(r)) for every other declared rate
/// r above r0 plus (inf, eps X0). Each candidate is tried at every distinct
/// sequencing slot the model permits; Plain also censors every subset of
/// `others` (at most 6 orders, SizeError otherwise).
AuditReport ic_audit(const Mechanism& mechanism, const Curve& curve, const PoolState& pool,
                     std::span<const Order> others, const IntrinsicType& type,
                     StrategyModel model, const DeviationGrid& grid, const Tolerances& tol = {});

}  // namespace ammlab
