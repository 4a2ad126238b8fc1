#pragma once

#include <span>
#include <string_view>

#include "ammlab/orders.hpp"

namespace ammlab {

/// Relation of the second outcome to the first under a type's ranking.
enum class PrefResult { StrictlyWorse, Equivalent, StrictlyBetter, Incomparable };

std::string_view to_string(PrefResult p) noexcept;

/// Quasilinear utility x*r + y for sell types, -inf once the budget q is
/// breached. Throws OrderTypeError for buy types.
double sell_utility(const IntrinsicType& type, const Outcome& o);

/// Compares o1 against o0 for a player of the given type.
///
/// Sell types use the total order induced by sell_utility. Buy types use the
/// partial order of two quasilinear valuations: one counting every received
/// unit at rate r, the other capping the received asset at q. o1 is
/// StrictlyBetter when both valuations weakly improve and at least one
/// strictly. Differences within `slack` count as ties, and a sell budget may
/// be overrun by `slack` relative to q.
PrefResult compare(const IntrinsicType& type, const Outcome& o0, const Outcome& o1,
                   double slack = 0.0);

/// Joint outcome of a player who posted several orders.
Outcome joint_outcome(std::span<const Outcome> parts) noexcept;

}  // namespace ammlab
