#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ammlab/amm_core.hpp"
#include "ammlab/audit_report.hpp"
#include "ammlab/numerics.hpp"

namespace ammlab {

enum class OrderType { BuyX, BuyY, SellX, SellY };

std::string_view to_string(OrderType t) noexcept;
/// Parses "buy_x" | "buy_y" | "sell_x" | "sell_y".
std::optional<OrderType> parse_order_type(std::string_view s) noexcept;

/// Buy(X) and Sell(Y) take X out of the batch; they bound -dy/dx from above.
constexpr bool demands_x(OrderType t) noexcept {
  return t == OrderType::BuyX || t == OrderType::SellY;
}
/// Quantity is denominated in Y for Buy(Y) / Sell(Y).
constexpr bool quantity_in_y(OrderType t) noexcept {
  return t == OrderType::BuyY || t == OrderType::SellY;
}

/// (t, r, q, aux). The rate is Y per X for every type; for Y-denominated types
/// the bound on X per Y is 1/r. `aux` is an opaque arrival tag.
struct Order {
  OrderType type = OrderType::BuyX;
  ExtRate rate = ExtRate::infinity();
  double qty = 0.0;
  std::optional<double> aux;

  /// Throws ParameterError unless qty > 0 and aux (if set) is non-negative.
  void validate() const;
};

/// A player's true valuation and demand. Same shape as an order; qty may be 0
/// for a player with no intrinsic demand.
using IntrinsicType = Order;

/// Net gain of one order: negative values are losses.
struct Outcome {
  double dx = 0.0;
  double dy = 0.0;

  Outcome& operator+=(const Outcome& o) noexcept {
    dx += o.dx;
    dy += o.dy;
    return *this;
  }
  friend Outcome operator+(Outcome a, const Outcome& b) noexcept { return a += b; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct BatchResult {
  std::vector<Outcome> outcomes;
  PoolState end_pool;
  std::optional<double> uniform_price;

  friend bool operator==(const BatchResult&, const BatchResult&) = default;
};

/// Reasonable fulfillment, no free lunch, individual rationality and
/// conformance to the potential, all within tol_audit. Throws AlignmentError
/// when the result does not match the batch.
AuditReport check_well_formed(const Curve& curve, const PoolState& pool,
                              std::span<const Order> batch, const BatchResult& result,
                              const Tolerances& tol = {});

}  // namespace ammlab
