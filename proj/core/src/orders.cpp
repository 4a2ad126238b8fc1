#include "ammlab/orders.hpp"

#include <cmath>
#include <string>

namespace ammlab {

std::string_view to_string(OrderType t) noexcept {
  switch (t) {
    case OrderType::BuyX: return "buy_x";
    case OrderType::BuyY: return "buy_y";
    case OrderType::SellX: return "sell_x";
    case OrderType::SellY: return "sell_y";
  }
  return "unknown";
}

std::optional<OrderType> parse_order_type(std::string_view s) noexcept {
  if (s == "buy_x") return OrderType::BuyX;
  if (s == "buy_y") return OrderType::BuyY;
  if (s == "sell_x") return OrderType::SellX;
  if (s == "sell_y") return OrderType::SellY;
  return std::nullopt;
}

void Order::validate() const {
  if (!(qty > 0.0) || !std::isfinite(qty)) {
    throw ParameterError("order quantity must be finite and strictly positive");
  }
  if (aux && (!(*aux >= 0.0) || !std::isfinite(*aux))) {
    throw ParameterError("order aux tag must be a finite non-negative number");
  }
}

namespace {

// Filled quantity in the order's own asset, signed so that a legal fill lies in [0, q].
double filled_quantity(const Order& o, const Outcome& out) {
  switch (o.type) {
    case OrderType::BuyX: return out.dx;
    case OrderType::BuyY: return out.dy;
    case OrderType::SellX: return -out.dx;
    case OrderType::SellY: return -out.dy;
  }
  return 0.0;
}

nlohmann::json violation(std::size_t index, std::string_view clause, nlohmann::json detail) {
  nlohmann::json w;
  w["order"] = index;
  w["clause"] = clause;
  w["detail"] = std::move(detail);
  return w;
}

}  // namespace

AuditReport check_well_formed(const Curve& curve, const PoolState& pool,
                              std::span<const Order> batch, const BatchResult& result,
                              const Tolerances& tol) {
  constexpr std::string_view kProperty = "well_formed";
  if (result.outcomes.size() != batch.size()) {
    throw AlignmentError("check_well_formed: result has " + std::to_string(result.outcomes.size()) +
                         " outcomes for a batch of " + std::to_string(batch.size()));
  }
  const double eps = tol.tol_audit;

  double x_tot = 0.0;
  double y_tot = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Order& o = batch[i];
    const Outcome& out = result.outcomes[i];
    x_tot += out.dx;
    y_tot += out.dy;

    const double filled = filled_quantity(o, out);
    if (filled < -eps || filled > o.qty + eps) {
      return AuditReport::fail(std::string(kProperty),
                               violation(i, "reasonable_fulfillment", {{"filled", filled}, {"qty", o.qty}}));
    }

    const bool both_zero = std::abs(out.dx) <= eps && std::abs(out.dy) <= eps;
    if (!both_zero && !(out.dx * out.dy < 0.0)) {
      return AuditReport::fail(std::string(kProperty),
                               violation(i, "no_free_lunch", {{"dx", out.dx}, {"dy", out.dy}}));
    }

    if (out.dx != 0.0) {
      const double realized = -out.dy / out.dx;
      bool rational = true;
      if (demands_x(o.type)) {
        rational = o.rate.is_infinite() || realized <= o.rate.value() + eps;
      } else {
        rational = o.rate.is_finite() && realized >= o.rate.value() - eps;
      }
      if (!rational) {
        return AuditReport::fail(
            std::string(kProperty),
            violation(i, "individual_rationality", {{"realized_rate", realized}, {"limit", o.rate.to_string()}}));
      }
    }
  }

  const double x_end = pool.x() - x_tot;
  const double y_end = pool.y() - y_tot;
  const double c = curve.constant();
  const bool reserves_ok = x_end > 0.0 && y_end > 0.0;
  const double drift = reserves_ok ? std::abs(curve.potential(x_end, y_end) - c) / c : INFINITY;
  const bool matches_reported = std::abs(result.end_pool.x() - x_end) <= eps * std::max(1.0, pool.x()) &&
                                std::abs(result.end_pool.y() - y_end) <= eps * std::max(1.0, pool.y());
  if (!reserves_ok || drift > eps || !matches_reported) {
    nlohmann::json w;
    w["order"] = nullptr;
    w["clause"] = "conformance";
    w["detail"] = {{"x_end", x_end}, {"y_end", y_end}, {"drift", reserves_ok ? drift : -1.0}};
    return AuditReport::fail(std::string(kProperty), std::move(w));
  }
  return AuditReport::pass(std::string(kProperty));
}

}  // namespace ammlab
