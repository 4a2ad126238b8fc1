#include "ammlab/amm_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ammlab {

namespace {

void require_withdrawal(const PoolState& pool, double x, const char* op) {
  if (!(x >= 0.0) || !(x < pool.x())) {
    std::ostringstream os;
    os << op << ": withdrawal " << x << " outside [0, " << pool.x() << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

PoolState::PoolState(double x_reserve, double y_reserve) : x_(x_reserve), y_(y_reserve) {
  if (!(x_reserve > 0.0) || !(y_reserve > 0.0) || !std::isfinite(x_reserve) ||
      !std::isfinite(y_reserve)) {
    throw DomainError("pool reserves must be finite and strictly positive");
  }
}

double Curve::secant_rate(double from, double to) const {
  if (from == to) return slope_at(from);
  return (y_at(to) - y_at(from)) / (from - to);
}

double Curve::x_at_secant_rate(double from, double r) const {
  // secant_rate(from, to) increases as `to` falls; search in withdrawal space.
  const auto avg = [&](double w) { return secant_rate(from, from - w); };
  Tolerances tol;
  tol.max_iter = 2000;
  double hi = from / 2.0;
  for (int i = 0; i < 1000 && avg(hi) < r; ++i) hi = from - (from - hi) / 2.0;
  return from - bisect_monotone(avg, 0.0, hi, r, tol);
}

ConstantProduct::ConstantProduct(double c) : c_(c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("curve constant must be positive");
}

double y_of_x(const Curve& curve, double x) {
  if (!(x > 0.0)) throw DomainError("y_of_x: x must be positive");
  return curve.y_at(x);
}

double x_of_y(const Curve& curve, double y) {
  if (!(y > 0.0)) throw DomainError("x_of_y: y must be positive");
  return curve.x_at(y);
}

double marginal_rate(const Curve& curve, const PoolState& pool) { return curve.slope_at(pool.x()); }

double avg_buy_rate(const Curve& curve, const PoolState& pool, double x) {
  require_withdrawal(pool, x, "avg_buy_rate");
  return curve.secant_rate(pool.x(), pool.x() - x);
}

double end_rate(const Curve& curve, const PoolState& pool, double x) {
  require_withdrawal(pool, x, "end_rate");
  return curve.slope_at(pool.x() - x);
}

double x_for_avg_rate(const Curve& curve, const PoolState& pool, double r) {
  const double r0 = marginal_rate(curve, pool);
  if (!(r > r0) || !std::isfinite(r)) {
    throw DomainError("x_for_avg_rate: rate must exceed the market rate");
  }
  return pool.x() - curve.x_at_secant_rate(pool.x(), r);
}

double x_for_end_rate(const Curve& curve, const PoolState& pool, const ExtRate& r,
                      const Tolerances& tol) {
  if (r.is_infinite()) return pool.x() - tol.tol_root * pool.x();
  const double r0 = marginal_rate(curve, pool);
  if (r.value() < r0) throw DomainError("x_for_end_rate: rate below the market rate");
  if (r.value() == r0) return 0.0;
  return std::max(0.0, pool.x() - curve.x_at_slope(r.value()));
}

PoolState apply_net_flow(const Curve& curve, const PoolState& pool, double x_tot, double y_tot,
                         const Tolerances& tol) {
  const double x_end = pool.x() - x_tot;
  const double y_end = pool.y() - y_tot;
  if (!(x_end > 0.0) || !(y_end > 0.0)) {
    throw DepletionError("apply_net_flow: batch would deplete a reserve");
  }
  const double c = curve.constant();
  const double drift = std::abs(curve.potential(x_end, y_end) - c) / c;
  if (drift > tol.tol_audit) {
    std::ostringstream os;
    os.precision(12);
    os << "apply_net_flow: potential drift " << drift << " exceeds " << tol.tol_audit;
    throw ConformanceError(os.str());
  }
  return PoolState(x_end, y_end);
}

double uniform_payment_gradient(const Curve& curve, const PoolState& pool, double a1, double a2) {
  if (!(a1 >= 0.0) || !(a2 >= 0.0) || !(a1 + a2 > 0.0)) {
    throw DomainError("uniform_payment_gradient: allocations must be non-negative with a positive sum");
  }
  const double total = a1 + a2;
  const double w = a1 / total;
  return w * end_rate(curve, pool, total) + (1.0 - w) * avg_buy_rate(curve, pool, total);
}

void require_on_curve(const Curve& curve, const PoolState& pool, const Tolerances& tol) {
  const double c = curve.constant();
  if (std::abs(curve.potential(pool.x(), pool.y()) - c) / c > tol.tol_audit) {
    throw ConformanceError("pool state does not lie on the curve");
  }
}

}  // namespace ammlab
