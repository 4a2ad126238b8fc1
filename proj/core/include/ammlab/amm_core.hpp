#pragma once

#include <memory>
#include <string_view>

#include "ammlab/numerics.hpp"

namespace ammlab {

/// Reserves held by the pool. Both strictly positive.
class PoolState {
 public:
  PoolState(double x_reserve, double y_reserve);

  [[nodiscard]] double x() const noexcept { return x_; }
  [[nodiscard]] double y() const noexcept { return y_; }

  friend bool operator==(const PoolState&, const PoolState&) = default;

 private:
  double x_;
  double y_;
};

/// A potential-function level set Phi(X, Y) = C, viewed as Y(X).
///
/// Implementations must be increasing, differentiable and concave in the sense
/// that Y(X) is strictly decreasing and -dY/dX strictly decreasing in X.
/// Everything else in the library talks to a curve only through this surface.
class Curve {
 public:
  virtual ~Curve() = default;

  [[nodiscard]] virtual std::string_view kind() const noexcept = 0;
  [[nodiscard]] virtual double constant() const noexcept = 0;
  [[nodiscard]] virtual double potential(double x, double y) const = 0;

  [[nodiscard]] virtual double y_at(double x) const = 0;
  [[nodiscard]] virtual double x_at(double y) const = 0;
  /// -dY/dX at reserve level x.
  [[nodiscard]] virtual double slope_at(double x) const = 0;
  /// Reserve level at which -dY/dX equals r.
  [[nodiscard]] virtual double x_at_slope(double r) const = 0;

  /// (Y(to) - Y(from)) / (from - to): average rate of moving the X reserve
  /// from `from` to `to`. Equals slope_at(from) when the two coincide.
  [[nodiscard]] virtual double secant_rate(double from, double to) const;
  /// Reserve level `to` < from with secant_rate(from, to) == r, for r above
  /// slope_at(from). The default finds it by bisection.
  [[nodiscard]] virtual double x_at_secant_rate(double from, double r) const;
};

/// Phi(X, Y) = X * Y. All inverses have closed forms.
class ConstantProduct final : public Curve {
 public:
  explicit ConstantProduct(double c);
  static ConstantProduct through(const PoolState& pool) { return ConstantProduct(pool.x() * pool.y()); }

  [[nodiscard]] std::string_view kind() const noexcept override { return "constant_product"; }
  [[nodiscard]] double constant() const noexcept override { return c_; }
  [[nodiscard]] double potential(double x, double y) const override { return x * y; }
  [[nodiscard]] double y_at(double x) const override { return c_ / x; }
  [[nodiscard]] double x_at(double y) const override { return c_ / y; }
  [[nodiscard]] double slope_at(double x) const override { return c_ / (x * x); }
  [[nodiscard]] double x_at_slope(double r) const override { return std::sqrt(c_ / r); }
  [[nodiscard]] double secant_rate(double from, double to) const override { return c_ / (from * to); }
  [[nodiscard]] double x_at_secant_rate(double from, double r) const override { return c_ / (r * from); }

 private:
  double c_;
};

// Rate algebra. Quantities are in X unless stated otherwise; rates in Y per X.

double y_of_x(const Curve& curve, double x);
double x_of_y(const Curve& curve, double y);

/// Market rate r0 = -dY/dX at the pool's X reserve.
double marginal_rate(const Curve& curve, const PoolState& pool);

/// Average price per unit when buying x units of X from the pool; the
/// marginal rate at x = 0.
double avg_buy_rate(const Curve& curve, const PoolState& pool, double x);

/// Marginal rate after buying x units of X from the pool.
double end_rate(const Curve& curve, const PoolState& pool, double x);

/// Unique x > 0 with avg_buy_rate(x) == r. Requires r > marginal rate.
double x_for_avg_rate(const Curve& curve, const PoolState& pool, double r);

/// x' with end_rate(x') == r. Infinity maps to the largest admissible
/// withdrawal: the X reserve less a guard of tol_root * reserve.
double x_for_end_rate(const Curve& curve, const PoolState& pool, const ExtRate& r,
                      const Tolerances& tol = {});

/// Pool after users collectively gain (x_tot, y_tot). Throws DepletionError if
/// a reserve would not stay positive and ConformanceError if the potential
/// drifts by more than tol_audit relative to C.
PoolState apply_net_flow(const Curve& curve, const PoolState& pool, double x_tot, double y_tot,
                         const Tolerances& tol = {});

/// d f1 / d a1 for f1(a1, a2) = a1 * r_avg(a1 + a2): the marginal Y cost to
/// the first of two buyers sharing a uniform price. Swap the arguments for the
/// second buyer's partial.
double uniform_payment_gradient(const Curve& curve, const PoolState& pool, double a1, double a2);

/// Throws ConformanceError unless the pool lies on the curve within tol_audit.
void require_on_curve(const Curve& curve, const PoolState& pool, const Tolerances& tol = {});

}  // namespace ammlab
