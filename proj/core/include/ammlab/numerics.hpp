#pragma once

#include <cmath>
#include <compare>
#include <functional>
#include <stdexcept>
#include <string>

namespace ammlab {

// Error taxonomy. Every failure mode surfaced by the library is one of these.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConformanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DepletionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoSolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AlignmentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct OrderTypeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct SizeError : std::length_error {
  using std::length_error::length_error;
};

struct Tolerances {
  double tol_root = 1e-12;   // relative, root finds
  double tol_audit = 1e-7;   // absolute, property comparisons
  int max_iter = 200;

  /// Throws ParameterError unless every field is strictly positive.
  void validate() const;
};

/// An exchange rate in units of Y per X: either a strictly positive finite
/// value or +infinity. Infinity is a distinct state, never a float sentinel.
class ExtRate {
 public:
  static ExtRate finite(double value);
  static ExtRate infinity() noexcept { return ExtRate{}; }

  [[nodiscard]] bool is_infinite() const noexcept { return infinite_; }
  [[nodiscard]] bool is_finite() const noexcept { return !infinite_; }
  /// Finite value; throws std::logic_error on Infinity.
  [[nodiscard]] double value() const;

  friend bool operator==(const ExtRate& a, const ExtRate& b) noexcept {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend std::partial_ordering operator<=>(const ExtRate& a, const ExtRate& b) noexcept {
    if (a.infinite_ || b.infinite_) {
      return a.infinite_ == b.infinite_ ? std::partial_ordering::equivalent
             : a.infinite_              ? std::partial_ordering::greater
                                        : std::partial_ordering::less;
    }
    return a.value_ <=> b.value_;
  }
  friend bool operator==(const ExtRate& a, double b) noexcept {
    return !a.infinite_ && a.value_ == b;
  }
  friend std::partial_ordering operator<=>(const ExtRate& a, double b) noexcept {
    if (a.infinite_) return std::partial_ordering::greater;
    return a.value_ <=> b;
  }

  [[nodiscard]] std::string to_string() const;

 private:
  ExtRate() noexcept = default;
  bool infinite_ = true;
  double value_ = 0.0;
};

/// Pure bisection for f(x) = target on [lo, hi] with f monotone (or merely
/// continuous with a sign change). The midpoint rule is fixed, so identical
/// inputs give bit-identical roots. Returns x in [lo, hi] with
/// |f(x) - target| <= tol_root * max(1, |target|); if the bracket collapses to
/// adjacent doubles first, the endpoint with the smaller residual is returned.
double bisect_monotone(const std::function<double(double)>& f, double lo, double hi,
                       double target, const Tolerances& tol);

}  // namespace ammlab
