#include "ammlab/numerics.hpp"

#include <algorithm>
#include <sstream>

namespace ammlab {

void Tolerances::validate() const {
  if (!(tol_root > 0.0) || !(tol_audit > 0.0) || max_iter < 1) {
    throw ParameterError("tolerances must satisfy tol_root > 0, tol_audit > 0, max_iter >= 1");
  }
}

ExtRate ExtRate::finite(double value) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    throw DomainError("finite rate must be strictly positive, got " + std::to_string(value));
  }
  ExtRate r;
  r.infinite_ = false;
  r.value_ = value;
  return r;
}

double ExtRate::value() const {
  if (infinite_) throw std::logic_error("ExtRate::value() called on Infinity");
  return value_;
}

std::string ExtRate::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(12);
  os << value_;
  return os.str();
}

double bisect_monotone(const std::function<double(double)>& f, double lo, double hi,
                       double target, const Tolerances& tol) {
  if (!(lo <= hi)) throw BracketError("bisect_monotone: lo must not exceed hi");
  const double slack = tol.tol_root * std::max(1.0, std::abs(target));

  double f_lo = f(lo);
  double f_hi = f(hi);
  if (std::abs(f_lo - target) <= slack) return lo;
  if (std::abs(f_hi - target) <= slack) return hi;

  // Orient so that g(lo) < 0 < g(hi) with g = f - target.
  const bool increasing = f_lo < f_hi;
  const double g_lo = increasing ? f_lo - target : target - f_lo;
  const double g_hi = increasing ? f_hi - target : target - f_hi;
  if (!(g_lo < 0.0 && g_hi > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "bisect_monotone: target " << target << " outside [f(lo), f(hi)] = [" << f_lo << ", "
       << f_hi << "]";
    throw BracketError(os.str());
  }

  double a = lo;
  double b = hi;
  for (int it = 0; it < tol.max_iter; ++it) {
    const double mid = a + (b - a) / 2.0;
    if (mid <= a || mid >= b) {
      const double ra = std::abs(f(a) - target);
      const double rb = std::abs(f(b) - target);
      return ra <= rb ? a : b;
    }
    const double f_mid = f(mid);
    const double g_mid = increasing ? f_mid - target : target - f_mid;
    if (std::abs(g_mid) <= slack) return mid;
    if (g_mid < 0.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  throw NoConvergenceError("bisect_monotone: max_iter exceeded");
}

}  // namespace ammlab
