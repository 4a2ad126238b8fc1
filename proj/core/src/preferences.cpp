#include "ammlab/preferences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ammlab {

std::string_view to_string(PrefResult p) noexcept {
  switch (p) {
    case PrefResult::StrictlyWorse: return "strictly_worse";
    case PrefResult::Equivalent: return "equivalent";
    case PrefResult::StrictlyBetter: return "strictly_better";
    case PrefResult::Incomparable: return "incomparable";
  }
  return "unknown";
}

namespace {

int sign_with_slack(double d, double slack) {
  if (d > slack) return 1;
  if (d < -slack) return -1;
  return 0;
}

// Sign of (a1 - a0) * r + (b1 - b0), with r possibly infinite.
int valuation_delta_sign(const ExtRate& r, double a0, double b0, double a1, double b1, double slack) {
  if (r.is_infinite()) {
    const int s = sign_with_slack(a1 - a0, slack);
    return s != 0 ? s : sign_with_slack(b1 - b0, slack);
  }
  return sign_with_slack((a1 - a0) * r.value() + (b1 - b0), slack);
}

bool within_sell_budget(const IntrinsicType& type, const Outcome& o, double slack = 0.0) {
  const double spent = type.type == OrderType::SellX ? -o.dx : -o.dy;
  return spent <= type.qty + slack * std::max(1.0, type.qty);
}

PrefResult combine(int first, int second) {
  if (first == 0 && second == 0) return PrefResult::Equivalent;
  if (first >= 0 && second >= 0) return PrefResult::StrictlyBetter;
  if (first <= 0 && second <= 0) return PrefResult::StrictlyWorse;
  return PrefResult::Incomparable;
}

PrefResult from_sign(int s) {
  return s > 0 ? PrefResult::StrictlyBetter : s < 0 ? PrefResult::StrictlyWorse : PrefResult::Equivalent;
}

}  // namespace

double sell_utility(const IntrinsicType& type, const Outcome& o) {
  if (type.type != OrderType::SellX && type.type != OrderType::SellY) {
    throw OrderTypeError("sell_utility: intrinsic type is not a sell type");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (!within_sell_budget(type, o)) return -kInf;
  if (type.rate.is_infinite()) {
    return o.dx > 0.0 ? kInf : o.dx < 0.0 ? -kInf : o.dy;
  }
  return o.dx * type.rate.value() + o.dy;
}

PrefResult compare(const IntrinsicType& type, const Outcome& o0, const Outcome& o1, double slack) {
  const ExtRate& r = type.rate;
  switch (type.type) {
    case OrderType::SellX:
    case OrderType::SellY: {
      const bool ok0 = within_sell_budget(type, o0, slack);
      const bool ok1 = within_sell_budget(type, o1, slack);
      if (!ok0 || !ok1) {
        return ok0 == ok1 ? PrefResult::Equivalent
               : ok1      ? PrefResult::StrictlyBetter
                          : PrefResult::StrictlyWorse;
      }
      return from_sign(valuation_delta_sign(r, o0.dx, o0.dy, o1.dx, o1.dy, slack));
    }
    case OrderType::BuyX: {
      const int uncapped = valuation_delta_sign(r, o0.dx, o0.dy, o1.dx, o1.dy, slack);
      const int capped = valuation_delta_sign(r, std::min(o0.dx, type.qty), o0.dy,
                                              std::min(o1.dx, type.qty), o1.dy, slack);
      return combine(uncapped, capped);
    }
    case OrderType::BuyY: {
      const int uncapped = valuation_delta_sign(r, o0.dx, o0.dy, o1.dx, o1.dy, slack);
      const int capped = valuation_delta_sign(r, o0.dx, std::min(o0.dy, type.qty), o1.dx,
                                              std::min(o1.dy, type.qty), slack);
      return combine(uncapped, capped);
    }
  }
  return PrefResult::Incomparable;
}

Outcome joint_outcome(std::span<const Outcome> parts) noexcept {
  Outcome sum;
  for (const auto& p : parts) sum += p;
  return sum;
}

}  // namespace ammlab
