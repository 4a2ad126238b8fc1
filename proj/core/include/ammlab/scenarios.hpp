#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "ammlab/audit_report.hpp"
#include "ammlab/auditors.hpp"
#include "ammlab/orders.hpp"

namespace ammlab {

/// A construction whose numeric verification did not come out as predicted.
/// Signals a bug, not bad input.
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two Buy(X) orders of q+eps and q+2eps against one Sell(X) of q, all fully
/// filled, with the pool covering the net X at ending rate r*. For every sell
/// price r* * factor (factor >= 1) the buys share the aggregate-consistent
/// uniform price; the report passes when each sample exposes an arbitrage
/// pair made of the seller and one buyer with both gains above tol_audit.
/// Throws ParameterError when eps is too large for some sample.
AuditReport thm31_build_and_verify(const Curve& curve, const PoolState& pool, double q, double eps,
                                   std::span<const double> sell_price_factors,
                                   const Tolerances& tol = {});

/// Evenly spaced samples q_s * k / n, k = 1..n.
std::vector<double> even_samples(double q_s, int n);

/// An infinite-rate Buy(X) of q_b against a Sell(X) of q_s at
/// r_s = end_rate(q_b) - eps. Case 1 (seller idle) must fail LE; case 2
/// (seller fills x_s) must fail IR under a uniform price, for every sample.
/// The report passes when both cases fail as predicted. Throws
/// ParameterError when eps or q_s is out of range.
AuditReport thm32_build_and_verify(const Curve& curve, const PoolState& pool, double q_b,
                                   double eps, double q_s, std::span<const double> x_s_samples,
                                   const Tolerances& tol = {});

struct TrilemmaCertificate {
  double r1 = 0.0;
  double r2 = 0.0;
  double delta_x = 0.0;
  double delta_y = 0.0;
  double r2_star = 0.0;
  double x_tot = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  double u1_truthful = 0.0;
  double u1_deviate = 0.0;
  double gap = 0.0;  // u1_deviate - u1_truthful
};

/// r2* = end_rate(x_for_avg_rate(r2)).
double trilemma_r2_star(const Curve& curve, const PoolState& pool, double r2);

/// Two buyers with rates r1 > r2 under any IC + wLE + UP mechanism. x_tot
/// solves r_end(x) + r_avg(x) = r1 + r2; x1 = x_tot (r1 - r_avg) / (r_end -
/// r_avg). The truthful utility of buyer 1 is compared with bidding
/// (inf, delta_x). Throws DomainError unless r0 < r2 < r1 < r2*, and
/// VerificationError if the first-order conditions do not hold at (x1, x2).
TrilemmaCertificate trilemma_certificate(const Curve& curve, const PoolState& pool, double r2,
                                         double r1, const Tolerances& tol = {});

/// Replays the two one-sided scenarios in which one buyer bids (inf, x_j) and
/// the other best-responds at its true rate: the best response must reproduce
/// the certificate's allocation.
AuditReport check_best_response_consistency(const Curve& curve, const PoolState& pool,
                                            const TrilemmaCertificate& cert,
                                            const Tolerances& tol = {});

}  // namespace ammlab
