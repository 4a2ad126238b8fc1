#include "ammlab/scenarios.hpp"

#include <cmath>
#include <string>

#include "ammlab/json_io.hpp"

namespace ammlab {

namespace {

json pair_sums(const std::vector<Outcome>& out, std::size_t a, std::size_t b) {
  const Outcome s = out[a] + out[b];
  return json{{"subset", {a, b}}, {"dx", s.dx}, {"dy", s.dy}};
}

}  // namespace

AuditReport thm31_build_and_verify(const Curve& curve, const PoolState& pool, double q, double eps,
                                   std::span<const double> sell_price_factors,
                                   const Tolerances& tol) {
  constexpr const char* kProperty = "arbitrage_counterexample";
  if (!(q > 0.0) || !(eps > 0.0)) throw ParameterError("q and eps must be positive");
  if (sell_price_factors.empty()) throw ParameterError("at least one sell price sample is required");

  const double q_sell = q;
  const double q_buy = 2.0 * q + 3.0 * eps;
  const double net = q_buy - q_sell;
  if (!(net < pool.x())) throw ParameterError("net withdrawal exceeds the X reserve");

  const double r_star = end_rate(curve, pool, net);
  const double pool_dy = y_of_x(curve, pool.x() - net) - pool.y();

  bool all_ok = true;
  json samples = json::array();
  for (double factor : sell_price_factors) {
    if (!(factor >= 1.0)) throw ParameterError("sell price factors must be >= 1");
    const double p_sell = factor * r_star;
    const double p_buy = (pool_dy + p_sell * q_sell) / q_buy;
    const double eps_bound = (p_sell - p_buy) * q_sell / (2.0 * p_buy);
    if (!(eps < eps_bound)) {
      throw ParameterError("eps = " + std::to_string(eps) + " is not below the bound " +
                           std::to_string(eps_bound) + " at sell price " + std::to_string(p_sell));
    }

    BatchResult result{{{q + eps, -p_buy * (q + eps)},
                        {q + 2.0 * eps, -p_buy * (q + 2.0 * eps)},
                        {-q_sell, p_sell * q_sell}},
                       pool,
                       std::nullopt};
    result.end_pool = apply_net_flow(curve, pool, net, -pool_dy, tol);

    const AuditReport arb = find_arbitrage_subset(result, tol);
    const json pairs = {pair_sums(result.outcomes, 0, 2), pair_sums(result.outcomes, 1, 2)};
    bool pair_ok = false;
    for (const json& p : pairs) {
      if (p["dx"].get<double>() > tol.tol_audit && p["dy"].get<double>() > tol.tol_audit) pair_ok = true;
    }
    const bool ok = p_buy < p_sell && !arb.passed && pair_ok;
    all_ok = all_ok && ok;
    samples.push_back(json{{"p_sell", p_sell},
                           {"p_buy", p_buy},
                           {"eps_bound", eps_bound},
                           {"outcomes", to_json(result)["outcomes"]},
                           {"arbitrage", to_json(arb)},
                           {"pairs", pairs},
                           {"verified", ok}});
  }

  json witness{{"q", q}, {"eps", eps}, {"q_buy", q_buy}, {"q_sell", q_sell}, {"r_star", r_star},
               {"pool_dy", pool_dy}, {"samples", samples}};
  return all_ok ? AuditReport::pass(kProperty, std::move(witness))
                : AuditReport::fail(kProperty, std::move(witness));
}

std::vector<double> even_samples(double q_s, int n) {
  if (n < 1) throw ParameterError("sample count must be at least 1");
  std::vector<double> xs;
  for (int k = 1; k <= n; ++k) xs.push_back(q_s * k / n);
  return xs;
}

AuditReport thm32_build_and_verify(const Curve& curve, const PoolState& pool, double q_b,
                                   double eps, double q_s, std::span<const double> x_s_samples,
                                   const Tolerances& tol) {
  constexpr const char* kProperty = "efficiency_counterexample";
  if (!(q_b > 0.0) || !(q_b < pool.x())) throw ParameterError("q_b must lie in (0, X0)");
  if (!(q_s > 0.0) || !(q_s < q_b)) throw ParameterError("q_s must lie in (0, q_b)");
  const double end_b = end_rate(curve, pool, q_b);
  const double avg_b = avg_buy_rate(curve, pool, q_b);
  if (!(eps > 0.0) || !(eps < end_b - avg_b)) {
    throw ParameterError("eps must lie in (0, " + std::to_string(end_b - avg_b) + ")");
  }
  const double r_s = end_b - eps;
  const std::vector<Order> batch{{OrderType::BuyX, ExtRate::infinity(), q_b, std::nullopt},
                                 {OrderType::SellX, ExtRate::finite(r_s), q_s, std::nullopt}};

  // Case 1: the seller stays idle and the pool alone fills the buyer.
  const double pool_dy = y_of_x(curve, pool.x() - q_b) - pool.y();
  BatchResult idle{{{q_b, -pool_dy}, {0.0, 0.0}}, pool, std::nullopt};
  idle.end_pool = apply_net_flow(curve, pool, q_b, -pool_dy, tol);
  const AuditReport le = check_local_efficiency(curve, pool, batch, idle, false, tol);
  const bool case1_ok = !le.passed;
  json case1{{"end_rate", marginal_rate(curve, idle.end_pool)}, {"report", to_json(le)},
             {"verified", case1_ok}};

  // Case 2: the seller fills x_s and everyone trades at the uniform price.
  bool case2_ok = !x_s_samples.empty();
  json case2 = json::array();
  for (double x_s : x_s_samples) {
    if (!(x_s > 0.0) || !(x_s <= q_s)) throw ParameterError("x_s samples must lie in (0, q_s]");
    const double net = q_b - x_s;
    const double dy = y_of_x(curve, pool.x() - net) - pool.y();
    const double p_bar = dy / net;
    BatchResult shared{{{q_b, -p_bar * q_b}, {-x_s, p_bar * x_s}}, pool, p_bar};
    shared.end_pool = apply_net_flow(curve, pool, net, -dy, tol);
    const AuditReport wf = check_well_formed(curve, pool, batch, shared, tol);
    const bool ok = !wf.passed && wf.witness.value("clause", "") == "individual_rationality" &&
                    wf.witness.value("order", -1) == 1 && p_bar < r_s;
    case2_ok = case2_ok && ok;
    case2.push_back(json{{"x_s", x_s}, {"p_bar", p_bar}, {"report", to_json(wf)}, {"verified", ok}});
  }

  json witness{{"q_b", q_b}, {"eps", eps}, {"q_s", q_s}, {"r_s", r_s},
               {"case1", case1}, {"case2", case2}};
  return case1_ok && case2_ok ? AuditReport::pass(kProperty, std::move(witness))
                              : AuditReport::fail(kProperty, std::move(witness));
}

double trilemma_r2_star(const Curve& curve, const PoolState& pool, double r2) {
  return end_rate(curve, pool, x_for_avg_rate(curve, pool, r2));
}

TrilemmaCertificate trilemma_certificate(const Curve& curve, const PoolState& pool, double r2,
                                         double r1, const Tolerances& tol) {
  const double r0 = marginal_rate(curve, pool);
  if (!(r2 > r0)) throw DomainError("r2 must exceed the market rate");

  TrilemmaCertificate c;
  c.r1 = r1;
  c.r2 = r2;
  c.delta_x = x_for_avg_rate(curve, pool, r2);
  c.delta_y = y_of_x(curve, pool.x() - c.delta_x) - pool.y();
  c.r2_star = end_rate(curve, pool, c.delta_x);
  if (!(r1 > r2) || !(r1 < c.r2_star)) {
    throw DomainError("r1 must lie in (r2, r2*) = (" + std::to_string(r2) + ", " +
                      std::to_string(c.r2_star) + ")");
  }

  const auto total_rate = [&](double x) { return end_rate(curve, pool, x) + avg_buy_rate(curve, pool, x); };
  c.x_tot = bisect_monotone(total_rate, 0.0, c.delta_x, r1 + r2, tol);
  const double r_avg = avg_buy_rate(curve, pool, c.x_tot);
  const double r_end = end_rate(curve, pool, c.x_tot);
  c.x1 = c.x_tot * (r1 - r_avg) / (r_end - r_avg);
  c.x2 = c.x_tot - c.x1;
  c.u1_truthful = c.x1 * (r1 - r_avg);
  c.u1_deviate = c.delta_x * (r1 - r2);
  c.gap = c.u1_deviate - c.u1_truthful;

  const double g1 = uniform_payment_gradient(curve, pool, c.x1, c.x2);
  const double g2 = uniform_payment_gradient(curve, pool, c.x2, c.x1);
  const double eps = tol.tol_audit;
  if (!(std::abs(g1 - r1) <= eps) || !(std::abs(g2 - r2) <= eps)) {
    throw VerificationError("first-order conditions fail at (x1, x2): partials " + std::to_string(g1) +
                            ", " + std::to_string(g2));
  }
  if (!(c.x1 > 0.0) || !(c.x2 > 0.0) || !(c.x_tot < c.delta_x) || !(r_end > r1)) {
    throw VerificationError("certificate allocation is outside the predicted region");
  }
  return c;
}

AuditReport check_best_response_consistency(const Curve& curve, const PoolState& pool,
                                            const TrilemmaCertificate& cert,
                                            const Tolerances& tol) {
  constexpr const char* kProperty = "best_response_consistency";
  const double guard = tol.tol_root * pool.x();

  // Volume a at which the player's marginal payment under the uniform price
  // equals its rate, given the other player's fixed volume.
  const auto best_response = [&](double rate, double other) {
    const auto marginal = [&](double a) { return uniform_payment_gradient(curve, pool, a, other); };
    return bisect_monotone(marginal, 0.0, pool.x() - other - guard, rate, tol);
  };
  const double a1 = best_response(cert.r1, cert.x2);
  const double a2 = best_response(cert.r2, cert.x1);
  const double scale = tol.tol_audit * std::max(1.0, cert.x_tot);
  const bool ok = std::abs(a1 - cert.x1) <= scale && std::abs(a2 - cert.x2) <= scale;
  json detail{{"x1", cert.x1}, {"x2", cert.x2}, {"best_response_1", a1}, {"best_response_2", a2}};
  return ok ? AuditReport::pass(kProperty, std::move(detail))
            : AuditReport::fail(kProperty, std::move(detail));
}

}  // namespace ammlab
