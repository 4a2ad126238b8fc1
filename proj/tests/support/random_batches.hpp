#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ammlab/amm_core.hpp"
#include "ammlab/orders.hpp"

namespace testsupport {

struct RandomCase {
  ammlab::PoolState pool;
  std::vector<ammlab::Order> batch;
};

inline ammlab::OrderType random_type(std::mt19937_64& rng) {
  static constexpr ammlab::OrderType kTypes[] = {ammlab::OrderType::BuyX, ammlab::OrderType::BuyY,
                                                 ammlab::OrderType::SellX, ammlab::OrderType::SellY};
  return kTypes[std::uniform_int_distribution<int>(0, 3)(rng)];
}

// Pool reserves in [50, 200]; up to max_n orders with rates in [0.1, 10]
// times r0 and quantities in (0, 40].
inline RandomCase random_case(std::mt19937_64& rng, int max_n, bool buy_x_only = false) {
  std::uniform_real_distribution<double> reserve(50.0, 200.0);
  std::uniform_real_distribution<double> log_rate(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> qty(0.0, 40.0);
  std::uniform_int_distribution<int> count(0, max_n);
  ammlab::PoolState pool(reserve(rng), reserve(rng));
  const double r0 = pool.y() / pool.x();
  RandomCase c{pool, {}};
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    ammlab::Order o;
    o.type = buy_x_only ? ammlab::OrderType::BuyX : random_type(rng);
    o.rate = ammlab::ExtRate::finite(r0 * std::exp(log_rate(rng)));
    double q = qty(rng);
    while (q == 0.0) q = qty(rng);
    o.qty = q;
    c.batch.push_back(o);
  }
  return c;
}

}  // namespace testsupport
