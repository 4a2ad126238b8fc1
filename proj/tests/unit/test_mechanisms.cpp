#include <gtest/gtest.h>

#include <cmath>

#include "ammlab/mechanisms.hpp"
#include "oracles.hpp"

using namespace ammlab;

namespace {

const PoolState kPool(100.0, 100.0);
const ConstantProduct kCurve = ConstantProduct::through(kPool);
const oracle::Cp kOracle{100.0, 100.0};

Order order(OrderType t, double r, double q) { return Order{t, ExtRate::finite(r), q, std::nullopt}; }
Order buy_x(double r, double q) { return order(OrderType::BuyX, r, q); }

}  // namespace

TEST(MechanismId, Strings) {
  for (auto id : {MechanismId::Null, MechanismId::M1_IC_UP, MechanismId::M2_UP_WLE,
                  MechanismId::SingleSideUniform}) {
    EXPECT_EQ(parse_mechanism_id(to_string(id)), id);
  }
  EXPECT_FALSE(parse_mechanism_id("m3").has_value());
}

TEST(NullMechanism, LeavesEverythingUntouched) {
  const std::vector<Order> batch{buy_x(2, 1), order(OrderType::SellX, 0.5, 3), buy_x(9, 2)};
  const BatchResult r = null_mechanism(kCurve, kPool, batch, {});
  ASSERT_EQ(r.outcomes.size(), 3u);
  for (const auto& o : r.outcomes) EXPECT_EQ(o, Outcome{});
  EXPECT_EQ(r.end_pool, kPool);
  EXPECT_TRUE(null_mechanism(kCurve, kPool, {}, {}).outcomes.empty());
}

// ---------------------------------------------------------------------------
// Mechanism 1

TEST(Mechanism1, SecondPriceFloorBinds) {
  const std::vector<Order> batch{buy_x(4, 50), buy_x(2, 50)};
  const BatchResult r = mechanism1(kCurve, kPool, batch);
  EXPECT_NEAR(r.outcomes[0].dx, 50.0, 1e-9);
  EXPECT_NEAR(r.outcomes[0].dy, -100.0, 1e-9);
  EXPECT_EQ(r.outcomes[1], Outcome{});
}

TEST(Mechanism1, LoneOrderFillsToItsRate) {
  const std::vector<Order> batch{buy_x(2, 50)};
  const BatchResult r = mechanism1(kCurve, kPool, batch);
  const double x = kOracle.x_end(2.0);
  EXPECT_NEAR(r.outcomes[0].dx, x, 1e-9);
  EXPECT_NEAR(r.outcomes[0].dy, -kOracle.cost(x), 1e-9);
  EXPECT_NEAR(r.outcomes[0].dx, 29.289321881345, 1e-9);
  EXPECT_NEAR(r.outcomes[0].dy, -41.421356237310, 1e-9);
}

TEST(Mechanism1, WinnerTooSmallForFloor) {
  const std::vector<Order> batch{buy_x(4, 10), buy_x(2, 50)};
  const BatchResult r = mechanism1(kCurve, kPool, batch);
  for (const auto& o : r.outcomes) EXPECT_EQ(o, Outcome{});
  EXPECT_EQ(r.end_pool, kPool);
}

TEST(Mechanism1, IgnoresSupplySide) {
  const std::vector<Order> batch{order(OrderType::SellX, 1, 5)};
  EXPECT_EQ(mechanism1(kCurve, kPool, batch).outcomes[0], Outcome{});
}

TEST(Mechanism1, IgnoresBidsBelowMarket) {
  const std::vector<Order> batch{buy_x(0.5, 5)};
  EXPECT_EQ(mechanism1(kCurve, kPool, batch).outcomes[0], Outcome{});
}

TEST(Mechanism1, TiesGoToEarlierPosition) {
  const std::vector<Order> batch{buy_x(3, 80), buy_x(3, 80)};
  const BatchResult r = mechanism1(kCurve, kPool, batch);
  // x from r_avg = 3 is 100 - 100/3; x' from r_end = 3 is smaller, so the floor binds.
  EXPECT_NEAR(r.outcomes[0].dx, kOracle.x_avg(3.0), 1e-9);
  EXPECT_EQ(r.outcomes[1], Outcome{});
}

TEST(Mechanism1, SellYBudgetCap) {
  // Spending 25 Y at (100, 100) buys 100 - 10000/125 = 20 X.
  const std::vector<Order> batch{order(OrderType::SellY, 4, 25)};
  const BatchResult r = mechanism1(kCurve, kPool, batch);
  EXPECT_NEAR(r.outcomes[0].dx, 20.0, 1e-9);
  EXPECT_NEAR(r.outcomes[0].dy, -25.0, 1e-9);
}

TEST(Mechanism1, CappedSellYSpendsExactlyItsBudget) {
  const PoolState pool(137.25, 61.9);
  const ConstantProduct curve = ConstantProduct::through(pool);
  for (double q : {4.90099267602289, 0.1, 3.3, 17.0}) {
    const std::vector<Order> batch{order(OrderType::SellY, 50, q)};
    EXPECT_EQ(mechanism1(curve, pool, batch).outcomes[0].dy, -q);
  }
}

TEST(Mechanism1, InfiniteRunnerUpBlocksEveryone) {
  const std::vector<Order> batch{Order{OrderType::BuyX, ExtRate::infinity(), 5, std::nullopt},
                                 Order{OrderType::BuyX, ExtRate::infinity(), 5, std::nullopt}};
  for (const auto& o : mechanism1(kCurve, kPool, batch).outcomes) EXPECT_EQ(o, Outcome{});
}

TEST(Mechanism1, InfiniteWinnerTakesItsQuantity) {
  const std::vector<Order> batch{Order{OrderType::BuyX, ExtRate::infinity(), 5, std::nullopt}, buy_x(1.01, 3)};
  const BatchResult r = mechanism1(kCurve, kPool, batch);
  EXPECT_NEAR(r.outcomes[0].dx, 5.0, 1e-12);
  EXPECT_NEAR(r.outcomes[0].dy, -kOracle.cost(5.0), 1e-12);
}

// ---------------------------------------------------------------------------
// Mechanism 2 clearing

TEST(ClearingRate, TwoBuyers) {
  const std::vector<Order> demand{buy_x(2, 30), buy_x(1.5, 10)};
  const ClearingSolution s = solve_clearing_rate(kCurve, kPool, demand, {});
  EXPECT_NEAR(s.r_star, 2.0, 1e-9);
  EXPECT_EQ(s.branch, ClearingBranch::ExcessDemand);
  EXPECT_NEAR(s.delta_x, 100.0 - std::sqrt(5000.0), 1e-9);
  EXPECT_NEAR(s.p_bar, std::sqrt(2.0), 1e-9);
}

TEST(ClearingRate, BuyAgainstSell) {
  const std::vector<Order> demand{buy_x(1.2, 10)};
  const std::vector<Order> supply{order(OrderType::SellX, 0.9, 5)};
  const ClearingSolution s = solve_clearing_rate(kCurve, kPool, demand, supply);
  EXPECT_NEAR(s.r_star, 10000.0 / 9025.0, 1e-9);
  EXPECT_NEAR(s.delta_x, 5.0, 1e-9);
  EXPECT_NEAR(s.p_bar, 100.0 / 95.0, 1e-9);
}

TEST(ClearingRate, EmptyBatchClearsAtMarket) {
  const ClearingSolution s = solve_clearing_rate(kCurve, kPool, {}, {});
  EXPECT_EQ(s.r_star, 1.0);
  EXPECT_EQ(s.delta_x, 0.0);
}

TEST(ClearingRate, InfiniteDemandWithinReserve) {
  const std::vector<Order> demand{Order{OrderType::BuyX, ExtRate::infinity(), 20, std::nullopt}};
  const ClearingSolution s = solve_clearing_rate(kCurve, kPool, demand, {});
  EXPECT_NEAR(s.delta_x, 20.0, 1e-9);
  EXPECT_NEAR(s.r_star, kOracle.r_end(20.0), 1e-9);
}

TEST(ClearingRate, BranchInvariants) {
  const std::vector<Order> supply{order(OrderType::SellX, 0.5, 100)};
  const ClearingSolution s = solve_clearing_rate(kCurve, kPool, {}, supply);
  EXPECT_EQ(s.branch, ClearingBranch::ExcessSupply);
  EXPECT_LE(s.r_star, 1.0);
  EXPECT_LE(s.delta_x, 0.0);
}

TEST(PoolMove, AtMarketRate) {
  const PoolMove m = pool_move_at_rate(kCurve, kPool, 1.0);
  EXPECT_EQ(m.delta_x, 0.0);
  EXPECT_EQ(m.p_bar, 1.0);
  const PoolMove up = pool_move_at_rate(kCurve, kPool, 4.0);
  EXPECT_NEAR(up.delta_x, 50.0, 1e-12);
  EXPECT_NEAR(up.p_bar, 2.0, 1e-12);
}

TEST(SplitEligible, DiscardsWrongSide) {
  const std::vector<Order> batch{buy_x(0.5, 1), buy_x(1.0, 1), order(OrderType::SellX, 2, 1),
                                 order(OrderType::SellX, 1.0, 1), order(OrderType::BuyY, 0.8, 1),
                                 order(OrderType::SellY, 3, 1)};
  const EligibleSplit s = split_eligible(batch, 1.0);
  EXPECT_EQ(s.demand, (std::vector<std::size_t>{1, 5}));
  EXPECT_EQ(s.supply, (std::vector<std::size_t>{3, 4}));
}

// ---------------------------------------------------------------------------
// Mechanism 2 fills

TEST(Mechanism2, TwoBuyersPartialFill) {
  const std::vector<Order> batch{buy_x(2, 30), buy_x(1.5, 10)};
  const BatchResult r = mechanism2(kCurve, kPool, batch);
  const double x = kOracle.x_end(2.0);
  EXPECT_NEAR(r.outcomes[0].dx, x, 1e-9);
  EXPECT_NEAR(r.outcomes[0].dy, -kOracle.cost(x), 1e-9);
  EXPECT_EQ(r.outcomes[1], Outcome{});
  EXPECT_NEAR(r.end_pool.x(), std::sqrt(5000.0), 1e-9);
  EXPECT_NEAR(r.end_pool.y(), 10000.0 / std::sqrt(5000.0), 1e-9);
  ASSERT_TRUE(r.uniform_price.has_value());
  EXPECT_NEAR(*r.uniform_price, std::sqrt(2.0), 1e-9);
}

TEST(Mechanism2, BuyAgainstSell) {
  const std::vector<Order> batch{buy_x(1.2, 10), order(OrderType::SellX, 0.9, 5)};
  const BatchResult r = mechanism2(kCurve, kPool, batch);
  const double p = 100.0 / 95.0;
  EXPECT_NEAR(r.outcomes[0].dx, 10.0, 1e-9);
  EXPECT_NEAR(r.outcomes[0].dy, -10.0 * p, 1e-9);
  EXPECT_NEAR(r.outcomes[1].dx, -5.0, 1e-9);
  EXPECT_NEAR(r.outcomes[1].dy, 5.0 * p, 1e-9);
  EXPECT_NEAR(r.end_pool.x(), 95.0, 1e-9);
}

TEST(Mechanism2, LoneSellerPoolBuysX) {
  const std::vector<Order> batch{order(OrderType::SellX, 0.5, 100)};
  const BatchResult r = mechanism2(kCurve, kPool, batch);
  // At r = 0.5 the pool absorbs sqrt(20000) - 100 < 100 units, so the seller
  // is the marginal set and the end rate lands on its limit.
  const double sold = -r.outcomes[0].dx;
  EXPECT_NEAR(sold, std::sqrt(20000.0) - 100.0, 1e-9);
  EXPECT_NEAR(marginal_rate(kCurve, r.end_pool), 0.5, 1e-9);
  EXPECT_LT(-r.outcomes[0].dy / r.outcomes[0].dx, 1.0);
}

TEST(Mechanism2, YDenominatedOrdersConvertThroughPrice) {
  const std::vector<Order> batch{order(OrderType::SellY, 1.2, 10.0), order(OrderType::BuyY, 0.9, 5.0)};
  const BatchResult r = mechanism2(kCurve, kPool, batch);
  ASSERT_TRUE(r.uniform_price.has_value());
  const double p = *r.uniform_price;
  for (const auto& o : r.outcomes) {
    if (o.dx != 0.0) EXPECT_NEAR(-o.dy / o.dx, p, 1e-12);
  }
  EXPECT_NEAR(r.outcomes[0].dy, -10.0, 1e-9);
  EXPECT_NEAR(r.outcomes[1].dy, 5.0, 1e-9);
}

TEST(Mechanism2, MarginalSetRationedProRata) {
  // Two buyers at the same rate above what the pool can supply at that rate.
  const std::vector<Order> batch{buy_x(2, 30), buy_x(2, 10)};
  const BatchResult r = mechanism2(kCurve, kPool, batch);
  const double x = kOracle.x_end(2.0);
  EXPECT_NEAR(r.outcomes[0].dx, x * 0.75, 1e-9);
  EXPECT_NEAR(r.outcomes[1].dx, x * 0.25, 1e-9);
}

TEST(Mechanism2, InfiniteDemandBeyondReserveHasNoSolution) {
  const std::vector<Order> batch{Order{OrderType::BuyX, ExtRate::infinity(), 150, std::nullopt}};
  EXPECT_THROW(mechanism2(kCurve, kPool, batch), NoSolutionError);
}

TEST(Mechanism2, Deterministic) {
  const std::vector<Order> batch{buy_x(1.7, 12), order(OrderType::SellX, 0.6, 8), order(OrderType::SellY, 2.5, 9)};
  EXPECT_EQ(mechanism2(kCurve, kPool, batch), mechanism2(kCurve, kPool, batch));
}

// ---------------------------------------------------------------------------
// Single-side uniform clearing

TEST(SingleSideUniform, TwoBuyersMatchesMechanism2) {
  const std::vector<Order> batch{buy_x(2, 30), buy_x(1.5, 10)};
  const BatchResult a = single_side_uniform(kCurve, kPool, batch);
  const BatchResult b = mechanism2(kCurve, kPool, batch);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_NEAR(a.outcomes[i].dx, b.outcomes[i].dx, 1e-9);
    EXPECT_NEAR(a.outcomes[i].dy, b.outcomes[i].dy, 1e-9);
  }
  EXPECT_NEAR(a.outcomes[0].dx, 29.289321881345, 1e-9);
}

TEST(SingleSideUniform, LoneBuyerFullFill) {
  const std::vector<Order> batch{buy_x(5, 10)};
  const BatchResult r = single_side_uniform(kCurve, kPool, batch);
  EXPECT_NEAR(r.outcomes[0].dx, 10.0, 1e-12);
  EXPECT_NEAR(-r.outcomes[0].dy / r.outcomes[0].dx, 100.0 / 90.0, 1e-12);
  EXPECT_LT(kOracle.r_end(10.0), 5.0);
}

TEST(SingleSideUniform, EmptyBatch) {
  const BatchResult r = single_side_uniform(kCurve, kPool, {});
  EXPECT_TRUE(r.outcomes.empty());
  EXPECT_EQ(r.end_pool, kPool);
  EXPECT_EQ(r.uniform_price, 1.0);
}

TEST(SingleSideUniform, RejectsOtherTypes) {
  const std::vector<Order> batch{order(OrderType::SellY, 2, 1)};
  EXPECT_THROW(single_side_uniform(kCurve, kPool, batch), OrderTypeError);
}

TEST(SingleSideUniform, FullFillsPayLessThanTheirRate) {
  const std::vector<Order> batch{buy_x(3, 5), buy_x(2.5, 5), buy_x(1.1, 50)};
  const BatchResult r = single_side_uniform(kCurve, kPool, batch);
  const double x_star = r.outcomes[0].dx + r.outcomes[1].dx + r.outcomes[2].dx;
  const double end = kOracle.r_end(x_star);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].rate > end && r.outcomes[i].dx > 0.0) {
      EXPECT_LT(-r.outcomes[i].dy / r.outcomes[i].dx, end);
    }
  }
}
