// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mnli/estimation.h"

#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "mnli/errors.h"
#include "mnli/rng.h"

namespace mnli {
namespace {

CycleOutcome Outcome(std::vector<int> choices) {
  CycleOutcome out;
  out.arrivals = static_cast<int>(choices.size());
  out.choices = std::move(choices);
  return out;
}

TEST(EpochRecordTest, TraceWithThreeCycles) {
  // u = (2,1,0): one no-purchase before product 1's first sale, four before
  // product 2's; the third cycle completes the epoch.
  EpochRecord rec(1, InventoryDecision({2, 1, 0}));
  rec.IngestCycle(1, Outcome({0, 1, 0}));
  EXPECT_FALSE(rec.complete());
  rec.IngestCycle(2, Outcome({0, 0, 1}));
  EXPECT_FALSE(rec.complete());
  rec.IngestCycle(3, Outcome({2}));
  EXPECT_TRUE(rec.complete());
  EXPECT_EQ(rec.no_purchase_count(1), 1);
  EXPECT_EQ(rec.no_purchase_count(2), 4);
  EXPECT_FALSE(rec.no_purchase_count(3).has_value());
  EXPECT_EQ(rec.cycles(), (std::vector<int>{1, 2, 3}));
}

TEST(EpochRecordTest, ImmediatePurchaseGivesZero) {
  EpochRecord rec(1, InventoryDecision({1}));
  rec.IngestChoice(1);
  EXPECT_EQ(rec.no_purchase_count(1), 0);
  EXPECT_TRUE(rec.complete());
}

TEST(EpochRecordTest, NoPurchasesNeverClose) {
  EpochRecord rec(1, InventoryDecision({1, 1}));
  for (int i = 0; i < 1000; ++i) rec.IngestChoice(0);
  EXPECT_FALSE(rec.complete());
  EXPECT_EQ(rec.no_purchases_so_far(), 1000);
}

TEST(EpochRecordTest, PurchaseOutsideAssortmentIsInvariantViolation) {
  EpochRecord rec(1, InventoryDecision({1, 0}));
  EXPECT_THROW(rec.IngestChoice(2), InvariantViolation);
  EXPECT_THROW(rec.IngestChoice(3), InvariantViolation);
}

TEST(ConfidenceRadiusTest, WorkedExample) {
  const double l = 48.0 * std::log(std::sqrt(4.0) * 7 + 1);
  const double expected = std::sqrt(l / 100) + l / 100;
  EXPECT_NEAR(ConfidenceRadius(1.0, 100, 4, 7), expected, 1e-12);
  EXPECT_NEAR(ConfidenceRadius(1.0, 100, 4, 7), 2.439980, 1e-6);
}

TEST(ConfidenceRadiusTest, UsesLargerOfRootAndMean) {
  const double l = 48.0 * std::log(std::sqrt(3.0) * 5 + 1) / 400;
  EXPECT_NEAR(ConfidenceRadius(4.0, 400, 3, 5), 4.0 * std::sqrt(l) + l, 1e-12);
  EXPECT_NEAR(ConfidenceRadius(0.25, 400, 3, 5), 0.5 * std::sqrt(l) + l, 1e-12);
}

TEST(ConfidenceRadiusTest, ShrinksWithData) {
  EXPECT_EQ(ConfidenceRadius(1.0, 0, 4, 7), std::numeric_limits<double>::infinity());
  EXPECT_LT(ConfidenceRadius(1.0, 10000, 4, 7), ConfidenceRadius(1.0, 100, 4, 7));
}

TEST(ExplorationThresholdTest, NaturalLog) {
  EXPECT_NEAR(ExplorationThreshold(4, 7), 48.0 * std::log(15.0), 1e-12);
  EXPECT_EQ(ExplorationThreshold(4, 0), 0.0);
}

TEST(ComputeBoundsTest, ClipsToAttractionRange) {
  // v in [0.5, 2] means mu in [0.5, 2].
  const ConfidenceBounds b = ComputeBounds(3.0, 3, 2, 1, 0.5, 2.0);
  EXPECT_DOUBLE_EQ(b.mu_bar, 1.0);
  EXPECT_GT(b.radius, 1.0);
  EXPECT_DOUBLE_EQ(b.mu_lcb, 0.5);
  EXPECT_DOUBLE_EQ(b.mu_ucb, 2.0);
  EXPECT_DOUBLE_EQ(b.v_ucb, 2.0);
  EXPECT_DOUBLE_EQ(b.v_lcb, 0.5);
  EXPECT_DOUBLE_EQ(b.delta, 3.0);
}

TEST(ComputeBoundsTest, NoDataGivesFullRange) {
  const ConfidenceBounds b = ComputeBounds(0.0, 0, 3, 4, 0.1, 1.0);
  EXPECT_DOUBLE_EQ(b.v_lcb, 0.1);
  EXPECT_DOUBLE_EQ(b.v_ucb, 1.0);
  EXPECT_TRUE(std::isinf(b.delta));
}

TEST(ComputeBoundsTest, UnclippedBoundsAreSymmetric) {
  const ConfidenceBounds b = ComputeBounds(2000.0, 1000, 2, 3, 0.01, 10.0);
  EXPECT_NEAR(b.mu_ucb - b.mu_bar, b.radius, 1e-12);
  EXPECT_NEAR(b.mu_bar - b.mu_lcb, b.radius, 1e-12);
  EXPECT_NEAR(b.v_ucb, 1.0 / b.mu_lcb, 1e-12);
  EXPECT_NEAR(b.delta, 2 * b.radius / b.mu_lcb, 1e-12);
}

TEST(EstimatorStateTest, TunedProfitExamples) {
  // mu clipped to [1, 1.2] with any data and a wide radius: delta = 0.2.
  EstimatorState a({0.6}, 1.0 / 1.2, 1.0);
  a.Restore({1.1}, {1}, 1);
  EXPECT_DOUBLE_EQ(a.product(1).bounds.mu_lcb, 1.0);
  EXPECT_NEAR(a.product(1).bounds.mu_ucb, 1.2, 1e-12);
  EXPECT_NEAR(a.TunedProfit(1), 0.8, 1e-12);
  // delta = 0.5 pushes 0.9 past the cap.
  EstimatorState b({0.9}, 1.0 / 1.5, 1.0);
  b.Restore({1.2}, {1}, 1);
  EXPECT_NEAR(b.product(1).bounds.delta, 0.5, 1e-12);
  EXPECT_EQ(b.TunedProfit(1), 1.0);
}

TEST(EstimatorStateTest, InitialStateIsMaximallyOptimistic) {
  EstimatorState s({0.3, 0.6, 1.0}, 0.1, 1.0);
  EXPECT_EQ(s.RHat(), (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(s.VUcb(), (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_EQ(s.PointEstimates(0.7), (std::vector<double>{0.7, 0.7, 0.7}));
}

TEST(EstimatorStateTest, CloseEpochAveragesHistory) {
  EstimatorState s({1.0, 1.0}, 0.01, 10.0, /*keep_history=*/true);
  const std::vector<std::vector<int>> epochs = {{0, 1, 0, 2}, {0, 0, 0, 0, 1, 2}, {0, 2, 1}};
  int index = 1;
  for (const auto& choices : epochs) {
    EpochRecord rec(index, InventoryDecision({1, 1}));
    rec.IngestCycle(index, Outcome(choices));
    s.CloseEpoch(rec);
    ++index;
  }
  EXPECT_EQ(s.product(1).history, (std::vector<int>{1, 4, 1}));
  EXPECT_DOUBLE_EQ(s.product(1).bounds.mu_bar, 2.0);
  EXPECT_EQ(s.product(1).count, 3);
  EXPECT_EQ(s.epochs_closed(), 3);
}

TEST(EstimatorStateTest, CloseEpochPreconditions) {
  EstimatorState s({1.0, 1.0}, 0.1, 1.0);
  EpochRecord open(1, InventoryDecision({1, 1}));
  open.IngestChoice(1);
  EXPECT_THROW(s.CloseEpoch(open), PreconditionError);
  EpochRecord skipped(2, InventoryDecision({1, 0}));
  skipped.IngestChoice(1);
  EXPECT_THROW(s.CloseEpoch(skipped), PreconditionError);
}

TEST(EstimatorStateTest, UnassortedProductsKeepDataButRefreshRadius) {
  EstimatorState s({1.0, 1.0}, 0.01, 10.0);
  EpochRecord first(1, InventoryDecision({1, 1}));
  first.IngestCycle(1, Outcome({0, 1, 2}));
  s.CloseEpoch(first);
  const double radius_before = s.product(2).bounds.radius;
  EpochRecord second(2, InventoryDecision({1, 0}));
  second.IngestCycle(2, Outcome({1}));
  s.CloseEpoch(second);
  EXPECT_EQ(s.product(2).count, 1);
  EXPECT_EQ(s.product(1).count, 2);
  EXPECT_GT(s.product(2).bounds.radius, radius_before);
}

TEST(EstimatorStateTest, TunedProfitStaysBetweenProfitAndOne) {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.UniformIndex(5));
    std::vector<double> r(n), sums(n);
    std::vector<int> counts(n);
    for (int i = 0; i < n; ++i) {
      r[i] = rng.Uniform();
      counts[i] = static_cast<int>(rng.UniformIndex(200));
      sums[i] = counts[i] * 3 * rng.Uniform();
    }
    EstimatorState s(r, 0.05, 2.0);
    s.Restore(sums, counts, 200 + static_cast<int>(rng.UniformIndex(100)));
    for (int i = 1; i <= n; ++i) {
      ASSERT_GE(s.TunedProfit(i), r[i - 1]);
      ASSERT_LE(s.TunedProfit(i), 1.0);
      ASSERT_LE(s.VLcb()[i - 1], s.VUcb()[i - 1]);
      ASSERT_GE(s.VLcb()[i - 1], 0.05);
      ASSERT_LE(s.VUcb()[i - 1], 2.0);
    }
  }
}

TEST(EstimatorStateTest, TraceCsvHasOneRowPerProduct) {
  EstimatorState s({0.5, 1.0}, 0.1, 1.0);
  std::ostringstream out;
  EstimatorState::WriteTraceHeader(out);
  s.WriteTraceRows(out);
  std::string line;
  std::istringstream in(out.str());
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 3);
  EXPECT_EQ(out.str().substr(0, 5), "epoch");
}

// Runs `epochs` epochs of one fixed decision and returns product 1's mu draws.
std::vector<int> SimulateStatistics(const std::vector<double>& v, const InventoryDecision& u,
                                    int customers, int epochs, std::uint64_t seed) {
  Rng rng(seed);
  const ArrivalProcess arrival = ArrivalProcess::Deterministic(customers);
  std::vector<int> out;
  for (int l = 1; l <= epochs; ++l) {
    EpochRecord rec(l, u);
    int cycle = 0;
    while (!rec.complete()) rec.IngestCycle(++cycle, SimulateCycle(v, arrival, u, rng, false));
    out.push_back(*rec.no_purchase_count(1));
  }
  return out;
}

double Mean(const std::vector<int>& xs) {
  double s = 0;
  for (int x : xs) s += x;
  return s / xs.size();
}

TEST(EstimatorLawTest, StatisticIsUnbiasedForReciprocal) {
  for (double v1 : {0.2, 1.0}) {
    const auto mu = SimulateStatistics({v1, 0.5}, InventoryDecision({3, 1}), 4, 20000, 9);
    const double var = (1 + v1) / (v1 * v1);  // Geometric on {0,1,...}
    EXPECT_NEAR(Mean(mu), 1 / v1, 4 * std::sqrt(var / mu.size()));
  }
}

TEST(EstimatorLawTest, LawDoesNotDependOnCoAssortment) {
  const std::vector<double> v = {0.5, 0.8, 1.5};
  const auto alone = SimulateStatistics(v, InventoryDecision({1, 0, 0}), 3, 20000, 21);
  const auto crowded = SimulateStatistics(v, InventoryDecision({1, 2, 1}), 3, 20000, 22);
  const double se = std::sqrt(2 * (1 + 0.5) / 0.25 / 20000);
  EXPECT_NEAR(Mean(alone), Mean(crowded), 4 * se);
}

TEST(BenchmarkEstimatorTest, SingleCustomerCyclesMakeKindsOneAndTwoAgree) {
  const std::vector<double> v = {0.6, 0.3, 0.9};
  const InventoryDecision u({2, 2, 2});
  const ArrivalProcess one = ArrivalProcess::Deterministic(1);
  BenchmarkEstimator first(BenchmarkKind::kFirstCustomer, 3);
  BenchmarkEstimator until(BenchmarkKind::kUntilNoPurchase, 3);
  Rng rng(5);
  for (int t = 0; t < 5000; ++t) {
    const CycleOutcome out = SimulateCycle(v, one, u, rng);
    EXPECT_EQ(first.ObserveCycle(u, out), until.ObserveCycle(u, out));
  }
  EXPECT_GT(first.epochs_closed(), 0);
  EXPECT_EQ(first.epochs_closed(), until.epochs_closed());
  for (int i = 1; i <= 3; ++i) {
    ASSERT_TRUE(first.Estimate(i).has_value());
    EXPECT_EQ(*first.Estimate(i), *until.Estimate(i));
  }
}

TEST(BenchmarkEstimatorTest, UncensoredCountHasMeanAttraction) {
  BenchmarkEstimator until(BenchmarkKind::kUntilNoPurchase, 1);
  const InventoryDecision u({60});
  const ArrivalProcess arrival = ArrivalProcess::Deterministic(5);
  Rng rng(8);
  while (until.epochs_closed() < 100000) {
    until.ObserveCycle(u, SimulateCycle(std::vector<double>{1.0}, arrival, u, rng));
  }
  // Purchases before the first no-purchase: Geometric with mean 1, variance 2.
  EXPECT_NEAR(*until.Estimate(1), 1.0, 3 * std::sqrt(2.0 / until.samples(1)));
}

TEST(BenchmarkEstimatorTest, CensorAwareDropsStockedOutProducts) {
  BenchmarkEstimator censor(BenchmarkKind::kCensorAware, 2);
  const InventoryDecision u({1, 0});
  // Product 1 sells to the first customer, then the second walks away.
  CycleOutcome out = Outcome({1, 0});
  out.assortment_path = {{1}, {}};
  for (int t = 0; t < 10; ++t) EXPECT_TRUE(censor.ObserveCycle(u, out));
  EXPECT_EQ(censor.epochs_closed(), 10);
  EXPECT_FALSE(censor.Estimate(1).has_value());
  EXPECT_FALSE(censor.Estimate(2).has_value());

  BenchmarkEstimator until(BenchmarkKind::kUntilNoPurchase, 2);
  until.ObserveCycle(u, out);
  EXPECT_EQ(until.Estimate(1), 1.0);
}

TEST(BenchmarkEstimatorTest, CensorAwareNeedsPath) {
  BenchmarkEstimator censor(BenchmarkKind::kCensorAware, 1);
  EXPECT_THROW(censor.ObserveCycle(InventoryDecision({1}), Outcome({0})),
               std::invalid_argument);
}

}  // namespace
}  // namespace mnli
