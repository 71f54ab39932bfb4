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

#include "mnli/policy.h"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "mnli/rng.h"
#include "test_util.h"

namespace mnli {
namespace {

using testing::ClosedFormBoth;
using testing::SettingOne;
using testing::TwoProductInstance;

PolicyConfig Config(PolicyKind kind, bool explore = true) {
  PolicyConfig c;
  c.kind = kind;
  c.forced_exploration = explore;
  return c;
}

CycleOutcome Outcome(std::vector<int> choices) {
  CycleOutcome out;
  out.arrivals = static_cast<int>(choices.size());
  out.choices = std::move(choices);
  return out;
}

TEST(PolicyKindTest, NamesRoundTrip) {
  for (PolicyKind k : {PolicyKind::kProposed, PolicyKind::kVUcbOnly, PolicyKind::kGreedy}) {
    EXPECT_EQ(PolicyKindFromName(PolicyKindName(k)), k);
  }
  EXPECT_THROW(PolicyKindFromName("thompson"), std::invalid_argument);
}

TEST(PolicyTest, FirstDecisionUsesInitialBounds) {
  const Instance inst = TwoProductInstance(0.4, 0.22);
  // At v = (1,1) and inflated profits (1,1): 11/9 > 3/4.
  EXPECT_EQ(Policy(inst, Config(PolicyKind::kProposed), 1).current_decision(),
            InventoryDecision({1, 1}));
  // At v = (1,1) with the true profits: 0.7455... < 0.75.
  EXPECT_EQ(Policy(inst, Config(PolicyKind::kVUcbOnly, false), 1).current_decision(),
            InventoryDecision({1, 0}));
  EXPECT_FALSE(Policy(inst, Config(PolicyKind::kProposed), 1).exploratory());
}

TEST(PolicyTest, EpochClosesOnlyWhenEveryProductSold) {
  const Instance inst = TwoProductInstance(0.4, 0.22);
  Policy p(inst, Config(PolicyKind::kProposed), 1);
  EXPECT_FALSE(p.ObserveCycle(1, Outcome({0, 0})));
  EXPECT_EQ(p.epoch_index(), 1);
  EXPECT_EQ(p.current_decision(), InventoryDecision({1, 1}));
  EXPECT_FALSE(p.ObserveCycle(2, Outcome({1, 0})));
  EXPECT_TRUE(p.ObserveCycle(3, Outcome({0, 2})));
  EXPECT_EQ(p.epoch_index(), 2);
  EXPECT_EQ(p.estimator().epochs_closed(), 1);
  EXPECT_EQ(p.estimator().product(1).sum, 2.0);
  EXPECT_EQ(p.estimator().product(2).sum, 4.0);
  // Two products, threshold 48 log(sqrt(2) + 1) > 1: both under-explored.
  EXPECT_TRUE(p.exploratory());
  EXPECT_EQ(p.current_decision(), InventoryDecision({1, 1}));
}

TEST(PolicyTest, ExplorationDecisionTruncatesToLimits) {
  Instance inst = SettingOne();
  inst.max_assortment = 3;
  Policy p(inst, Config(PolicyKind::kProposed), 1);
  EXPECT_EQ(p.ExplorationDecision({2, 4, 5, 1}), InventoryDecision({0, 1, 0, 1, 1}));
  inst.max_assortment = 5;
  inst.total_cap = 2;
  Policy q(inst, Config(PolicyKind::kProposed), 1);
  EXPECT_EQ(q.ExplorationDecision({1, 2, 3}), InventoryDecision({1, 1, 0, 0, 0}));
}

TEST(PolicyTest, UcbOnlyWithoutExplorationIsStuck) {
  const Instance inst = TwoProductInstance(0.4, 0.22);
  const RegretTrace trace = RunPolicy(inst, Config(PolicyKind::kVUcbOnly, false), 2000, 7);
  const double gap = ClosedFormBoth(0.4, 0.22) - 0.75;
  EXPECT_NEAR(gap, 0.0017460317, 1e-10);
  EXPECT_EQ(trace.optimal_decision, InventoryDecision({1, 1}));
  for (const CycleRecord& r : trace.records) {
    ASSERT_EQ(r.decision, InventoryDecision({1, 0}));
    ASSERT_NEAR(r.cum_regret, r.cycle * gap, 1e-9);
  }
  EXPECT_GT(trace.epochs, 100);
}

TEST(PolicyTest, ProposedRegretFlattens) {
  const Instance inst = TwoProductInstance(0.4, 0.22);
  double early = 0.0, late = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const RegretTrace t = RunPolicy(inst, Config(PolicyKind::kProposed), 2000, seed);
    early += t.records[199].cum_regret;
    late += t.records[1999].cum_regret - t.records[1799].cum_regret;
  }
  // Here u* = (1,1) is also the initial and the exploration decision, so
  // both windows are typically regret-free.
  EXPECT_LE(late, early);
  EXPECT_LT(late / 200, 0.1 * (ClosedFormBoth(0.4, 0.22) - 0.75));
}

TEST(PolicyTest, CollapsedBoundsPickClairvoyantDecision) {
  const Instance inst = SettingOne();
  EstimatorState s(inst.unit_profits, inst.v_min, inst.v_max);
  std::vector<double> sums;
  std::vector<int> counts;
  for (double v : inst.attractions) {
    counts.push_back(1 << 30);
    sums.push_back(counts.back() / v);
  }
  s.Restore(sums, counts, 1 << 30);
  StaticOptimizer opt(inst.WithoutTruth(), OracleSpec::Exact());
  Rng rng(1);
  EXPECT_EQ(opt.Solve(s.VUcb(), s.RHat(), rng).decision,
            Clairvoyant::Compute(inst).decision());
}

TEST(PolicyTest, ReplayIsBitIdentical) {
  const Instance inst = SettingOne();
  for (PolicyKind k : {PolicyKind::kProposed, PolicyKind::kVUcbOnly, PolicyKind::kGreedy}) {
    const RegretTrace a = RunPolicy(inst, Config(k), 500, 11);
    const RegretTrace b = RunPolicy(inst, Config(k), 500, 11);
    std::ostringstream sa, sb;
    WriteTraceCsv(sa, a);
    WriteTraceCsv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
  }
}

TEST(PolicyTest, ExplorationRuleHolds) {
  const Instance inst = SettingOne();
  Policy p(inst, Config(PolicyKind::kProposed), 3);
  Rng sim(DeriveSeed(3, 0));
  int exploratory_epochs = 0, regular_epochs = 0;
  for (int t = 1; t <= 6000; ++t) {
    const CycleOutcome out =
        SimulateCycle(inst.attractions, inst.arrival, p.current_decision(), sim, false);
    if (!p.ObserveCycle(t, out)) continue;
    const EstimatorState& est = p.estimator();
    const double threshold = ExplorationThreshold(5, est.epochs_closed());
    if (p.exploratory()) {
      ++exploratory_epochs;
      const auto under = p.UnderExplored();
      for (int i = 1; i <= 5; ++i) {
        const int level = p.current_decision().level(i);
        ASSERT_LE(level, 1);
        if (level == 1) {
          ASSERT_NE(std::find(under.begin(), under.end(), i), under.end());
        }
      }
    } else {
      ++regular_epochs;
      for (int i = 1; i <= 5; ++i) ASSERT_GE(est.product(i).count, threshold);
    }
  }
  EXPECT_GT(exploratory_epochs, 0);
  EXPECT_GT(regular_epochs, 0);
}

TEST(PolicyTest, OptimismHoldsWheneverBoundsCover) {
  const Instance inst = SettingOne();
  const Clairvoyant star = Clairvoyant::Compute(inst);
  Policy p(inst, Config(PolicyKind::kProposed), 5);
  Rng sim(DeriveSeed(5, 0));
  int covered = 0;
  for (int t = 1; t <= 6000; ++t) {
    const CycleOutcome out =
        SimulateCycle(inst.attractions, inst.arrival, p.current_decision(), sim, false);
    if (!p.ObserveCycle(t, out) || p.exploratory()) continue;
    const EstimatorState& est = p.estimator();
    bool inside = true;
    for (int i = 1; i <= 5; ++i) {
      const auto& b = est.product(i).bounds;
      inside &= b.v_lcb <= inst.attractions[i - 1] && inst.attractions[i - 1] <= b.v_ucb;
    }
    if (!inside) continue;
    ++covered;
    ProfitQuery q;
    q.decision = p.current_decision();
    q.attractions = est.VUcb();
    q.profits = est.RHat();
    q.arrival = inst.arrival;
    ASSERT_GE(ExpectedProfitExact(q), star.value() - 1e-9);
  }
  EXPECT_GT(covered, 0);
}

TEST(PolicyTest, GreedyNeverExplores) {
  const RegretTrace t = RunPolicy(SettingOne(), Config(PolicyKind::kGreedy), 2000, 2);
  EXPECT_EQ(t.exploratory_cycles, 0);
  for (const CycleRecord& r : t.records) ASSERT_FALSE(r.exploratory);
}

TEST(PolicyTest, SingleCycleGreedyRun) {
  Instance inst;
  inst.n_products = 1;
  inst.attractions = {0.5};
  inst.v_min = 0.1;
  inst.v_max = 1.0;
  inst.unit_profits = {1.0};
  inst.per_product_caps = {3};
  inst.total_cap = 3;
  inst.max_assortment = 1;
  inst.arrival = ArrivalProcess::Poisson(2);
  const RegretTrace t = RunPolicy(inst, Config(PolicyKind::kGreedy), 1, 4);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_GE(t.final_regret, 0.0);
  EXPECT_NEAR(t.final_regret, t.optimal_value - t.records[0].expected_profit, 1e-15);
  EXPECT_EQ(t.epochs, 1);
}

TEST(PolicyTest, RegretIncrementsAreNonNegative) {
  for (PolicyKind k : {PolicyKind::kProposed, PolicyKind::kVUcbOnly, PolicyKind::kGreedy}) {
    const RegretTrace t = RunPolicy(SettingOne(), Config(k), 1500, 9);
    double prev = 0.0;
    for (const CycleRecord& r : t.records) {
      ASSERT_GE(r.cum_regret - prev, -1e-9);
      ASSERT_TRUE(IsFeasible(SettingOne(), r.decision));
      prev = r.cum_regret;
    }
  }
}

TEST(PolicyTest, GeneralCostsUseNormalizedProfit) {
  Instance inst = SettingOne();
  PolicyConfig c = Config(PolicyKind::kProposed);
  c.costs = CostStructure::FromRaw({6, 10, 10, 10, 10}, {1, 2, 3, 4, 5}, {0, 0, 0, 0, 0});
  const Clairvoyant star = Clairvoyant::Compute(inst, c.costs);
  // The clairvoyant value is R(u*) at the normalized profits minus o.u*.
  ProfitQuery q = MakeQuery(inst, star.decision());
  q.profits = c.costs->adjusted_profits();
  EXPECT_NEAR(star.value(), ExpectedProfitGeneral(q, c.costs->adjusted_order_costs()), 1e-10);
  const RegretTrace t = RunPolicy(inst, c, 300, 6);
  const auto& o = c.costs->adjusted_order_costs();
  for (const CycleRecord& r : t.records) {
    double cost = 0.0;
    for (int i = 0; i < 5; ++i) cost += o[i] * r.decision.levels()[i];
    // Realized profit can never exceed revenue from the stocked units.
    double cap = 0.0;
    for (int i = 0; i < 5; ++i) cap += c.costs->adjusted_profits()[i] * r.decision.levels()[i];
    ASSERT_LE(r.realized_profit, cap - cost + 1e-12);
    ASSERT_GE(r.realized_profit, -cost - 1e-12);
  }
  EXPECT_GE(t.final_regret, -1e-9);
}

TEST(ClairvoyantTest, Examples) {
  const Clairvoyant a = Clairvoyant::Compute(TwoProductInstance(1.0, 0.22));
  EXPECT_EQ(a.decision(), InventoryDecision({1, 0}));
  EXPECT_NEAR(a.value(), 0.75, 1e-12);
  const Clairvoyant b = Clairvoyant::Compute(TwoProductInstance(0.4, 0.22));
  EXPECT_EQ(b.decision(), InventoryDecision({1, 1}));
  EXPECT_NEAR(b.value(), 0.7517460317, 1e-9);
  Instance zero = TwoProductInstance(1.0, 0.22);
  zero.per_product_caps = {0, 0};
  zero.total_cap = 0;
  const Clairvoyant c = Clairvoyant::Compute(zero);
  EXPECT_EQ(c.decision(), InventoryDecision({0, 0}));
  EXPECT_EQ(c.value(), 0.0);
  EXPECT_THROW(a.ValueOf(InventoryDecision({2, 0})), std::invalid_argument);
}

TEST(TraceCsvTest, HeaderAndRows) {
  const RegretTrace t = RunPolicy(TwoProductInstance(0.4, 0.22),
                                  Config(PolicyKind::kProposed), 3, 1);
  std::ostringstream out;
  WriteTraceCsv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kTraceSchema);
  std::getline(in, line);
  EXPECT_EQ(line, "cycle,epoch,decision,realized_profit,expected_profit,cum_regret,exploratory");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 8), "1,1,1 1,");
  const auto j = TraceSummaryJson(t);
  EXPECT_EQ(j["cycles"], 3);
  EXPECT_EQ(j["policy"], "proposed");
}

}  // namespace
}  // namespace mnli
