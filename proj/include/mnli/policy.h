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

#ifndef MNLI_POLICY_H_
#define MNLI_POLICY_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mnli/estimation.h"
#include "mnli/instance.h"
#include "mnli/profit.h"
#include "mnli/rng.h"
#include "mnli/static_opt.h"

namespace mnli {

enum class PolicyKind { kProposed, kVUcbOnly, kGreedy };

std::string PolicyKindName(PolicyKind kind);  // "proposed", "v_ucb_only", "greedy"
// Throws std::invalid_argument for unknown names.
PolicyKind PolicyKindFromName(const std::string& name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kProposed;
  OracleSpec oracle;
  // Proposed and v_ucb_only only; greedy never explores.
  bool forced_exploration = true;
  // General-cost variant: the oracle maximizes r.E[X] - o.u with the
  // normalized profits and ordering costs, and those replace the instance's
  // unit profits.
  std::optional<CostStructure> costs;
  // Greedy's attraction estimate for products without data; v_max if unset.
  std::optional<std::vector<double>> greedy_prior;
  bool keep_history = false;
};

// Online joint assortment-inventory policy. Sees the instance without its
// true attractions; all decisions come from closed epochs and the seed.
class Policy {
 public:
  Policy(const Instance& instance, PolicyConfig config, std::uint64_t seed);

  const InventoryDecision& current_decision() const { return decision_; }
  // Feeds the outcome of one cycle run under current_decision(). Returns true
  // when the cycle closed the epoch, in which case the next decision is ready.
  bool ObserveCycle(int cycle_index, const CycleOutcome& outcome);

  int epoch_index() const { return record_.epoch_index(); }
  bool exploratory() const { return exploratory_; }
  const EstimatorState& estimator() const { return estimator_; }
  const EpochRecord& current_epoch() const { return record_; }
  const PolicyConfig& config() const { return config_; }
  // Profits the policy optimizes with (normalized ones under general costs).
  const std::vector<double>& profits() const { return estimator_.unit_profits(); }

  // Products with T_i below the exploration threshold at the current count
  // of closed epochs (1-based, products with c_i = 0 excluded).
  std::vector<int> UnderExplored() const;
  // u_i = 1 on the given products in index order, truncated to K and c_bar.
  InventoryDecision ExplorationDecision(const std::vector<int>& products) const;

 private:
  InventoryDecision NextDecision();

  Instance instance_;
  PolicyConfig config_;
  std::unique_ptr<StaticOptimizer> optimizer_;
  Rng oracle_rng_;
  EstimatorState estimator_;
  InventoryDecision decision_;
  EpochRecord record_;
  bool exploratory_ = false;
};

struct CycleRecord {
  int cycle = 0;
  int epoch = 0;
  InventoryDecision decision;
  double realized_profit = 0.0;
  double expected_profit = 0.0;
  double cum_regret = 0.0;
  bool exploratory = false;
};

struct RegretTrace {
  PolicyKind kind = PolicyKind::kProposed;
  std::vector<CycleRecord> records;
  InventoryDecision optimal_decision;
  double optimal_value = 0.0;
  int epochs = 0;  // L, including a final partial epoch
  int exploratory_cycles = 0;
  double final_regret = 0.0;
};

// Truth-side expected objective of every feasible decision, with the
// clairvoyant optimum. Objective is R(u; v, r), or the normalized general
// profit when costs are given.
class Clairvoyant {
 public:
  static Clairvoyant Compute(const Instance& instance,
                             const std::optional<CostStructure>& costs = std::nullopt);

  const InventoryDecision& decision() const { return decision_; }
  double value() const { return value_; }
  // Throws std::invalid_argument for infeasible decisions.
  double ValueOf(const InventoryDecision& decision) const;
  const FeasibleSet& feasible_set() const { return *set_; }

 private:
  std::shared_ptr<const FeasibleSet> set_;
  std::vector<double> values_;
  InventoryDecision decision_;
  double value_ = 0.0;
};

using CycleObserver =
    std::function<void(int cycle, const InventoryDecision&, const CycleOutcome&)>;

// Simulates `horizon` cycles. Simulation and oracle randomness come from
// independent streams derived from `seed`. `clairvoyant` may be shared
// across runs of the same instance; it is computed when null.
RegretTrace RunPolicy(const Instance& instance, const PolicyConfig& config, int horizon,
                      std::uint64_t seed, const Clairvoyant* clairvoyant = nullptr,
                      const CycleObserver& observer = {});

inline constexpr const char* kTraceSchema = "# mnli-trace v1";

// Header line, then cycle,epoch,decision,realized_profit,expected_profit,
// cum_regret,exploratory. Decisions are written as space-separated levels.
void WriteTraceCsv(std::ostream& out, const RegretTrace& trace);
nlohmann::json TraceSummaryJson(const RegretTrace& trace);
std::string DecisionField(const InventoryDecision& decision);

}  // namespace mnli

#endif  // MNLI_POLICY_H_
