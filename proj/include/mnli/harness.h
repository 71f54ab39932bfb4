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

#ifndef MNLI_HARNESS_H_
#define MNLI_HARNESS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mnli/estimation.h"
#include "mnli/instance.h"
#include "mnli/policy.h"
#include "mnli/reduction.h"

namespace mnli {

enum class EstimatorKind { kProposed, kFirstCustomer, kUntilNoPurchase, kCensorAware };
std::string EstimatorKindName(EstimatorKind kind);
EstimatorKind EstimatorKindFromName(const std::string& name);

struct EstimatorBenchConfig {
  std::vector<EstimatorKind> estimators = {EstimatorKind::kProposed,
                                           EstimatorKind::kFirstCustomer,
                                           EstimatorKind::kUntilNoPurchase,
                                           EstimatorKind::kCensorAware};
  // When set, each replication draws v_i uniformly on [low, high] instead of
  // using the instance's attractions.
  std::optional<std::pair<double, double>> random_attractions;
  // Estimate reported for products without data; v_max per product if unset.
  std::optional<std::vector<double>> initial_estimate;
};

struct ExperimentConfig {
  std::string mode = "regret";  // regret | estimator-benchmark | reduction-audit |
                                // evaluate | optimize
  Instance instance;
  std::vector<PolicyConfig> policies;
  int horizon = 1;
  int replications = 1;
  std::uint64_t base_seed = 0;
  std::string outputs;
  int threads = 1;
  EstimatorBenchConfig bench;
  nlohmann::json raw;  // full document, for evaluate / optimize payloads
};

// Throws ConfigError naming the offending field.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);
ExperimentConfig LoadExperimentConfig(const std::string& path);

// Runs body(i) for i in [0, count) on up to `threads` workers. Exceptions
// are rethrown on the caller's thread (lowest index first).
void ParallelFor(int count, int threads, const std::function<void(int)>& body);

struct PolicySummary {
  PolicyKind kind = PolicyKind::kProposed;
  std::vector<RegretTrace> runs;           // replication order
  std::vector<double> mean_cum_regret;     // per cycle
  double final_regret_mean = 0.0;
  double final_regret_std = 0.0;
  std::vector<std::string> aborted;        // reasons, one per failed run
};

struct ExperimentResult {
  InventoryDecision optimal_decision;
  double optimal_value = 0.0;
  std::vector<PolicySummary> policies;
};

// Each policy x replication uses seed base_seed + replication. When
// config.outputs is non-empty, writes trace_<policy>_rep<k>.csv,
// mean_regret_<policy>.csv and summary.json there.
ExperimentResult RunExperiment(const ExperimentConfig& config);

// Mean per-cycle regret over cycles [from, to) (0-based), averaged over runs.
double MeanPerCycleRegret(const PolicySummary& summary, int from, int to);

struct EstimatorCurve {
  EstimatorKind kind = EstimatorKind::kProposed;
  // mean_error[t]: Euclidean error after t cycles (t = 0 is before any data).
  std::vector<double> mean_error;
};

// Random-decision data policy: each epoch (as defined by the estimator being
// fed) stocks a decision drawn uniformly from the nonzero feasible ones.
// Errors are averaged over replications. Writes estimator_errors.csv when
// config.outputs is non-empty.
std::vector<EstimatorCurve> RunEstimatorBenchmark(const ExperimentConfig& config);

struct ReductionAuditRun {
  std::uint64_t seed = 0;
  bool realized_equal = false;
  double mnli_realized_total = 0.0;
  double mnl_realized_total = 0.0;
  double mnli_expected_regret = 0.0;
  double mnl_expected_regret = 0.0;
  bool nesting_holds = false;
};

// One reduction per replication for the first configured policy. Writes
// paired_rep<k>.csv and reduction_summary.json when outputs is set.
std::vector<ReductionAuditRun> RunReductionAudit(const ExperimentConfig& config);

// JSON passthroughs. evaluate: {instance, decision, attractions?, profits?,
// costs?, method? (auto|exact|mc), samples?, tail_epsilon?, seed?}.
// optimize: {instance, attractions?, profits?, order_costs?, oracle?, seed?}.
nlohmann::json EvaluateRequest(const nlohmann::json& request);
nlohmann::json OptimizeRequest(const nlohmann::json& request);

// Writes text to dir/name, creating dir. Throws std::runtime_error with the
// path on failure.
void WriteTextFile(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace mnli

#endif  // MNLI_HARNESS_H_
