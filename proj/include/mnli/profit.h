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

#ifndef MNLI_PROFIT_H_
#define MNLI_PROFIT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "mnli/instance.h"
#include "mnli/rng.h"

namespace mnli {

// Inputs of the one-cycle expected profit R(u; v, r). The attractions may be
// the truth, confidence bounds, or any interpolated point.
struct ProfitQuery {
  InventoryDecision decision;
  std::vector<double> attractions;
  std::vector<double> profits;
  ArrivalProcess arrival = ArrivalProcess::Deterministic(1);
};

// Query at the instance's true parameters.
ProfitQuery MakeQuery(const Instance& instance, const InventoryDecision& decision);

inline constexpr double kDefaultTailEpsilon = 1e-10;
inline constexpr std::size_t kDefaultStateBudget = 1'000'000;

struct EvalOptions {
  // Arrival counts are truncated where the upper tail drops below this; the
  // resulting bias is at most tail_epsilon * sum(u).
  double tail_epsilon = kDefaultTailEpsilon;
  // Cap on prod_i (u_i + 1), the number of remaining-inventory states.
  std::size_t state_budget = kDefaultStateBudget;
};

// Exact E[sum_i r_i X_i] by backward recursion over remaining inventory.
// Throws ResourceLimitError when the state count exceeds the budget.
double ExpectedProfitExact(const ProfitQuery& query, const EvalOptions& options = {});

// Expected sales E[X_i] per product (0-based), computed in the same pass.
struct SalesEvaluation {
  double value = 0.0;
  std::vector<double> expected_sales;
};
SalesEvaluation EvaluateWithSales(const ProfitQuery& query,
                                  const EvalOptions& options = {});

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Sample mean and standard error of realized profit over n_samples cycles.
McEstimate ExpectedProfitMc(const ProfitQuery& query, int n_samples, Rng& rng);

// Selling prices r', ordering costs o' and salvage values s' normalized by
// a4 = max_j (r'_j - s'_j): r_i = (r'_i - s'_i)/a4, o_i = (o'_i - s'_i)/a4.
class CostStructure {
 public:
  // Throws std::invalid_argument unless s' <= o' <= r' and a4 > 0.
  static CostStructure FromRaw(std::vector<double> selling_prices,
                               std::vector<double> ordering_costs,
                               std::vector<double> salvage_values);

  const std::vector<double>& selling_prices() const { return selling_prices_; }
  const std::vector<double>& ordering_costs() const { return ordering_costs_; }
  const std::vector<double>& salvage_values() const { return salvage_values_; }
  double normalizer() const { return normalizer_; }
  const std::vector<double>& adjusted_profits() const { return adjusted_profits_; }
  const std::vector<double>& adjusted_order_costs() const { return adjusted_order_costs_; }

 private:
  std::vector<double> selling_prices_;
  std::vector<double> ordering_costs_;
  std::vector<double> salvage_values_;
  double normalizer_ = 1.0;
  std::vector<double> adjusted_profits_;
  std::vector<double> adjusted_order_costs_;
};

// Normalized profit Pi(u; v, r, o) = sum_i (r_i E[X_i] - o_i u_i), with r taken
// from query.profits and o from order_costs.
double ExpectedProfitGeneral(const ProfitQuery& query,
                             std::span<const double> order_costs,
                             const EvalOptions& options = {});

// Unnormalized Pi'(u) = sum_i ((r'_i - s'_i) E[X_i] - (o'_i - s'_i) u_i) from
// the raw prices; equals normalizer() * Pi. query.profits is ignored.
double ExpectedProfitRaw(const ProfitQuery& query, const CostStructure& costs,
                         const EvalOptions& options = {});

}  // namespace mnli

#endif  // MNLI_PROFIT_H_
