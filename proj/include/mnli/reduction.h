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

#ifndef MNLI_REDUCTION_H_
#define MNLI_REDUCTION_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "mnli/instance.h"
#include "mnli/policy.h"

namespace mnli {

// Single-customer MNL expected revenue sum_{i in S} r_i v_i / (1 + sum_S v).
double MnlRevenue(std::span<const double> attractions, std::span<const double> profits,
                  const Assortment& assortment);

struct MnlAssortmentSolution {
  Assortment assortment;
  double value = 0.0;
};

// Best assortment of size at most K by enumeration; ties keep the first in
// (size, lexicographic) order.
MnlAssortmentSolution SolveMnlAssortment(std::span<const double> attractions,
                                         std::span<const double> profits, int max_size);

// E[sum_m R_mnl(S_{t,m})] over the customers of one cycle run under
// `decision`, with S_{t,m} the assortment customer m faces. Computed by its
// own recursion over remaining inventory (deterministic arrivals only).
double ConditionalBanditRevenue(const Instance& instance, const InventoryDecision& decision);

// One customer of the bandit horizon M*T paired with customer `position` of
// inventory cycle `cycle`.
struct BanditStep {
  long bandit_t = 0;  // M (cycle - 1) + position
  int cycle = 0;
  int position = 0;
  Assortment assortment;
  int choice = 0;
  double realized = 0.0;
  double expected = 0.0;  // MnlRevenue of the offered assortment
};

struct ReductionResult {
  RegretTrace mnli;
  std::vector<BanditStep> mnl;
  int customers_per_cycle = 0;
  // Per-cycle realized totals on both sides, each summed customer by customer.
  std::vector<double> mnli_cycle_realized;
  std::vector<double> mnl_cycle_realized;
  double mnli_realized_total = 0.0;
  double mnl_realized_total = 0.0;
  MnlAssortmentSolution mnl_optimum;
  // sum_t (R(u*) - R(u_t)) on the inventory side and
  // sum_t (M R_mnl(S*) - E[sum_m R_mnl(S_{t,m}) | u_t]) on the bandit side.
  double mnli_expected_regret = 0.0;
  double mnl_expected_regret = 0.0;
  bool nesting_holds = true;
};

// Runs `config` on the instance and relabels every customer as a bandit
// step. Requires deterministic arrivals M, min c_i >= M and c_bar >= K M;
// throws std::invalid_argument otherwise.
ReductionResult RunReduction(const Instance& instance, const PolicyConfig& config,
                             int horizon, std::uint64_t seed);

// Rows: bandit_t,cycle,position,decision,assortment,choice,realized,expected.
void WritePairedCsv(std::ostream& out, const ReductionResult& result);

}  // namespace mnli

#endif  // MNLI_REDUCTION_H_
