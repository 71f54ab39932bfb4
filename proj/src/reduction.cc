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

#include "mnli/reduction.h"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "mnli/format.h"

namespace mnli {

double MnlRevenue(std::span<const double> attractions, std::span<const double> profits,
                  const Assortment& assortment) {
  double denom = 1.0;
  double num = 0.0;
  for (int i : assortment) {
    denom += attractions[i - 1];
    num += profits[i - 1] * attractions[i - 1];
  }
  return num / denom;
}

MnlAssortmentSolution SolveMnlAssortment(std::span<const double> attractions,
                                         std::span<const double> profits, int max_size) {
  const int n = static_cast<int>(attractions.size());
  if (n > 24) throw std::invalid_argument("assortment enumeration limited to 24 products");
  MnlAssortmentSolution best;
  Assortment current;
  // Depth-first over subsets in lexicographic order of index lists.
  auto visit = [&](auto&& self, int next) -> void {
    const double value = MnlRevenue(attractions, profits, current);
    if (value > best.value + 1e-12) best = {current, value};
    if (static_cast<int>(current.size()) == max_size) return;
    for (int i = next; i <= n; ++i) {
      current.push_back(i);
      self(self, i + 1);
      current.pop_back();
    }
  };
  visit(visit, 1);
  return best;
}

double ConditionalBanditRevenue(const Instance& instance, const InventoryDecision& decision) {
  if (instance.arrival.kind() != ArrivalKind::kDeterministic) {
    throw std::invalid_argument("conditional bandit revenue needs deterministic arrivals");
  }
  const int customers = static_cast<int>(instance.arrival.mean());
  std::vector<int> products;
  std::vector<int> radix;
  std::vector<std::size_t> stride;
  std::size_t size = 1;
  for (int i = 0; i < instance.n_products; ++i) {
    if (decision.levels()[i] == 0) continue;
    products.push_back(i);
    radix.push_back(decision.levels()[i] + 1);
    stride.push_back(size);
    size *= decision.levels()[i] + 1;
  }
  const std::size_t n = products.size();
  // Per state: the assortment still in stock and its one-customer revenue.
  std::vector<Assortment> in_stock(size);
  std::vector<double> revenue(size);
  std::vector<int> digit(n, 0);
  for (std::size_t s = 0; s < size; ++s) {
    for (std::size_t j = 0; j < n; ++j) {
      if (digit[j] > 0) in_stock[s].push_back(products[j] + 1);
    }
    revenue[s] = MnlRevenue(instance.attractions, instance.unit_profits, in_stock[s]);
    for (std::size_t j = 0; j < n; ++j) {
      if (++digit[j] < radix[j]) break;
      digit[j] = 0;
    }
  }
  std::vector<double> prev(size, 0.0);
  std::vector<double> cur(size, 0.0);
  for (int k = 1; k <= customers; ++k) {
    std::fill(digit.begin(), digit.end(), 0);
    for (std::size_t s = 0; s < size; ++s) {
      double denom = 1.0;
      for (int i : in_stock[s]) denom += instance.attractions[i - 1];
      double next = prev[s] / denom;
      for (std::size_t j = 0; j < n; ++j) {
        if (digit[j] == 0) continue;
        next += instance.attractions[products[j]] / denom * prev[s - stride[j]];
      }
      cur[s] = revenue[s] + next;
      for (std::size_t j = 0; j < n; ++j) {
        if (++digit[j] < radix[j]) break;
        digit[j] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return prev[size - 1];
}

ReductionResult RunReduction(const Instance& instance, const PolicyConfig& config,
                             int horizon, std::uint64_t seed) {
  instance.Validate();
  if (instance.arrival.kind() != ArrivalKind::kDeterministic) {
    throw std::invalid_argument("reduction requires a deterministic arrival count");
  }
  if (config.costs) throw std::invalid_argument("reduction is defined for unit profits only");
  const int m = static_cast<int>(instance.arrival.mean());
  const int min_cap =
      *std::min_element(instance.per_product_caps.begin(), instance.per_product_caps.end());
  if (min_cap < m || instance.total_cap < instance.max_assortment * m) {
    throw std::invalid_argument("capacity floor violated: need min c_i >= M (" +
                                std::to_string(m) + ") and c_bar >= K M (" +
                                std::to_string(instance.max_assortment * m) + ")");
  }

  ReductionResult result;
  result.customers_per_cycle = m;
  result.mnl.reserve(static_cast<std::size_t>(horizon) * m);
  auto observer = [&](int cycle, const InventoryDecision&, const CycleOutcome& outcome) {
    double cycle_total = 0.0;
    for (int pos = 1; pos <= outcome.arrivals; ++pos) {
      BanditStep step;
      step.bandit_t = static_cast<long>(m) * (cycle - 1) + pos;
      step.cycle = cycle;
      step.position = pos;
      step.assortment = outcome.assortment_path[pos - 1];
      step.choice = outcome.choices[pos - 1];
      step.realized = step.choice > 0 ? instance.unit_profits[step.choice - 1] : 0.0;
      step.expected = MnlRevenue(instance.attractions, instance.unit_profits, step.assortment);
      if (step.choice > 0) cycle_total += step.realized;
      if (pos > 1) {
        const Assortment& before = outcome.assortment_path[pos - 2];
        if (!std::includes(before.begin(), before.end(), step.assortment.begin(),
                           step.assortment.end())) {
          result.nesting_holds = false;
        }
      }
      result.mnl.push_back(std::move(step));
    }
    result.mnl_cycle_realized.push_back(cycle_total);
    result.mnli_cycle_realized.push_back(outcome.RealizedProfit(instance.unit_profits));
  };
  result.mnli = RunPolicy(instance, config, horizon, seed, nullptr, observer);

  for (double x : result.mnli_cycle_realized) result.mnli_realized_total += x;
  for (double x : result.mnl_cycle_realized) result.mnl_realized_total += x;

  result.mnl_optimum = SolveMnlAssortment(instance.attractions, instance.unit_profits,
                                          instance.max_assortment);
  result.mnli_expected_regret = result.mnli.final_regret;
  // Conditional per-cycle expectations depend only on u_t; cache by decision.
  std::vector<std::pair<InventoryDecision, double>> cache;
  double regret = 0.0;
  for (const CycleRecord& r : result.mnli.records) {
    auto it = std::find_if(cache.begin(), cache.end(),
                           [&](const auto& e) { return e.first == r.decision; });
    if (it == cache.end()) {
      cache.emplace_back(r.decision, ConditionalBanditRevenue(instance, r.decision));
      it = cache.end() - 1;
    }
    regret += m * result.mnl_optimum.value - it->second;
  }
  result.mnl_expected_regret = regret;
  return result;
}

void WritePairedCsv(std::ostream& out, const ReductionResult& result) {
  out << kTraceSchema << '\n';
  out << "bandit_t,cycle,position,decision,assortment,choice,realized,expected\n";
  for (const BanditStep& s : result.mnl) {
    std::string assortment;
    for (std::size_t i = 0; i < s.assortment.size(); ++i) {
      if (i > 0) assortment += ' ';
      assortment += std::to_string(s.assortment[i]);
    }
    out << s.bandit_t << ',' << s.cycle << ',' << s.position << ','
        << DecisionField(result.mnli.records[s.cycle - 1].decision) << ',' << assortment
        << ',' << s.choice << ',' << FormatDouble(s.realized) << ','
        << FormatDouble(s.expected) << '\n';
  }
}

}  // namespace mnli
