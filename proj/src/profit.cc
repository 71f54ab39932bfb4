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

#include "mnli/profit.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mnli/errors.h"

namespace mnli {
namespace {

// Remaining-inventory states w <= u over the assorted products, encoded in
// mixed radix prod (u_i + 1). Products outside S(u) never change state and
// are dropped.
struct StateSpace {
  std::vector<int> products;  // 0-based indices of assorted products
  std::vector<int> radix;     // u_i + 1
  std::vector<std::size_t> stride;
  std::size_t size = 1;
  std::vector<double> inv_denominator;  // 1 / (1 + sum_{j in S(w)} v_j)
};

StateSpace BuildStateSpace(const ProfitQuery& query, const EvalOptions& options) {
  const auto& levels = query.decision.levels();
  if (levels.size() != query.attractions.size() ||
      levels.size() != query.profits.size()) {
    throw std::invalid_argument("profit query vectors differ in length");
  }
  StateSpace space;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 0) throw std::invalid_argument("negative inventory level");
    if (levels[i] == 0) continue;
    space.products.push_back(static_cast<int>(i));
    space.radix.push_back(levels[i] + 1);
    space.stride.push_back(space.size);
    const auto r = static_cast<std::size_t>(levels[i] + 1);
    if (space.size > options.state_budget / r) {
      throw ResourceLimitError("expected_profit_exact: inventory state space exceeds budget",
                               options.state_budget);
    }
    space.size *= r;
  }
  if (space.size > options.state_budget) {
    throw ResourceLimitError("expected_profit_exact: inventory state space exceeds budget",
                             options.state_budget);
  }
  space.inv_denominator.resize(space.size);
  std::vector<int> digit(space.products.size(), 0);
  for (std::size_t s = 0; s < space.size; ++s) {
    double denom = 1.0;
    for (std::size_t j = 0; j < digit.size(); ++j) {
      if (digit[j] > 0) denom += query.attractions[space.products[j]];
    }
    space.inv_denominator[s] = 1.0 / denom;
    for (std::size_t j = 0; j < digit.size(); ++j) {
      if (++digit[j] < space.radix[j]) break;
      digit[j] = 0;
    }
  }
  return space;
}

}  // namespace

ProfitQuery MakeQuery(const Instance& instance, const InventoryDecision& decision) {
  return ProfitQuery{decision, instance.attractions, instance.unit_profits,
                     instance.arrival};
}

double ExpectedProfitExact(const ProfitQuery& query, const EvalOptions& options) {
  if (!(options.tail_epsilon > 0.0)) {
    throw std::invalid_argument("tail_epsilon must be positive");
  }
  const StateSpace space = BuildStateSpace(query, options);
  const std::size_t n_assorted = space.products.size();
  if (n_assorted == 0) return 0.0;
  const std::vector<double> pmf = query.arrival.TruncatedPmf(options.tail_epsilon);

  std::vector<double> weight(n_assorted);
  std::vector<double> reward(n_assorted);
  for (std::size_t j = 0; j < n_assorted; ++j) {
    weight[j] = query.attractions[space.products[j]];
    reward[j] = query.profits[space.products[j]];
  }

  // prev holds V(., k-1); V(., 0) = 0.
  std::vector<double> prev(space.size, 0.0);
  std::vector<double> cur(space.size, 0.0);
  std::vector<int> digit(n_assorted);
  const std::size_t top = space.size - 1;
  double value = 0.0;
  for (std::size_t k = 1; k < pmf.size(); ++k) {
    std::fill(digit.begin(), digit.end(), 0);
    for (std::size_t s = 0; s < space.size; ++s) {
      const double inv = space.inv_denominator[s];
      double v = inv * prev[s];
      for (std::size_t j = 0; j < n_assorted; ++j) {
        if (digit[j] > 0) {
          v += weight[j] * inv * (reward[j] + prev[s - space.stride[j]]);
        }
      }
      cur[s] = v;
      for (std::size_t j = 0; j < n_assorted; ++j) {
        if (++digit[j] < space.radix[j]) break;
        digit[j] = 0;
      }
    }
    std::swap(prev, cur);
    value += pmf[k] * prev[top];
  }
  return value;
}

SalesEvaluation EvaluateWithSales(const ProfitQuery& query, const EvalOptions& options) {
  if (!(options.tail_epsilon > 0.0)) {
    throw std::invalid_argument("tail_epsilon must be positive");
  }
  const StateSpace space = BuildStateSpace(query, options);
  const std::size_t n_assorted = space.products.size();
  SalesEvaluation result;
  result.expected_sales.assign(query.decision.size(), 0.0);
  if (n_assorted == 0) return result;
  const std::vector<double> pmf = query.arrival.TruncatedPmf(options.tail_epsilon);

  // Row s holds E[X_j | w_s, k customers left] for each assorted j.
  const std::size_t width = n_assorted;
  std::vector<double> prev(space.size * width, 0.0);
  std::vector<double> cur(space.size * width, 0.0);
  std::vector<double> top_sales(width, 0.0);
  std::vector<int> digit(n_assorted);
  const std::size_t top = space.size - 1;
  for (std::size_t k = 1; k < pmf.size(); ++k) {
    std::fill(digit.begin(), digit.end(), 0);
    for (std::size_t s = 0; s < space.size; ++s) {
      const double inv = space.inv_denominator[s];
      double* out = &cur[s * width];
      const double* stay = &prev[s * width];
      for (std::size_t j = 0; j < width; ++j) out[j] = inv * stay[j];
      for (std::size_t i = 0; i < n_assorted; ++i) {
        if (digit[i] == 0) continue;
        const double p = query.attractions[space.products[i]] * inv;
        const double* next = &prev[(s - space.stride[i]) * width];
        for (std::size_t j = 0; j < width; ++j) out[j] += p * next[j];
        out[i] += p;
      }
      for (std::size_t j = 0; j < n_assorted; ++j) {
        if (++digit[j] < space.radix[j]) break;
        digit[j] = 0;
      }
    }
    std::swap(prev, cur);
    for (std::size_t j = 0; j < width; ++j) top_sales[j] += pmf[k] * prev[top * width + j];
  }
  for (std::size_t j = 0; j < width; ++j) {
    const int product = space.products[j];
    result.expected_sales[product] = top_sales[j];
    result.value += query.profits[product] * top_sales[j];
  }
  return result;
}

McEstimate ExpectedProfitMc(const ProfitQuery& query, int n_samples, Rng& rng) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be positive");
  if (query.decision.empty_assortment()) return {};
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  for (int n = 1; n <= n_samples; ++n) {
    const CycleOutcome out = SimulateCycle(query.attractions, query.arrival,
                                           query.decision, rng, false);
    const double x = out.RealizedProfit(query.profits);
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }
  McEstimate est;
  est.estimate = mean;
  if (n_samples > 1) {
    est.std_error = std::sqrt(m2 / (n_samples - 1) / n_samples);
  }
  return est;
}

CostStructure CostStructure::FromRaw(std::vector<double> selling_prices,
                                     std::vector<double> ordering_costs,
                                     std::vector<double> salvage_values) {
  const std::size_t n = selling_prices.size();
  if (ordering_costs.size() != n || salvage_values.size() != n || n == 0) {
    throw std::invalid_argument("cost vectors must be non-empty and equally long");
  }
  double a4 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(salvage_values[i] <= ordering_costs[i] &&
          ordering_costs[i] <= selling_prices[i])) {
      throw std::invalid_argument("costs must satisfy salvage <= ordering <= selling");
    }
    a4 = std::max(a4, selling_prices[i] - salvage_values[i]);
  }
  if (!(a4 > 0.0)) throw std::invalid_argument("max_j (r'_j - s'_j) must be positive");
  CostStructure c;
  c.normalizer_ = a4;
  c.adjusted_profits_.resize(n);
  c.adjusted_order_costs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.adjusted_profits_[i] = (selling_prices[i] - salvage_values[i]) / a4;
    c.adjusted_order_costs_[i] = (ordering_costs[i] - salvage_values[i]) / a4;
  }
  c.selling_prices_ = std::move(selling_prices);
  c.ordering_costs_ = std::move(ordering_costs);
  c.salvage_values_ = std::move(salvage_values);
  return c;
}

double ExpectedProfitGeneral(const ProfitQuery& query,
                             std::span<const double> order_costs,
                             const EvalOptions& options) {
  if (order_costs.size() != query.decision.size()) {
    throw std::invalid_argument("order_costs length differs from decision");
  }
  const SalesEvaluation eval = EvaluateWithSales(query, options);
  double value = 0.0;
  for (std::size_t i = 0; i < order_costs.size(); ++i) {
    value += query.profits[i] * eval.expected_sales[i] -
             order_costs[i] * query.decision.levels()[i];
  }
  return value;
}

double ExpectedProfitRaw(const ProfitQuery& query, const CostStructure& costs,
                         const EvalOptions& options) {
  const std::size_t n = query.decision.size();
  if (costs.selling_prices().size() != n) {
    throw std::invalid_argument("cost structure length differs from decision");
  }
  const SalesEvaluation eval = EvaluateWithSales(query, options);
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    value += (costs.selling_prices()[i] - costs.salvage_values()[i]) * eval.expected_sales[i] -
             (costs.ordering_costs()[i] - costs.salvage_values()[i]) *
                 query.decision.levels()[i];
  }
  return value;
}

}  // namespace mnli
