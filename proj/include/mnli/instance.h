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

#ifndef MNLI_INSTANCE_H_
#define MNLI_INSTANCE_H_

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mnli/rng.h"

namespace mnli {

// Products are numbered 1..N in every public interface; 0 denotes the
// no-purchase option in choice encodings. Vectors indexed by product are
// 0-based internally (entry i-1 belongs to product i).
using Assortment = std::vector<int>;

enum class ArrivalKind { kDeterministic, kPoisson, kCustom };

// Distribution of the number of customers M_t arriving in one inventory cycle.
// Draws are i.i.d. across cycles.
class ArrivalProcess {
 public:
  static ArrivalProcess Deterministic(int customers);
  static ArrivalProcess Poisson(double mean);
  // pmf[k] = P(M_t = k). Must sum to 1 within 1e-12. The sub-Poisson tail
  // condition is not checked for custom laws.
  static ArrivalProcess Custom(std::vector<double> pmf);

  ArrivalKind kind() const { return kind_; }
  double mean() const { return mean_; }
  const std::vector<double>& pmf() const { return pmf_; }

  int Sample(Rng& rng) const;

  // P(M_t = k) for k = 0..m_max, where m_max is the smallest count whose
  // upper tail P(M_t > m_max) is below tail_epsilon. Exact for the
  // deterministic and custom kinds.
  std::vector<double> TruncatedPmf(double tail_epsilon) const;

 private:
  ArrivalProcess(ArrivalKind kind, double mean, std::vector<double> pmf)
      : kind_(kind), mean_(mean), pmf_(std::move(pmf)) {}

  ArrivalKind kind_;
  double mean_;
  std::vector<double> pmf_;  // custom kind only
};

// Order-up-to inventory levels u; the assortment is S(u) = {i : u_i > 0}.
class InventoryDecision {
 public:
  InventoryDecision() = default;
  explicit InventoryDecision(std::vector<int> levels)
      : levels_(std::move(levels)) {}
  static InventoryDecision Zero(int n_products) {
    return InventoryDecision(std::vector<int>(n_products, 0));
  }

  const std::vector<int>& levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  // 1-based product access.
  int level(int product) const { return levels_[product - 1]; }
  int total() const;
  Assortment assortment() const;
  bool empty_assortment() const { return total() == 0; }
  std::string ToString() const;  // "(2,1,0)"

  friend auto operator<=>(const InventoryDecision&,
                          const InventoryDecision&) = default;

 private:
  std::vector<int> levels_;
};

struct Instance {
  int n_products = 0;
  std::vector<double> attractions;  // true v; empty in policy-visible copies
  double v_min = 0.0;
  double v_max = 0.0;
  std::vector<double> unit_profits;
  std::vector<int> per_product_caps;
  int total_cap = 0;
  int max_assortment = 0;
  ArrivalProcess arrival = ArrivalProcess::Deterministic(1);

  // Throws std::invalid_argument naming the first violated invariant.
  void Validate() const;

  // Copy with the true attractions removed, for handing to policies.
  Instance WithoutTruth() const;
};

struct CycleOutcome {
  int arrivals = 0;
  std::vector<int> choices;  // length arrivals, values in 0..N
  std::vector<int> sales;    // per product, 0-based
  // Assortment faced by each customer; empty when path recording is off.
  std::vector<Assortment> assortment_path;

  double RealizedProfit(std::span<const double> unit_profits) const;
};

// MNL probability that a customer offered `assortment` picks `product`
// (0 = no purchase), with the outside option's attraction fixed at 1.
double ChoiceProbability(std::span<const double> attractions,
                         const Assortment& assortment, int product);
double ChoiceProbability(const Instance& instance, const Assortment& assortment,
                         int product);

bool IsFeasible(const Instance& instance, const InventoryDecision& decision);

int SampleArrivals(const Instance& instance, Rng& rng);

// Samples one customer's choice given current stock: a single uniform is
// mapped through the CDF ordered as (no purchase, product 1, ..., product N).
int SampleChoice(std::span<const double> attractions,
                 std::span<const int> stock, Rng& rng);

// One inventory cycle: draw M_t, then let customers choose sequentially from
// the products still in stock. Requires a feasible decision.
CycleOutcome SimulateCycle(const Instance& instance,
                           const InventoryDecision& decision, Rng& rng);

// Same dynamics with arbitrary attractions; no feasibility check.
CycleOutcome SimulateCycle(std::span<const double> attractions,
                           const ArrivalProcess& arrival,
                           const InventoryDecision& decision, Rng& rng,
                           bool record_path = true);

// JSON schema: n_products, attractions, v_bounds, unit_profits,
// per_product_caps, total_cap, max_assortment, arrival{kind, mean | pmf}.
Instance InstanceFromJson(const nlohmann::json& j);
nlohmann::json InstanceToJson(const Instance& instance);
nlohmann::json ArrivalToJson(const ArrivalProcess& arrival);
ArrivalProcess ArrivalFromJson(const nlohmann::json& j);

}  // namespace mnli

#endif  // MNLI_INSTANCE_H_
