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

#ifndef MNLI_STATIC_OPT_H_
#define MNLI_STATIC_OPT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "mnli/estimation.h"
#include "mnli/instance.h"
#include "mnli/profit.h"
#include "mnli/rng.h"

namespace mnli {

inline constexpr std::size_t kDefaultEnumerationBudget = 10'000'000;

// Number of feasible decisions |U|, computed without enumerating.
double CountFeasible(const Instance& instance);

// The feasible set U = {u : u_i <= c_i, sum u <= c_bar, |S(u)| <= K} in
// lexicographic order (product 1 most significant), with the transitions
// w -> w - e_i used by the shared backward recursion.
class FeasibleSet {
 public:
  // Throws ResourceLimitError when |U| exceeds the budget.
  static FeasibleSet Enumerate(const Instance& instance,
                               std::size_t budget = kDefaultEnumerationBudget);

  std::size_t size() const { return size_; }
  int n_products() const { return n_; }
  std::span<const int> levels(std::size_t index) const {
    return {levels_.data() + index * n_, static_cast<std::size_t>(n_)};
  }
  InventoryDecision decision(std::size_t index) const;
  std::optional<std::size_t> IndexOf(const InventoryDecision& decision) const;
  // Index of w - e_product for the state at `index` (product is 1-based), or
  // -1 when that coordinate is zero.
  std::int64_t Predecessor(std::size_t index, int product) const {
    return pred_[index * n_ + product - 1];
  }

 private:
  int n_ = 0;
  std::size_t size_ = 0;
  std::vector<int> levels_;
  std::vector<std::int64_t> pred_;
};

std::vector<InventoryDecision> EnumerateFeasible(
    const Instance& instance, std::size_t budget = kDefaultEnumerationBudget);

// R(u; v, r) for every u in the set, indexed like the set.
std::vector<double> ProfitTable(const FeasibleSet& set,
                                std::span<const double> attractions,
                                std::span<const double> profits,
                                const ArrivalProcess& arrival,
                                double tail_epsilon = kDefaultTailEpsilon);

// First index attaining the maximum; later entries must beat the incumbent by
// more than kTieMargin, which keeps the lexicographically smallest maximizer.
inline constexpr double kTieMargin = 1e-12;
std::size_t ArgmaxFirst(std::span<const double> values);

struct Solution {
  InventoryDecision decision;
  double value = 0.0;
  std::size_t evaluations = 0;
};

// argmax over U of R(u; v, r), or of R(u; v, r) - o.u when order costs are
// given. Ties go to the lexicographically smallest decision.
Solution SolveExact(const Instance& instance, std::span<const double> attractions,
                    std::span<const double> profits,
                    std::optional<std::span<const double>> order_costs = std::nullopt,
                    double tail_epsilon = kDefaultTailEpsilon);
Solution SolveExact(const FeasibleSet& set, const Instance& instance,
                    std::span<const double> attractions,
                    std::span<const double> profits,
                    std::optional<std::span<const double>> order_costs = std::nullopt,
                    double tail_epsilon = kDefaultTailEpsilon);

enum class OracleKind { kExact, kApproximate };

struct OracleSpec {
  OracleKind kind = OracleKind::kExact;
  double epsilon = 0.0;
  double delta = 0.0;
  // Approximate kind: number of candidate evaluations, each scored by the
  // Monte Carlo mean of samples_per_candidate simulated cycles.
  int budget = 200;
  int samples_per_candidate = 2000;

  static OracleSpec Exact() { return {}; }
  static OracleSpec Approximate(double epsilon = 0.1, double delta = 0.1) {
    OracleSpec s;
    s.kind = OracleKind::kApproximate;
    s.epsilon = epsilon;
    s.delta = delta;
    return s;
  }
  // Throws std::invalid_argument.
  void Validate() const;
};

OracleSpec OracleSpecFromJson(const nlohmann::json& j);
nlohmann::json OracleSpecToJson(const OracleSpec& spec);

// Start point of the local search: products ranked by v_i r_i, the top K
// kept, and c_bar units dealt out round-robin subject to c_i.
InventoryDecision GreedyStart(const Instance& instance, std::span<const double> attractions,
                              std::span<const double> profits);

// Exact kind delegates to SolveExact. Approximate kind runs best-improvement
// local search (one unit up or down, one unit moved, one product dropped)
// scored by Monte Carlo; value is the claimed (estimated) objective.
Solution SolveEpsDelta(const Instance& instance, std::span<const double> attractions,
                       std::span<const double> profits, const OracleSpec& spec,
                       Rng& rng,
                       std::optional<std::span<const double>> order_costs = std::nullopt);

// Oracle bound to one instance. The feasible set is built on first exact
// solve; exact results are cached by the bit patterns of (v, r).
class StaticOptimizer {
 public:
  StaticOptimizer(Instance instance, OracleSpec spec,
                  std::optional<std::vector<double>> order_costs = std::nullopt);

  Solution Solve(std::span<const double> attractions, std::span<const double> profits,
                 Rng& rng);

  const Instance& instance() const { return instance_; }
  const OracleSpec& spec() const { return spec_; }
  std::size_t cache_hits() const { return cache_hits_; }
  std::size_t solves() const { return solves_; }

 private:
  Instance instance_;
  OracleSpec spec_;
  std::optional<std::vector<double>> order_costs_;
  std::unique_ptr<FeasibleSet> set_;
  std::map<std::vector<std::uint64_t>, Solution> cache_;
  std::size_t cache_hits_ = 0;
  std::size_t solves_ = 0;
};

// Point on the path between the lower and upper confidence bounds:
// v~ = (1 - alpha) v_lcb + alpha v_ucb and r~ = min(1, r + alpha delta).
struct InterpolationPoint {
  std::vector<double> alpha;
  std::vector<double> v_of_alpha;
  std::vector<double> r_of_alpha;
};

// Throws std::invalid_argument unless alpha lies in [0,1]^N.
InterpolationPoint Interpolate(const EstimatorState& state, std::span<const double> alpha);

// Uniform draws from U via a counting recursion (no enumeration).
class FeasibleSampler {
 public:
  explicit FeasibleSampler(const Instance& instance);

  // |U|, as a double since it can be astronomically large.
  double count() const { return at(0, cap_, k_); }
  // Throws std::invalid_argument when exclude_zero leaves nothing to draw.
  InventoryDecision Sample(Rng& rng, bool exclude_zero = true) const;

 private:
  double at(int i, int c, int k) const {
    return ways_[(static_cast<std::size_t>(i) * (cap_ + 1) + c) * (k_ + 1) + k];
  }
  InventoryDecision SampleOnce(Rng& rng) const;

  int n_;
  int cap_;
  int k_;
  std::vector<int> caps_;
  // ways_[i][c][k]: completions of products i..N-1 with at most c units and
  // at most k assorted products.
  std::vector<double> ways_;
};

InventoryDecision SampleFeasibleUniform(const Instance& instance, Rng& rng,
                                        bool exclude_zero = true);

}  // namespace mnli

#endif  // MNLI_STATIC_OPT_H_
