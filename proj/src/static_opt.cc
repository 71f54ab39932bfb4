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

#include "mnli/static_opt.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mnli/errors.h"

namespace mnli {
namespace {

void EnumerateInto(const Instance& instance, int i, int cap, int k,
                   std::vector<int>& current, std::vector<int>& out) {
  if (i == instance.n_products) {
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  const int top = k > 0 ? std::min(instance.per_product_caps[i], cap) : 0;
  for (int l = 0; l <= top; ++l) {
    current[i] = l;
    EnumerateInto(instance, i + 1, cap - l, l > 0 ? k - 1 : k, current, out);
  }
  current[i] = 0;
}

std::vector<std::uint64_t> CacheKey(std::span<const double> v, std::span<const double> r) {
  std::vector<std::uint64_t> key;
  key.reserve(v.size() + r.size());
  for (double x : v) key.push_back(std::bit_cast<std::uint64_t>(x));
  for (double x : r) key.push_back(std::bit_cast<std::uint64_t>(x));
  return key;
}

void CheckLengths(const Instance& instance, std::span<const double> v,
                  std::span<const double> r,
                  std::optional<std::span<const double>> order_costs) {
  const auto n = static_cast<std::size_t>(instance.n_products);
  if (v.size() != n || r.size() != n || (order_costs && order_costs->size() != n)) {
    throw std::invalid_argument("parameter vectors must have one entry per product");
  }
}

}  // namespace

FeasibleSampler::FeasibleSampler(const Instance& instance)
    : n_(instance.n_products),
      cap_(std::max(instance.total_cap, 0)),
      k_(std::max(std::min(instance.max_assortment, instance.n_products), 0)),
      caps_(instance.per_product_caps),
      ways_(static_cast<std::size_t>(n_ + 1) * (cap_ + 1) * (k_ + 1), 0.0) {
  auto slot = [&](int i, int c, int k) -> double& {
    return ways_[(static_cast<std::size_t>(i) * (cap_ + 1) + c) * (k_ + 1) + k];
  };
  for (int c = 0; c <= cap_; ++c) {
    for (int k = 0; k <= k_; ++k) slot(n_, c, k) = 1.0;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    for (int c = 0; c <= cap_; ++c) {
      for (int k = 0; k <= k_; ++k) {
        double w = at(i + 1, c, k);
        if (k > 0) {
          const int top = std::min(caps_[i], c);
          for (int l = 1; l <= top; ++l) w += at(i + 1, c - l, k - 1);
        }
        slot(i, c, k) = w;
      }
    }
  }
}

InventoryDecision FeasibleSampler::SampleOnce(Rng& rng) const {
  std::vector<int> levels(n_, 0);
  int c = cap_;
  int k = k_;
  for (int i = 0; i < n_; ++i) {
    double x = rng.Uniform() * at(i, c, k);
    const double skip = at(i + 1, c, k);
    if (x < skip || k == 0) continue;
    x -= skip;
    const int top = std::min(caps_[i], c);
    int chosen = top;
    for (int l = 1; l <= top; ++l) {
      const double w = at(i + 1, c - l, k - 1);
      if (x < w) {
        chosen = l;
        break;
      }
      x -= w;
    }
    levels[i] = chosen;
    c -= chosen;
    --k;
  }
  return InventoryDecision(std::move(levels));
}

InventoryDecision FeasibleSampler::Sample(Rng& rng, bool exclude_zero) const {
  if (exclude_zero && count() < 1.5) {
    throw std::invalid_argument("no nonzero feasible decision exists");
  }
  for (;;) {
    InventoryDecision d = SampleOnce(rng);
    if (!exclude_zero || !d.empty_assortment()) return d;
  }
}

double CountFeasible(const Instance& instance) { return FeasibleSampler(instance).count(); }

FeasibleSet FeasibleSet::Enumerate(const Instance& instance, std::size_t budget) {
  const double count = CountFeasible(instance);
  if (count > static_cast<double>(budget)) {
    throw ResourceLimitError("enumerate_feasible: |U| = " + std::to_string(count) +
                                 " exceeds the enumeration budget",
                             budget);
  }
  FeasibleSet set;
  set.n_ = instance.n_products;
  set.levels_.reserve(static_cast<std::size_t>(count) * set.n_);
  std::vector<int> current(set.n_, 0);
  EnumerateInto(instance, 0, instance.total_cap,
                std::min(instance.max_assortment, instance.n_products), current,
                set.levels_);
  set.size_ = set.n_ == 0 ? 1 : set.levels_.size() / set.n_;
  set.pred_.assign(set.size_ * set.n_, -1);
  std::vector<int> probe(set.n_);
  for (std::size_t s = 0; s < set.size_; ++s) {
    const auto w = set.levels(s);
    for (int i = 0; i < set.n_; ++i) {
      if (w[i] == 0) continue;
      std::copy(w.begin(), w.end(), probe.begin());
      --probe[i];
      const auto idx = set.IndexOf(InventoryDecision(probe));
      if (!idx) throw InvariantViolation("feasible set is not downward closed");
      set.pred_[s * set.n_ + i] = static_cast<std::int64_t>(*idx);
    }
  }
  return set;
}

InventoryDecision FeasibleSet::decision(std::size_t index) const {
  const auto w = levels(index);
  return InventoryDecision(std::vector<int>(w.begin(), w.end()));
}

std::optional<std::size_t> FeasibleSet::IndexOf(const InventoryDecision& decision) const {
  if (decision.size() != static_cast<std::size_t>(n_)) return std::nullopt;
  const auto& target = decision.levels();
  std::size_t lo = 0;
  std::size_t hi = size_;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto w = levels(mid);
    if (std::lexicographical_compare(w.begin(), w.end(), target.begin(), target.end())) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < size_ && std::equal(target.begin(), target.end(), levels(lo).begin())) return lo;
  return std::nullopt;
}

std::vector<InventoryDecision> EnumerateFeasible(const Instance& instance,
                                                 std::size_t budget) {
  const FeasibleSet set = FeasibleSet::Enumerate(instance, budget);
  std::vector<InventoryDecision> out;
  out.reserve(set.size());
  for (std::size_t s = 0; s < set.size(); ++s) out.push_back(set.decision(s));
  return out;
}

std::vector<double> ProfitTable(const FeasibleSet& set, std::span<const double> attractions,
                                std::span<const double> profits,
                                const ArrivalProcess& arrival, double tail_epsilon) {
  const int n = set.n_products();
  if (attractions.size() != static_cast<std::size_t>(n) ||
      profits.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("profit table: parameter vectors must match the set");
  }
  const std::size_t size = set.size();
  // Flattened transitions: for state s, entries [offset[s], offset[s+1]) hold
  // (product, predecessor) pairs.
  std::vector<std::size_t> offset(size + 1, 0);
  std::vector<int> move_product;
  std::vector<std::size_t> move_target;
  std::vector<double> inv_denominator(size);
  for (std::size_t s = 0; s < size; ++s) {
    double denom = 1.0;
    for (int i = 1; i <= n; ++i) {
      const std::int64_t p = set.Predecessor(s, i);
      if (p < 0) continue;
      denom += attractions[i - 1];
      move_product.push_back(i - 1);
      move_target.push_back(static_cast<std::size_t>(p));
    }
    inv_denominator[s] = 1.0 / denom;
    offset[s + 1] = move_product.size();
  }

  const std::vector<double> pmf = arrival.TruncatedPmf(tail_epsilon);
  std::vector<double> prev(size, 0.0);
  std::vector<double> cur(size, 0.0);
  std::vector<double> value(size, 0.0);
  for (std::size_t k = 1; k < pmf.size(); ++k) {
    for (std::size_t s = 0; s < size; ++s) {
      double v = prev[s];
      for (std::size_t m = offset[s]; m < offset[s + 1]; ++m) {
        const int i = move_product[m];
        v += attractions[i] * (profits[i] + prev[move_target[m]]);
      }
      cur[s] = v * inv_denominator[s];
    }
    std::swap(prev, cur);
    const double w = pmf[k];
    if (w == 0.0) continue;
    for (std::size_t s = 0; s < size; ++s) value[s] += w * prev[s];
  }
  return value;
}

std::size_t ArgmaxFirst(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax of an empty range");
  std::size_t best = 0;
  for (std::size_t s = 1; s < values.size(); ++s) {
    if (values[s] > values[best] + kTieMargin) best = s;
  }
  return best;
}

Solution SolveExact(const FeasibleSet& set, const Instance& instance,
                    std::span<const double> attractions, std::span<const double> profits,
                    std::optional<std::span<const double>> order_costs,
                    double tail_epsilon) {
  CheckLengths(instance, attractions, profits, order_costs);
  std::vector<double> values =
      ProfitTable(set, attractions, profits, instance.arrival, tail_epsilon);
  if (order_costs) {
    for (std::size_t s = 0; s < set.size(); ++s) {
      const auto w = set.levels(s);
      for (int i = 0; i < set.n_products(); ++i) values[s] -= (*order_costs)[i] * w[i];
    }
  }
  const std::size_t best = ArgmaxFirst(values);
  return Solution{set.decision(best), values[best], set.size()};
}

Solution SolveExact(const Instance& instance, std::span<const double> attractions,
                    std::span<const double> profits,
                    std::optional<std::span<const double>> order_costs,
                    double tail_epsilon) {
  const FeasibleSet set = FeasibleSet::Enumerate(instance);
  return SolveExact(set, instance, attractions, profits, order_costs, tail_epsilon);
}

void OracleSpec::Validate() const {
  if (!(epsilon >= 0.0 && epsilon < 1.0) || !(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument("oracle epsilon and delta must lie in [0, 1)");
  }
  if (kind == OracleKind::kExact && (epsilon != 0.0 || delta != 0.0)) {
    throw std::invalid_argument("exact oracle requires epsilon = delta = 0");
  }
  if (kind == OracleKind::kApproximate && (budget < 1 || samples_per_candidate < 1)) {
    throw std::invalid_argument("approximate oracle needs budget >= 1 and samples >= 1");
  }
}

OracleSpec OracleSpecFromJson(const nlohmann::json& j) {
  OracleSpec spec;
  const std::string kind = j.value("kind", std::string("exact"));
  if (kind == "exact") {
    spec.kind = OracleKind::kExact;
  } else if (kind == "approximate") {
    spec = OracleSpec::Approximate();
  } else {
    throw std::invalid_argument("unknown oracle kind '" + kind + "'");
  }
  spec.epsilon = j.value("epsilon", spec.epsilon);
  spec.delta = j.value("delta", spec.delta);
  spec.budget = j.value("budget", spec.budget);
  spec.samples_per_candidate = j.value("samples_per_candidate", spec.samples_per_candidate);
  spec.Validate();
  return spec;
}

nlohmann::json OracleSpecToJson(const OracleSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind == OracleKind::kExact ? "exact" : "approximate";
  j["epsilon"] = spec.epsilon;
  j["delta"] = spec.delta;
  if (spec.kind == OracleKind::kApproximate) {
    j["budget"] = spec.budget;
    j["samples_per_candidate"] = spec.samples_per_candidate;
  }
  return j;
}

InventoryDecision GreedyStart(const Instance& instance, std::span<const double> attractions,
                              std::span<const double> profits) {
  const int n = instance.n_products;
  std::vector<int> order;
  for (int i = 0; i < n; ++i) {
    if (instance.per_product_caps[i] > 0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return attractions[a] * profits[a] > attractions[b] * profits[b];
  });
  if (static_cast<int>(order.size()) > instance.max_assortment) {
    order.resize(std::max(instance.max_assortment, 0));
  }
  std::vector<int> levels(n, 0);
  int remaining = instance.total_cap;
  bool progress = true;
  while (remaining > 0 && progress) {
    progress = false;
    for (int i : order) {
      if (remaining == 0) break;
      if (levels[i] < instance.per_product_caps[i]) {
        ++levels[i];
        --remaining;
        progress = true;
      }
    }
  }
  return InventoryDecision(std::move(levels));
}

Solution SolveEpsDelta(const Instance& instance, std::span<const double> attractions,
                       std::span<const double> profits, const OracleSpec& spec, Rng& rng,
                       std::optional<std::span<const double>> order_costs) {
  spec.Validate();
  CheckLengths(instance, attractions, profits, order_costs);
  if (spec.kind == OracleKind::kExact) {
    return SolveExact(instance, attractions, profits, order_costs);
  }
  ProfitQuery query{InventoryDecision::Zero(instance.n_products),
                    std::vector<double>(attractions.begin(), attractions.end()),
                    std::vector<double>(profits.begin(), profits.end()), instance.arrival};
  std::size_t evaluations = 0;
  auto score = [&](const InventoryDecision& u) {
    ++evaluations;
    query.decision = u;
    double s = ExpectedProfitMc(query, spec.samples_per_candidate, rng).estimate;
    if (order_costs) {
      for (int i = 0; i < instance.n_products; ++i) s -= (*order_costs)[i] * u.levels()[i];
    }
    return s;
  };

  InventoryDecision current = GreedyStart(instance, attractions, profits);
  double current_score = score(current);
  const auto budget = static_cast<std::size_t>(spec.budget);
  while (evaluations < budget) {
    std::vector<InventoryDecision> neighbors;
    const std::vector<int>& u = current.levels();
    auto consider = [&](std::vector<int> w) {
      InventoryDecision d(std::move(w));
      if (d != current && IsFeasible(instance, d)) neighbors.push_back(std::move(d));
    };
    for (int i = 0; i < instance.n_products; ++i) {
      std::vector<int> w = u;
      ++w[i];
      consider(w);
      if (u[i] > 0) {
        w = u;
        --w[i];
        consider(w);
        w = u;
        w[i] = 0;
        consider(w);
        for (int j = 0; j < instance.n_products; ++j) {
          if (j == i) continue;
          w = u;
          --w[i];
          ++w[j];
          consider(w);
        }
      }
    }
    std::sort(neighbors.begin(), neighbors.end());
    neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());

    std::optional<std::size_t> best;
    double best_score = current_score;
    for (std::size_t m = 0; m < neighbors.size() && evaluations < budget; ++m) {
      const double s = score(neighbors[m]);
      if (s > best_score) {
        best_score = s;
        best = m;
      }
    }
    if (!best) break;
    current = neighbors[*best];
    current_score = best_score;
  }
  return Solution{current, current_score, evaluations};
}

StaticOptimizer::StaticOptimizer(Instance instance, OracleSpec spec,
                                 std::optional<std::vector<double>> order_costs)
    : instance_(std::move(instance)), spec_(spec), order_costs_(std::move(order_costs)) {
  spec_.Validate();
  if (order_costs_ &&
      order_costs_->size() != static_cast<std::size_t>(instance_.n_products)) {
    throw std::invalid_argument("order costs must have one entry per product");
  }
}

Solution StaticOptimizer::Solve(std::span<const double> attractions,
                                std::span<const double> profits, Rng& rng) {
  std::optional<std::span<const double>> costs;
  if (order_costs_) costs = std::span<const double>(*order_costs_);
  if (spec_.kind == OracleKind::kApproximate) {
    ++solves_;
    return SolveEpsDelta(instance_, attractions, profits, spec_, rng, costs);
  }
  auto key = CacheKey(attractions, profits);
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++cache_hits_;
    return it->second;
  }
  if (!set_) set_ = std::make_unique<FeasibleSet>(FeasibleSet::Enumerate(instance_));
  ++solves_;
  Solution sol = SolveExact(*set_, instance_, attractions, profits, costs);
  cache_.emplace(std::move(key), sol);
  return sol;
}

InterpolationPoint Interpolate(const EstimatorState& state, std::span<const double> alpha) {
  const int n = state.n_products();
  if (alpha.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("alpha must have one entry per product");
  }
  InterpolationPoint point;
  point.alpha.assign(alpha.begin(), alpha.end());
  for (int i = 1; i <= n; ++i) {
    const double a = alpha[i - 1];
    if (!(a >= 0.0 && a <= 1.0)) {
      throw std::invalid_argument("alpha entries must lie in [0, 1]");
    }
    const ConfidenceBounds& b = state.product(i).bounds;
    const double r = state.unit_profits()[i - 1];
    point.v_of_alpha.push_back((1.0 - a) * b.v_lcb + a * b.v_ucb);
    // alpha = 0 must give r exactly even when delta is infinite.
    point.r_of_alpha.push_back(a == 0.0 ? r : std::min(1.0, r + a * b.delta));
  }
  return point;
}

InventoryDecision SampleFeasibleUniform(const Instance& instance, Rng& rng,
                                        bool exclude_zero) {
  return FeasibleSampler(instance).Sample(rng, exclude_zero);
}

}  // namespace mnli
