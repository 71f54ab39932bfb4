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

#include "mnli/instance.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mnli {
namespace {

// Inversion is numerically safe while exp(-mean) stays well inside double
// range; larger means are split into independent Poisson pieces.
constexpr double kMaxInversionMean = 30.0;

int SamplePoissonByInversion(double mean, Rng& rng) {
  const double u = rng.Uniform();
  double p = std::exp(-mean);
  double cdf = p;
  int k = 0;
  while (u >= cdf) {
    ++k;
    p *= mean / k;
    cdf += p;
    if (p == 0.0 && cdf < u) break;  // rounding left a sliver of mass
  }
  return k;
}

int SamplePoisson(double mean, Rng& rng) {
  if (mean <= kMaxInversionMean) return SamplePoissonByInversion(mean, rng);
  const int pieces = static_cast<int>(std::ceil(mean / kMaxInversionMean));
  const double piece_mean = mean / pieces;
  int total = 0;
  for (int j = 0; j < pieces; ++j) total += SamplePoissonByInversion(piece_mean, rng);
  return total;
}

std::vector<double> PoissonTruncatedPmf(double mean, double tail_epsilon) {
  const int hi = static_cast<int>(std::ceil(mean + 20.0 * std::sqrt(mean) + 60.0));
  std::vector<double> pmf(hi + 1);
  const double log_mean = std::log(mean);
  for (int k = 0; k <= hi; ++k) {
    pmf[k] = std::exp(-mean + k * log_mean - std::lgamma(k + 1.0));
  }
  // tail[k] = P(M > k), accumulated from the top to avoid cancellation.
  std::vector<double> tail(hi + 1, 0.0);
  for (int k = hi - 1; k >= 0; --k) tail[k] = tail[k + 1] + pmf[k + 1];
  int m_max = hi;
  for (int k = 0; k <= hi; ++k) {
    if (tail[k] < tail_epsilon) {
      m_max = k;
      break;
    }
  }
  pmf.resize(m_max + 1);
  return pmf;
}

void Require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument("instance: " + message);
}

}  // namespace

ArrivalProcess ArrivalProcess::Deterministic(int customers) {
  if (customers < 1) {
    throw std::invalid_argument("deterministic arrivals need M >= 1");
  }
  return ArrivalProcess(ArrivalKind::kDeterministic, customers, {});
}

ArrivalProcess ArrivalProcess::Poisson(double mean) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson arrivals need a positive mean");
  }
  return ArrivalProcess(ArrivalKind::kPoisson, mean, {});
}

ArrivalProcess ArrivalProcess::Custom(std::vector<double> pmf) {
  if (pmf.empty()) throw std::invalid_argument("custom arrival pmf is empty");
  double total = 0.0;
  double mean = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (!(pmf[k] >= 0.0)) {
      throw std::invalid_argument("custom arrival pmf has a negative entry");
    }
    total += pmf[k];
    mean += k * pmf[k];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("custom arrival pmf must sum to 1");
  }
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  return ArrivalProcess(ArrivalKind::kCustom, mean, std::move(pmf));
}

int ArrivalProcess::Sample(Rng& rng) const {
  switch (kind_) {
    case ArrivalKind::kDeterministic:
      return static_cast<int>(mean_);
    case ArrivalKind::kPoisson:
      return SamplePoisson(mean_, rng);
    case ArrivalKind::kCustom: {
      const double u = rng.Uniform();
      double cdf = 0.0;
      for (std::size_t k = 0; k < pmf_.size(); ++k) {
        cdf += pmf_[k];
        if (u < cdf) return static_cast<int>(k);
      }
      return static_cast<int>(pmf_.size()) - 1;
    }
  }
  return 0;
}

std::vector<double> ArrivalProcess::TruncatedPmf(double tail_epsilon) const {
  switch (kind_) {
    case ArrivalKind::kDeterministic: {
      std::vector<double> pmf(static_cast<int>(mean_) + 1, 0.0);
      pmf.back() = 1.0;
      return pmf;
    }
    case ArrivalKind::kPoisson:
      return PoissonTruncatedPmf(mean_, tail_epsilon);
    case ArrivalKind::kCustom:
      return pmf_;
  }
  return {};
}

int InventoryDecision::total() const {
  return std::accumulate(levels_.begin(), levels_.end(), 0);
}

Assortment InventoryDecision::assortment() const {
  Assortment s;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] > 0) s.push_back(static_cast<int>(i) + 1);
  }
  return s;
}

std::string InventoryDecision::ToString() const {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (i) out << ',';
    out << levels_[i];
  }
  out << ')';
  return out.str();
}

void Instance::Validate() const {
  Require(n_products >= 1, "n_products must be positive");
  const auto n = static_cast<std::size_t>(n_products);
  Require(v_min > 0.0 && v_min <= v_max && std::isfinite(v_max),
          "v_bounds must satisfy 0 < v_min <= v_max");
  Require(attractions.empty() || attractions.size() == n,
          "attractions must have n_products entries");
  for (double v : attractions) {
    Require(v >= v_min && v <= v_max, "attraction outside v_bounds");
  }
  Require(unit_profits.size() == n, "unit_profits must have n_products entries");
  double r_max = 0.0;
  for (double r : unit_profits) {
    Require(r > 0.0 && r <= 1.0, "unit profits must lie in (0, 1]");
    r_max = std::max(r_max, r);
  }
  Require(std::abs(r_max - 1.0) <= 1e-12, "max unit profit must equal 1");
  Require(per_product_caps.size() == n,
          "per_product_caps must have n_products entries");
  for (int c : per_product_caps) Require(c >= 0, "caps must be non-negative");
  Require(total_cap >= 0, "total_cap must be non-negative");
  Require(max_assortment >= 1 && max_assortment <= n_products,
          "max_assortment must lie in [1, n_products]");
}

Instance Instance::WithoutTruth() const {
  Instance copy = *this;
  copy.attractions.clear();
  return copy;
}

double CycleOutcome::RealizedProfit(std::span<const double> unit_profits) const {
  double total = 0.0;
  for (int c : choices) {
    if (c > 0) total += unit_profits[c - 1];
  }
  return total;
}

double ChoiceProbability(std::span<const double> attractions,
                         const Assortment& assortment, int product) {
  const int n = static_cast<int>(attractions.size());
  if (product < 0 || product > n) {
    throw std::invalid_argument("choice_probability: product index out of range");
  }
  double denominator = 1.0;
  bool offered = product == 0;
  for (int i : assortment) {
    if (i < 1 || i > n) {
      throw std::invalid_argument("choice_probability: assortment index out of range");
    }
    denominator += attractions[i - 1];
    if (i == product) offered = true;
  }
  if (!offered) return 0.0;
  const double numerator = product == 0 ? 1.0 : attractions[product - 1];
  return numerator / denominator;
}

double ChoiceProbability(const Instance& instance, const Assortment& assortment,
                         int product) {
  return ChoiceProbability(instance.attractions, assortment, product);
}

bool IsFeasible(const Instance& instance, const InventoryDecision& decision) {
  if (decision.size() != static_cast<std::size_t>(instance.n_products)) {
    throw std::invalid_argument("is_feasible: decision length differs from n_products");
  }
  int total = 0;
  int assorted = 0;
  for (int i = 0; i < instance.n_products; ++i) {
    const int u = decision.levels()[i];
    if (u < 0 || u > instance.per_product_caps[i]) return false;
    total += u;
    if (u > 0) ++assorted;
  }
  return total <= instance.total_cap && assorted <= instance.max_assortment;
}

int SampleArrivals(const Instance& instance, Rng& rng) {
  return instance.arrival.Sample(rng);
}

int SampleChoice(std::span<const double> attractions, std::span<const int> stock,
                 Rng& rng) {
  double denominator = 1.0;
  for (std::size_t i = 0; i < stock.size(); ++i) {
    if (stock[i] > 0) denominator += attractions[i];
  }
  double x = rng.Uniform() * denominator;
  if (x < 1.0) return 0;
  x -= 1.0;
  int last = 0;
  for (std::size_t i = 0; i < stock.size(); ++i) {
    if (stock[i] <= 0) continue;
    last = static_cast<int>(i) + 1;
    if (x < attractions[i]) return last;
    x -= attractions[i];
  }
  return last;  // rounding at the top of the CDF
}

CycleOutcome SimulateCycle(std::span<const double> attractions,
                           const ArrivalProcess& arrival,
                           const InventoryDecision& decision, Rng& rng,
                           bool record_path) {
  CycleOutcome out;
  out.arrivals = arrival.Sample(rng);
  std::vector<int> stock = decision.levels();
  out.sales.assign(stock.size(), 0);
  out.choices.reserve(out.arrivals);
  if (record_path) out.assortment_path.reserve(out.arrivals);
  for (int m = 0; m < out.arrivals; ++m) {
    if (record_path) {
      Assortment available;
      for (std::size_t i = 0; i < stock.size(); ++i) {
        if (stock[i] > 0) available.push_back(static_cast<int>(i) + 1);
      }
      out.assortment_path.push_back(std::move(available));
    }
    const int choice = SampleChoice(attractions, stock, rng);
    out.choices.push_back(choice);
    if (choice > 0) {
      --stock[choice - 1];
      ++out.sales[choice - 1];
    }
  }
  return out;
}

CycleOutcome SimulateCycle(const Instance& instance,
                           const InventoryDecision& decision, Rng& rng) {
  if (!IsFeasible(instance, decision)) {
    throw std::invalid_argument("simulate_cycle: infeasible decision " +
                                decision.ToString());
  }
  return SimulateCycle(instance.attractions, instance.arrival, decision, rng);
}

nlohmann::json ArrivalToJson(const ArrivalProcess& arrival) {
  switch (arrival.kind()) {
    case ArrivalKind::kDeterministic:
      return {{"kind", "deterministic"}, {"mean", static_cast<int>(arrival.mean())}};
    case ArrivalKind::kPoisson:
      return {{"kind", "poisson"}, {"mean", arrival.mean()}};
    case ArrivalKind::kCustom:
      return {{"kind", "truncated_custom"}, {"pmf", arrival.pmf()}};
  }
  return {};
}

ArrivalProcess ArrivalFromJson(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "deterministic") {
    const double mean = j.at("mean").get<double>();
    if (mean != std::floor(mean)) {
      throw std::invalid_argument("deterministic arrivals need an integer mean");
    }
    return ArrivalProcess::Deterministic(static_cast<int>(mean));
  }
  if (kind == "poisson") return ArrivalProcess::Poisson(j.at("mean").get<double>());
  if (kind == "truncated_custom") {
    return ArrivalProcess::Custom(j.at("pmf").get<std::vector<double>>());
  }
  throw std::invalid_argument("unknown arrival kind '" + kind + "'");
}

Instance InstanceFromJson(const nlohmann::json& j) {
  Instance inst;
  inst.n_products = j.at("n_products").get<int>();
  if (j.contains("attractions")) {
    inst.attractions = j.at("attractions").get<std::vector<double>>();
  }
  const auto bounds = j.at("v_bounds").get<std::vector<double>>();
  if (bounds.size() != 2) throw std::invalid_argument("v_bounds must have two entries");
  inst.v_min = bounds[0];
  inst.v_max = bounds[1];
  inst.unit_profits = j.at("unit_profits").get<std::vector<double>>();
  inst.per_product_caps = j.at("per_product_caps").get<std::vector<int>>();
  inst.total_cap = j.at("total_cap").get<int>();
  inst.max_assortment = j.at("max_assortment").get<int>();
  inst.arrival = ArrivalFromJson(j.at("arrival"));
  inst.Validate();
  return inst;
}

nlohmann::json InstanceToJson(const Instance& instance) {
  nlohmann::json j;
  j["n_products"] = instance.n_products;
  if (!instance.attractions.empty()) j["attractions"] = instance.attractions;
  j["v_bounds"] = {instance.v_min, instance.v_max};
  j["unit_profits"] = instance.unit_profits;
  j["per_product_caps"] = instance.per_product_caps;
  j["total_cap"] = instance.total_cap;
  j["max_assortment"] = instance.max_assortment;
  j["arrival"] = ArrivalToJson(instance.arrival);
  return j;
}

}  // namespace mnli
