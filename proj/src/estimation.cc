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

#include "mnli/estimation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mnli/errors.h"
#include "mnli/format.h"

namespace mnli {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double ExplorationThreshold(int n_products, int epoch_index) {
  return kConfidenceScale * std::log(std::sqrt(static_cast<double>(n_products)) * epoch_index + 1.0);
}

double ConfidenceRadius(double mu_bar, int count, int n_products, int epoch_index) {
  if (count <= 0) return kInf;
  const double ratio = ExplorationThreshold(n_products, epoch_index) / count;
  return std::max(std::sqrt(mu_bar), mu_bar) * std::sqrt(ratio) + ratio;
}

ConfidenceBounds ComputeBounds(double sum, int count, int n_products,
                               int epoch_index, double v_min, double v_max) {
  const double mu_min = 1.0 / v_max;
  const double mu_max = 1.0 / v_min;
  ConfidenceBounds b;
  if (count <= 0) {
    b.mu_bar = std::numeric_limits<double>::quiet_NaN();
    b.radius = kInf;
    b.mu_lcb = mu_min;
    b.mu_ucb = mu_max;
    b.v_lcb = v_min;
    b.v_ucb = v_max;
    b.delta = kInf;
    return b;
  }
  b.mu_bar = sum / count;
  b.radius = ConfidenceRadius(b.mu_bar, count, n_products, epoch_index);
  // Both ends clipped into [mu_min, mu_max] so that lcb <= ucb even when
  // mu_bar itself falls outside the range.
  b.mu_lcb = std::clamp(b.mu_bar - b.radius, mu_min, mu_max);
  b.mu_ucb = std::clamp(b.mu_bar + b.radius, mu_min, mu_max);
  b.v_lcb = 1.0 / b.mu_ucb;
  b.v_ucb = 1.0 / b.mu_lcb;
  b.delta = b.mu_ucb / b.mu_lcb - 1.0;
  return b;
}

EpochRecord::EpochRecord(int epoch_index, InventoryDecision decision)
    : epoch_index_(epoch_index),
      decision_(std::move(decision)),
      counts_(decision_.size()) {
  for (int level : decision_.levels()) {
    if (level > 0) ++open_;
  }
}

void EpochRecord::IngestChoice(int choice) {
  if (choice == 0) {
    ++no_purchases_;
    return;
  }
  if (choice < 0 || choice > static_cast<int>(decision_.size()) ||
      decision_.level(choice) == 0) {
    throw InvariantViolation("epoch " + std::to_string(epoch_index_) +
                             ": purchase of product " + std::to_string(choice) +
                             " which is not stocked under " + decision_.ToString());
  }
  auto& slot = counts_[choice - 1];
  if (!slot) {
    slot = no_purchases_;
    --open_;
  }
}

void EpochRecord::IngestCycle(int cycle_index, const CycleOutcome& outcome) {
  for (int c : outcome.choices) IngestChoice(c);
  cycles_.push_back(cycle_index);
}

EstimatorState::EstimatorState(std::vector<double> unit_profits, double v_min,
                               double v_max, bool keep_history)
    : unit_profits_(std::move(unit_profits)),
      v_min_(v_min),
      v_max_(v_max),
      keep_history_(keep_history),
      products_(unit_profits_.size()) {
  if (!(v_min > 0.0 && v_min <= v_max)) {
    throw std::invalid_argument("estimator: need 0 < v_min <= v_max");
  }
  for (int i = 0; i < n_products(); ++i) Refresh(i);
}

void EstimatorState::Refresh(int index) {
  ProductEstimate& p = products_[index];
  p.bounds = ComputeBounds(p.sum, p.count, n_products(), epochs_closed_, v_min_, v_max_);
  p.r_hat = p.count == 0 ? 1.0 : std::min(1.0, unit_profits_[index] + p.bounds.delta);
}

void EstimatorState::CloseEpoch(const EpochRecord& record) {
  if (!record.complete()) {
    throw PreconditionError("close_epoch: epoch " + std::to_string(record.epoch_index()) +
                            " still has unpurchased products");
  }
  if (record.epoch_index() != epochs_closed_ + 1) {
    throw PreconditionError("close_epoch: expected epoch " +
                            std::to_string(epochs_closed_ + 1) + ", got " +
                            std::to_string(record.epoch_index()));
  }
  if (record.decision().size() != products_.size()) {
    throw std::invalid_argument("close_epoch: decision length differs from estimator");
  }
  ++epochs_closed_;
  for (int i = 1; i <= n_products(); ++i) {
    const auto mu = record.no_purchase_count(i);
    if (!mu) continue;
    ProductEstimate& p = products_[i - 1];
    p.sum += *mu;
    ++p.count;
    if (keep_history_) p.history.push_back(*mu);
  }
  for (int i = 0; i < n_products(); ++i) Refresh(i);
}

void EstimatorState::Restore(std::vector<double> sums, std::vector<int> counts,
                             int epochs_closed) {
  if (sums.size() != products_.size() || counts.size() != products_.size()) {
    throw std::invalid_argument("restore: statistics length differs from estimator");
  }
  epochs_closed_ = epochs_closed;
  for (std::size_t i = 0; i < products_.size(); ++i) {
    if (counts[i] < 0 || counts[i] > epochs_closed) {
      throw std::invalid_argument("restore: counts must lie in [0, epochs_closed]");
    }
    products_[i].sum = sums[i];
    products_[i].count = counts[i];
    products_[i].history.clear();
    Refresh(static_cast<int>(i));
  }
}

std::vector<double> EstimatorState::VUcb() const {
  std::vector<double> out;
  out.reserve(products_.size());
  for (const auto& p : products_) out.push_back(p.bounds.v_ucb);
  return out;
}

std::vector<double> EstimatorState::VLcb() const {
  std::vector<double> out;
  out.reserve(products_.size());
  for (const auto& p : products_) out.push_back(p.bounds.v_lcb);
  return out;
}

std::vector<double> EstimatorState::RHat() const {
  std::vector<double> out;
  out.reserve(products_.size());
  for (const auto& p : products_) out.push_back(p.r_hat);
  return out;
}

std::vector<double> EstimatorState::Delta() const {
  std::vector<double> out;
  out.reserve(products_.size());
  for (const auto& p : products_) out.push_back(p.bounds.delta);
  return out;
}

std::vector<double> EstimatorState::PointEstimates(double fallback) const {
  std::vector<double> out;
  out.reserve(products_.size());
  for (const auto& p : products_) {
    if (p.count == 0) {
      out.push_back(fallback);
    } else {
      out.push_back(1.0 / std::clamp(p.bounds.mu_bar, 1.0 / v_max_, 1.0 / v_min_));
    }
  }
  return out;
}

void EstimatorState::WriteTraceHeader(std::ostream& out) {
  out << "epoch,product,T,mu_bar,mu_lcb,mu_ucb,v_lcb,v_ucb,r_hat\n";
}

void EstimatorState::WriteTraceRows(std::ostream& out) const {
  for (int i = 0; i < n_products(); ++i) {
    const ProductEstimate& p = products_[i];
    out << epochs_closed_ << ',' << i + 1 << ',' << p.count << ','
        << FormatDouble(p.bounds.mu_bar) << ',' << FormatDouble(p.bounds.mu_lcb) << ','
        << FormatDouble(p.bounds.mu_ucb) << ',' << FormatDouble(p.bounds.v_lcb) << ','
        << FormatDouble(p.bounds.v_ucb) << ',' << FormatDouble(p.r_hat) << '\n';
  }
}

BenchmarkEstimator::BenchmarkEstimator(BenchmarkKind kind, int n_products)
    : kind_(kind),
      sums_(n_products, 0.0),
      counts_(n_products, 0),
      epoch_purchases_(n_products, 0),
      epoch_censored_(n_products, false) {}

void BenchmarkEstimator::ResetEpoch() {
  std::fill(epoch_purchases_.begin(), epoch_purchases_.end(), 0);
  std::fill(epoch_censored_.begin(), epoch_censored_.end(), false);
}

void BenchmarkEstimator::CloseEpoch(const InventoryDecision& decision) {
  for (std::size_t i = 0; i < sums_.size(); ++i) {
    if (decision.levels()[i] == 0) continue;
    if (kind_ == BenchmarkKind::kCensorAware && epoch_censored_[i]) continue;
    sums_[i] += epoch_purchases_[i];
    ++counts_[i];
  }
  ++epochs_closed_;
  ResetEpoch();
}

bool BenchmarkEstimator::ObserveCycle(const InventoryDecision& decision,
                                      const CycleOutcome& outcome) {
  if (decision.size() != sums_.size()) {
    throw std::invalid_argument("benchmark estimator: decision length mismatch");
  }
  if (outcome.arrivals == 0) return false;
  if (kind_ == BenchmarkKind::kFirstCustomer) {
    const int c = outcome.choices.front();
    if (c == 0) {
      CloseEpoch(decision);
      return true;
    }
    ++epoch_purchases_[c - 1];
    return false;
  }
  const bool track_censoring = kind_ == BenchmarkKind::kCensorAware;
  if (track_censoring &&
      outcome.assortment_path.size() != static_cast<std::size_t>(outcome.arrivals)) {
    throw std::invalid_argument("censor-aware estimator needs the assortment path");
  }
  for (int m = 0; m < outcome.arrivals; ++m) {
    if (track_censoring) {
      const Assortment& available = outcome.assortment_path[m];
      for (std::size_t i = 0; i < sums_.size(); ++i) {
        if (decision.levels()[i] > 0 &&
            !std::binary_search(available.begin(), available.end(),
                                static_cast<int>(i) + 1)) {
          epoch_censored_[i] = true;
        }
      }
    }
    const int c = outcome.choices[m];
    if (c == 0) {
      CloseEpoch(decision);
      return true;
    }
    ++epoch_purchases_[c - 1];
  }
  return false;
}

std::optional<double> BenchmarkEstimator::Estimate(int product) const {
  const int i = product - 1;
  if (counts_[i] == 0) return std::nullopt;
  return sums_[i] / counts_[i];
}

std::vector<std::optional<double>> BenchmarkEstimator::Estimates() const {
  std::vector<std::optional<double>> out;
  for (int i = 1; i <= static_cast<int>(sums_.size()); ++i) out.push_back(Estimate(i));
  return out;
}

}  // namespace mnli
