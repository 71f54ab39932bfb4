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

#ifndef MNLI_ESTIMATION_H_
#define MNLI_ESTIMATION_H_

#include <optional>
#include <ostream>
#include <vector>

#include "mnli/instance.h"

namespace mnli {

// Scale constant in the confidence radius and the adequate-exploration test.
inline constexpr double kConfidenceScale = 48.0;

// 48 log(sqrt(N) * epoch + 1), natural log.
double ExplorationThreshold(int n_products, int epoch_index);

// Delta = max(sqrt(mu_bar), mu_bar) sqrt(L / T) + L / T with
// L = 48 log(sqrt(N) * epoch + 1). Infinite when count == 0.
double ConfidenceRadius(double mu_bar, int count, int n_products, int epoch_index);

struct ConfidenceBounds {
  double mu_bar = 0.0;
  double radius = 0.0;
  double mu_lcb = 0.0;
  double mu_ucb = 0.0;
  double v_lcb = 0.0;
  double v_ucb = 0.0;
  // mu_ucb / mu_lcb - 1 on the clipped bounds; +inf without data.
  double delta = 0.0;
};

// Bounds on the reciprocal attraction mu = 1/v from `count` epoch statistics
// summing to `sum`, clipped to [1/v_max, 1/v_min].
ConfidenceBounds ComputeBounds(double sum, int count, int n_products,
                               int epoch_index, double v_min, double v_max);

// No-purchase bookkeeping for one epoch: the decision is fixed and the epoch
// ends at the end of the first cycle in which every assorted product has been
// bought at least once.
class EpochRecord {
 public:
  EpochRecord(int epoch_index, InventoryDecision decision);

  // Feeds one customer's choice (0 = no purchase). Throws InvariantViolation
  // for a product outside S(u).
  void IngestChoice(int choice);
  void IngestCycle(int cycle_index, const CycleOutcome& outcome);

  int epoch_index() const { return epoch_index_; }
  const InventoryDecision& decision() const { return decision_; }
  const std::vector<int>& cycles() const { return cycles_; }
  int no_purchases_so_far() const { return no_purchases_; }
  // mu_{i,l} for product i (1-based); nullopt until its first purchase.
  std::optional<int> no_purchase_count(int product) const {
    return counts_[product - 1];
  }
  int open_products() const { return open_; }
  bool complete() const { return open_ == 0; }

 private:
  int epoch_index_;
  InventoryDecision decision_;
  std::vector<int> cycles_;
  int no_purchases_ = 0;
  std::vector<std::optional<int>> counts_;
  int open_ = 0;
};

struct ProductEstimate {
  double sum = 0.0;  // sum of recorded mu statistics
  int count = 0;     // T_{i,l}
  ConfidenceBounds bounds;
  double r_hat = 1.0;
  std::vector<int> history;  // only with keep_history
};

// Per-product reciprocal-attraction estimates, confidence bounds and tuned
// profits r_hat = min(1, r + delta).
class EstimatorState {
 public:
  EstimatorState(std::vector<double> unit_profits, double v_min, double v_max,
                 bool keep_history = false);

  // Appends the epoch's statistics and refreshes every product's bounds at the
  // new epoch index. Throws PreconditionError if the epoch is incomplete or
  // out of sequence.
  void CloseEpoch(const EpochRecord& record);

  // Replaces all statistics, e.g. to restore a saved state.
  void Restore(std::vector<double> sums, std::vector<int> counts, int epochs_closed);

  int n_products() const { return static_cast<int>(products_.size()); }
  int epochs_closed() const { return epochs_closed_; }
  double v_min() const { return v_min_; }
  double v_max() const { return v_max_; }
  const std::vector<double>& unit_profits() const { return unit_profits_; }
  // 1-based.
  const ProductEstimate& product(int i) const { return products_[i - 1]; }
  double TunedProfit(int i) const { return products_[i - 1].r_hat; }

  std::vector<double> VUcb() const;
  std::vector<double> VLcb() const;
  std::vector<double> RHat() const;
  std::vector<double> Delta() const;
  // 1 / mu_bar clipped to [v_min, v_max]; `fallback` where no data exists.
  std::vector<double> PointEstimates(double fallback) const;

  // Rows: epoch,product,T,mu_bar,mu_lcb,mu_ucb,v_lcb,v_ucb,r_hat.
  static void WriteTraceHeader(std::ostream& out);
  void WriteTraceRows(std::ostream& out) const;

 private:
  void Refresh(int index);

  std::vector<double> unit_profits_;
  double v_min_;
  double v_max_;
  bool keep_history_;
  int epochs_closed_ = 0;
  std::vector<ProductEstimate> products_;
};

// Epoch-based estimators adapted from the no-inventory MNL-bandit setting,
// used as comparison baselines.
enum class BenchmarkKind {
  kFirstCustomer,     // only the first customer of each cycle is observed
  kUntilNoPurchase,   // all customers; epoch ends at the first no-purchase
  kCensorAware,       // as above, dropping products stocked out before it
};

class BenchmarkEstimator {
 public:
  BenchmarkEstimator(BenchmarkKind kind, int n_products);

  // Feeds a cycle generated under `decision` (which must stay fixed within an
  // epoch). Returns true when this cycle ended the epoch. kCensorAware needs
  // the outcome's assortment path.
  bool ObserveCycle(const InventoryDecision& decision, const CycleOutcome& outcome);

  BenchmarkKind kind() const { return kind_; }
  // Mean per-epoch purchase count; nullopt without samples.
  std::optional<double> Estimate(int product) const;
  std::vector<std::optional<double>> Estimates() const;
  int samples(int product) const { return counts_[product - 1]; }
  int epochs_closed() const { return epochs_closed_; }

 private:
  void CloseEpoch(const InventoryDecision& decision);
  void ResetEpoch();

  BenchmarkKind kind_;
  std::vector<double> sums_;
  std::vector<int> counts_;
  int epochs_closed_ = 0;
  std::vector<int> epoch_purchases_;
  std::vector<bool> epoch_censored_;
};

}  // namespace mnli

#endif  // MNLI_ESTIMATION_H_
