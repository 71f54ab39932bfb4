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

#include "mnli/policy.h"

#include <algorithm>
#include <stdexcept>

#include "mnli/errors.h"
#include "mnli/format.h"

namespace mnli {
namespace {

std::vector<double> PolicyProfits(const Instance& instance, const PolicyConfig& config) {
  if (!config.costs) return instance.unit_profits;
  if (config.costs->adjusted_profits().size() !=
      static_cast<std::size_t>(instance.n_products)) {
    throw std::invalid_argument("cost structure length differs from instance");
  }
  return config.costs->adjusted_profits();
}

}  // namespace

std::string PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kProposed:
      return "proposed";
    case PolicyKind::kVUcbOnly:
      return "v_ucb_only";
    case PolicyKind::kGreedy:
      return "greedy";
  }
  return "unknown";
}

PolicyKind PolicyKindFromName(const std::string& name) {
  if (name == "proposed") return PolicyKind::kProposed;
  if (name == "v_ucb_only") return PolicyKind::kVUcbOnly;
  if (name == "greedy") return PolicyKind::kGreedy;
  throw std::invalid_argument("unknown policy kind '" + name + "'");
}

Policy::Policy(const Instance& instance, PolicyConfig config, std::uint64_t seed)
    : instance_(instance.WithoutTruth()),
      config_(std::move(config)),
      oracle_rng_(DeriveSeed(seed, 1)),
      estimator_(PolicyProfits(instance, config_), instance.v_min, instance.v_max,
                 config_.keep_history),
      record_(1, InventoryDecision::Zero(instance.n_products)) {
  instance_.Validate();
  if (config_.greedy_prior &&
      config_.greedy_prior->size() != static_cast<std::size_t>(instance_.n_products)) {
    throw std::invalid_argument("greedy prior must have one entry per product");
  }
  std::optional<std::vector<double>> order_costs;
  if (config_.costs) order_costs = config_.costs->adjusted_order_costs();
  optimizer_ = std::make_unique<StaticOptimizer>(instance_, config_.oracle, order_costs);
  // The first decision solves at the initial bounds (v_ucb = v_max, r_hat = 1)
  // rather than taking the exploration branch.
  decision_ = NextDecision();
  record_ = EpochRecord(1, decision_);
}

std::vector<int> Policy::UnderExplored() const {
  const double threshold =
      ExplorationThreshold(instance_.n_products, estimator_.epochs_closed());
  std::vector<int> out;
  for (int i = 1; i <= instance_.n_products; ++i) {
    if (instance_.per_product_caps[i - 1] == 0) continue;
    if (estimator_.product(i).count < threshold) out.push_back(i);
  }
  return out;
}

InventoryDecision Policy::ExplorationDecision(const std::vector<int>& products) const {
  std::vector<int> levels(instance_.n_products, 0);
  const int limit = std::min(instance_.max_assortment, instance_.total_cap);
  int used = 0;
  for (int i : products) {
    if (used >= limit) break;
    levels[i - 1] = 1;
    ++used;
  }
  return InventoryDecision(std::move(levels));
}

InventoryDecision Policy::NextDecision() {
  exploratory_ = false;
  const bool first = estimator_.epochs_closed() == 0;
  if (config_.kind != PolicyKind::kGreedy && config_.forced_exploration && !first) {
    const std::vector<int> under = UnderExplored();
    if (!under.empty()) {
      exploratory_ = true;
      return ExplorationDecision(under);
    }
  }
  switch (config_.kind) {
    case PolicyKind::kProposed:
      return optimizer_->Solve(estimator_.VUcb(), estimator_.RHat(), oracle_rng_).decision;
    case PolicyKind::kVUcbOnly:
      return optimizer_->Solve(estimator_.VUcb(), estimator_.unit_profits(), oracle_rng_)
          .decision;
    case PolicyKind::kGreedy: {
      std::vector<double> v(instance_.n_products);
      for (int i = 1; i <= instance_.n_products; ++i) {
        const ProductEstimate& p = estimator_.product(i);
        if (p.count == 0) {
          v[i - 1] = config_.greedy_prior ? (*config_.greedy_prior)[i - 1] : instance_.v_max;
        } else {
          v[i - 1] = 1.0 / std::clamp(p.bounds.mu_bar, 1.0 / instance_.v_max,
                                      1.0 / instance_.v_min);
        }
      }
      return optimizer_->Solve(v, estimator_.unit_profits(), oracle_rng_).decision;
    }
  }
  throw std::logic_error("unhandled policy kind");
}

bool Policy::ObserveCycle(int cycle_index, const CycleOutcome& outcome) {
  record_.IngestCycle(cycle_index, outcome);
  if (!record_.complete()) return false;
  estimator_.CloseEpoch(record_);
  const int next_index = record_.epoch_index() + 1;
  decision_ = NextDecision();
  if (!IsFeasible(instance_, decision_)) {
    throw InvariantViolation("policy emitted infeasible decision " + decision_.ToString());
  }
  record_ = EpochRecord(next_index, decision_);
  return true;
}

Clairvoyant Clairvoyant::Compute(const Instance& instance,
                                 const std::optional<CostStructure>& costs) {
  if (instance.attractions.empty()) {
    throw std::invalid_argument("clairvoyant needs the true attractions");
  }
  Clairvoyant c;
  auto set = std::make_shared<FeasibleSet>(FeasibleSet::Enumerate(instance));
  const std::vector<double>& profits =
      costs ? costs->adjusted_profits() : instance.unit_profits;
  c.values_ = ProfitTable(*set, instance.attractions, profits, instance.arrival);
  if (costs) {
    const auto& o = costs->adjusted_order_costs();
    for (std::size_t s = 0; s < set->size(); ++s) {
      const auto w = set->levels(s);
      for (int i = 0; i < set->n_products(); ++i) c.values_[s] -= o[i] * w[i];
    }
  }
  const std::size_t best = ArgmaxFirst(c.values_);
  c.decision_ = set->decision(best);
  c.value_ = c.values_[best];
  c.set_ = std::move(set);
  return c;
}

double Clairvoyant::ValueOf(const InventoryDecision& decision) const {
  const auto idx = set_->IndexOf(decision);
  if (!idx) throw std::invalid_argument("decision " + decision.ToString() + " is infeasible");
  return values_[*idx];
}

RegretTrace RunPolicy(const Instance& instance, const PolicyConfig& config, int horizon,
                      std::uint64_t seed, const Clairvoyant* clairvoyant,
                      const CycleObserver& observer) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  instance.Validate();
  std::optional<Clairvoyant> own;
  if (!clairvoyant) {
    own = Clairvoyant::Compute(instance, config.costs);
    clairvoyant = &*own;
  }
  Policy policy(instance, config, seed);
  Rng sim_rng(DeriveSeed(seed, 0));
  const std::vector<double>& profits = policy.profits();
  std::vector<double> order_costs(instance.n_products, 0.0);
  if (config.costs) order_costs = config.costs->adjusted_order_costs();

  RegretTrace trace;
  trace.kind = config.kind;
  trace.optimal_decision = clairvoyant->decision();
  trace.optimal_value = clairvoyant->value();
  trace.records.reserve(horizon);
  double cum = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    const InventoryDecision decision = policy.current_decision();
    const int epoch = policy.epoch_index();
    const bool exploratory = policy.exploratory();
    const CycleOutcome outcome = SimulateCycle(instance.attractions, instance.arrival,
                                               decision, sim_rng, static_cast<bool>(observer));
    if (observer) observer(t, decision, outcome);
    double realized = outcome.RealizedProfit(profits);
    if (config.costs) {
      for (int i = 0; i < instance.n_products; ++i) {
        realized -= order_costs[i] * decision.levels()[i];
      }
    }
    const double expected = clairvoyant->ValueOf(decision);
    cum += clairvoyant->value() - expected;
    trace.records.push_back(
        CycleRecord{t, epoch, decision, realized, expected, cum, exploratory});
    if (exploratory) ++trace.exploratory_cycles;
    policy.ObserveCycle(t, outcome);
  }
  trace.epochs = trace.records.back().epoch;
  trace.final_regret = cum;
  return trace;
}

std::string DecisionField(const InventoryDecision& decision) {
  std::string s;
  for (std::size_t i = 0; i < decision.size(); ++i) {
    if (i > 0) s += ' ';
    s += std::to_string(decision.levels()[i]);
  }
  return s;
}

void WriteTraceCsv(std::ostream& out, const RegretTrace& trace) {
  out << kTraceSchema << '\n';
  out << "cycle,epoch,decision,realized_profit,expected_profit,cum_regret,exploratory\n";
  for (const CycleRecord& r : trace.records) {
    out << r.cycle << ',' << r.epoch << ',' << DecisionField(r.decision) << ','
        << FormatDouble(r.realized_profit) << ',' << FormatDouble(r.expected_profit) << ','
        << FormatDouble(r.cum_regret) << ',' << (r.exploratory ? 1 : 0) << '\n';
  }
}

nlohmann::json TraceSummaryJson(const RegretTrace& trace) {
  nlohmann::json j;
  j["policy"] = PolicyKindName(trace.kind);
  j["cycles"] = trace.records.size();
  j["final_regret"] = trace.final_regret;
  j["epochs"] = trace.epochs;
  j["exploratory_cycles"] = trace.exploratory_cycles;
  j["optimal_decision"] = trace.optimal_decision.levels();
  j["optimal_value"] = trace.optimal_value;
  return j;
}

}  // namespace mnli
