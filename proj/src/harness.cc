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

#include "mnli/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mnli/errors.h"
#include "mnli/format.h"
#include "mnli/profit.h"
#include "mnli/static_opt.h"

namespace mnli {
namespace {

using nlohmann::json;

CostStructure CostsFromJson(const json& j) {
  return CostStructure::FromRaw(j.at("selling_prices").get<std::vector<double>>(),
                                j.at("ordering_costs").get<std::vector<double>>(),
                                j.at("salvage_values").get<std::vector<double>>());
}

PolicyConfig PolicyConfigFromJson(const json& j) {
  PolicyConfig c;
  if (j.is_string()) {
    c.kind = PolicyKindFromName(j.get<std::string>());
    return c;
  }
  c.kind = PolicyKindFromName(j.at("kind").get<std::string>());
  if (j.contains("oracle")) c.oracle = OracleSpecFromJson(j.at("oracle"));
  c.forced_exploration = j.value("forced_exploration", true);
  if (j.contains("costs")) c.costs = CostsFromJson(j.at("costs"));
  if (j.contains("greedy_prior")) {
    c.greedy_prior = j.at("greedy_prior").get<std::vector<double>>();
  }
  return c;
}

std::vector<double> VectorOr(const json& j, const char* key, const std::vector<double>& dflt) {
  return j.contains(key) ? j.at(key).get<std::vector<double>>() : dflt;
}

std::string CsvLine(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) s += ',';
    s += fields[i];
  }
  s += '\n';
  return s;
}

}  // namespace

std::string EstimatorKindName(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kProposed:
      return "proposed";
    case EstimatorKind::kFirstCustomer:
      return "first_customer";
    case EstimatorKind::kUntilNoPurchase:
      return "until_no_purchase";
    case EstimatorKind::kCensorAware:
      return "censor_aware";
  }
  return "unknown";
}

EstimatorKind EstimatorKindFromName(const std::string& name) {
  for (EstimatorKind k : {EstimatorKind::kProposed, EstimatorKind::kFirstCustomer,
                          EstimatorKind::kUntilNoPurchase, EstimatorKind::kCensorAware}) {
    if (EstimatorKindName(k) == name) return k;
  }
  throw std::invalid_argument("unknown estimator '" + name + "'");
}

ExperimentConfig ExperimentConfigFromJson(const json& j) {
  ExperimentConfig c;
  try {
    c.raw = j;
    c.mode = j.value("mode", std::string("regret"));
    static const char* kModes[] = {"regret", "estimator-benchmark", "reduction-audit",
                                   "evaluate", "optimize"};
    if (std::find(std::begin(kModes), std::end(kModes), c.mode) == std::end(kModes)) {
      throw std::invalid_argument("unknown mode '" + c.mode + "'");
    }
    c.instance = InstanceFromJson(j.at("instance"));
    if (j.contains("policies")) {
      for (const json& p : j.at("policies")) c.policies.push_back(PolicyConfigFromJson(p));
    }
    c.horizon = j.value("horizon", 1);
    c.replications = j.value("replications", 1);
    c.base_seed = j.value("base_seed", std::uint64_t{0});
    c.outputs = j.value("outputs", std::string());
    c.threads = j.value("threads", 1);
    if (c.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (c.replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (c.threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (j.contains("estimators")) {
      c.bench.estimators.clear();
      for (const json& e : j.at("estimators")) {
        c.bench.estimators.push_back(EstimatorKindFromName(e.get<std::string>()));
      }
    }
    if (j.contains("random_attractions")) {
      const json& r = j.at("random_attractions");
      const double lo = r.at("low").get<double>();
      const double hi = r.at("high").get<double>();
      if (!(lo >= c.instance.v_min && lo <= hi && hi <= c.instance.v_max)) {
        throw std::invalid_argument("random_attractions must lie within v_bounds");
      }
      c.bench.random_attractions = std::make_pair(lo, hi);
    }
    if (j.contains("initial_estimate")) {
      const json& e = j.at("initial_estimate");
      c.bench.initial_estimate =
          e.is_number() ? std::vector<double>(c.instance.n_products, e.get<double>())
                        : e.get<std::vector<double>>();
      if (c.bench.initial_estimate->size() !=
          static_cast<std::size_t>(c.instance.n_products)) {
        throw std::invalid_argument("initial_estimate must have n_products entries");
      }
    }
    if ((c.mode == "regret" || c.mode == "reduction-audit") && c.policies.empty()) {
      throw std::invalid_argument("mode '" + c.mode + "' needs at least one policy");
    }
    if ((c.mode == "regret" || c.mode == "estimator-benchmark" ||
         c.mode == "reduction-audit") &&
        c.instance.attractions.empty()) {
      throw std::invalid_argument("instance needs true attractions for simulation");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return ExperimentConfigFromJson(j);
}

void ParallelFor(int count, int threads, const std::function<void(int)>& body) {
  const int workers = std::max(1, std::min(threads, count));
  std::vector<std::exception_ptr> errors(count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void WriteTextFile(const std::string& dir, const std::string& name, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path path = fs::path(dir) / name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  ExperimentResult result;
  // One clairvoyant per cost structure; policies without costs share one.
  const Clairvoyant shared = Clairvoyant::Compute(config.instance);
  result.optimal_decision = shared.decision();
  result.optimal_value = shared.value();

  const int n_policies = static_cast<int>(config.policies.size());
  std::vector<std::optional<Clairvoyant>> own(n_policies);
  for (int p = 0; p < n_policies; ++p) {
    if (config.policies[p].costs) {
      own[p] = Clairvoyant::Compute(config.instance, config.policies[p].costs);
    }
  }
  result.policies.resize(n_policies);
  std::vector<std::vector<std::optional<RegretTrace>>> traces(
      n_policies, std::vector<std::optional<RegretTrace>>(config.replications));
  std::vector<std::vector<std::string>> reasons(
      n_policies, std::vector<std::string>(config.replications));
  ParallelFor(n_policies * config.replications, config.threads, [&](int job) {
    const int p = job / config.replications;
    const int rep = job % config.replications;
    const Clairvoyant* c = own[p] ? &*own[p] : &shared;
    try {
      traces[p][rep] = RunPolicy(config.instance, config.policies[p], config.horizon,
                                 config.base_seed + rep, c);
    } catch (const ResourceLimitError& e) {
      reasons[p][rep] = e.what();
    }
  });

  for (int p = 0; p < n_policies; ++p) {
    PolicySummary& s = result.policies[p];
    s.kind = config.policies[p].kind;
    for (int rep = 0; rep < config.replications; ++rep) {
      if (traces[p][rep]) {
        s.runs.push_back(std::move(*traces[p][rep]));
      } else {
        s.aborted.push_back("replication " + std::to_string(rep) + ": " + reasons[p][rep]);
      }
    }
    if (s.runs.empty()) continue;
    s.mean_cum_regret.assign(config.horizon, 0.0);
    for (int t = 0; t < config.horizon; ++t) {
      double sum = 0.0;
      for (const RegretTrace& r : s.runs) sum += r.records[t].cum_regret;
      s.mean_cum_regret[t] = sum / static_cast<double>(s.runs.size());
    }
    double sum = 0.0;
    for (const RegretTrace& r : s.runs) sum += r.final_regret;
    s.final_regret_mean = sum / static_cast<double>(s.runs.size());
    double sq = 0.0;
    for (const RegretTrace& r : s.runs) {
      sq += (r.final_regret - s.final_regret_mean) * (r.final_regret - s.final_regret_mean);
    }
    s.final_regret_std =
        s.runs.size() > 1 ? std::sqrt(sq / static_cast<double>(s.runs.size() - 1)) : 0.0;
  }

  if (!config.outputs.empty()) {
    json summary;
    summary["schema"] = "mnli-summary v1";
    summary["horizon"] = config.horizon;
    summary["replications"] = config.replications;
    summary["base_seed"] = config.base_seed;
    summary["optimal_decision"] = result.optimal_decision.levels();
    summary["optimal_value"] = result.optimal_value;
    summary["policies"] = json::array();
    for (int p = 0; p < n_policies; ++p) {
      const PolicySummary& s = result.policies[p];
      const auto same_kind =
          std::count_if(config.policies.begin(), config.policies.end(),
                        [&](const PolicyConfig& c) { return c.kind == s.kind; });
      // Disambiguate repeated kinds (e.g. two oracles) by position.
      const std::string name =
          PolicyKindName(s.kind) + (same_kind > 1 ? "_" + std::to_string(p) : "");
      for (std::size_t rep = 0; rep < s.runs.size(); ++rep) {
        std::ostringstream csv;
        WriteTraceCsv(csv, s.runs[rep]);
        WriteTextFile(config.outputs, "trace_" + name + "_rep" + std::to_string(rep) + ".csv",
                      csv.str());
      }
      std::string mean = std::string(kTraceSchema) + "\ncycle,mean_cum_regret\n";
      for (std::size_t t = 0; t < s.mean_cum_regret.size(); ++t) {
        mean += CsvLine({std::to_string(t + 1), FormatDouble(s.mean_cum_regret[t])});
      }
      WriteTextFile(config.outputs, "mean_regret_" + name + ".csv", mean);
      json pj;
      pj["policy"] = name;
      pj["oracle"] = OracleSpecToJson(config.policies[p].oracle);
      pj["final_regret_mean"] = s.final_regret_mean;
      pj["final_regret_std"] = s.final_regret_std;
      pj["runs"] = json::array();
      for (const RegretTrace& r : s.runs) pj["runs"].push_back(TraceSummaryJson(r));
      pj["aborted"] = s.aborted;
      summary["policies"].push_back(pj);
    }
    WriteTextFile(config.outputs, "summary.json", summary.dump(2) + "\n");
  }
  return result;
}

double MeanPerCycleRegret(const PolicySummary& summary, int from, int to) {
  if (summary.runs.empty() || from < 0 || to <= from) {
    throw std::invalid_argument("empty regret window");
  }
  double total = 0.0;
  for (const RegretTrace& r : summary.runs) {
    const double end = r.records.at(to - 1).cum_regret;
    const double start = from > 0 ? r.records.at(from - 1).cum_regret : 0.0;
    total += end - start;
  }
  return total / static_cast<double>(summary.runs.size()) / (to - from);
}

namespace {

// Error trajectory of one estimator under the random-decision data policy.
std::vector<double> EstimatorErrorRun(const Instance& instance, EstimatorKind kind,
                                      const std::vector<double>& initial, int horizon,
                                      std::uint64_t seed) {
  const FeasibleSampler sampler(instance);
  Rng data_rng(DeriveSeed(seed, 2));
  Rng sim_rng(DeriveSeed(seed, 3));
  const int n = instance.n_products;
  const std::vector<double>& v = instance.attractions;
  auto error_of = [&](const std::vector<double>& est) {
    double sq = 0.0;
    for (int i = 0; i < n; ++i) sq += (est[i] - v[i]) * (est[i] - v[i]);
    return std::sqrt(sq);
  };

  std::vector<double> errors;
  errors.reserve(horizon + 1);
  InventoryDecision decision = sampler.Sample(data_rng);
  std::vector<double> est = initial;
  errors.push_back(error_of(est));
  if (kind == EstimatorKind::kProposed) {
    EstimatorState state(instance.unit_profits, instance.v_min, instance.v_max);
    EpochRecord record(1, decision);
    for (int t = 1; t <= horizon; ++t) {
      const CycleOutcome out =
          SimulateCycle(v, instance.arrival, decision, sim_rng, false);
      record.IngestCycle(t, out);
      if (record.complete()) {
        state.CloseEpoch(record);
        for (int i = 1; i <= n; ++i) {
          const ProductEstimate& p = state.product(i);
          if (p.count > 0) {
            est[i - 1] =
                1.0 / std::clamp(p.bounds.mu_bar, 1.0 / instance.v_max, 1.0 / instance.v_min);
          }
        }
        decision = sampler.Sample(data_rng);
        record = EpochRecord(record.epoch_index() + 1, decision);
      }
      errors.push_back(error_of(est));
    }
    return errors;
  }
  const BenchmarkKind bk = kind == EstimatorKind::kFirstCustomer ? BenchmarkKind::kFirstCustomer
                           : kind == EstimatorKind::kUntilNoPurchase
                               ? BenchmarkKind::kUntilNoPurchase
                               : BenchmarkKind::kCensorAware;
  BenchmarkEstimator estimator(bk, n);
  for (int t = 1; t <= horizon; ++t) {
    const CycleOutcome out = SimulateCycle(v, instance.arrival, decision, sim_rng,
                                           bk == BenchmarkKind::kCensorAware);
    if (estimator.ObserveCycle(decision, out)) {
      for (int i = 1; i <= n; ++i) {
        if (const auto e = estimator.Estimate(i)) {
          est[i - 1] = std::clamp(*e, instance.v_min, instance.v_max);
        }
      }
      decision = sampler.Sample(data_rng);
    }
    errors.push_back(error_of(est));
  }
  return errors;
}

}  // namespace

std::vector<EstimatorCurve> RunEstimatorBenchmark(const ExperimentConfig& config) {
  const int n_est = static_cast<int>(config.bench.estimators.size());
  const std::vector<double> initial =
      config.bench.initial_estimate
          ? *config.bench.initial_estimate
          : std::vector<double>(config.instance.n_products, config.instance.v_max);
  std::vector<std::vector<double>> runs(static_cast<std::size_t>(n_est) * config.replications);
  ParallelFor(n_est * config.replications, config.threads, [&](int job) {
    const int e = job / config.replications;
    const int rep = job % config.replications;
    const std::uint64_t seed = config.base_seed + rep;
    Instance inst = config.instance;
    if (config.bench.random_attractions) {
      Rng draw(DeriveSeed(seed, 4));
      const auto [lo, hi] = *config.bench.random_attractions;
      for (double& x : inst.attractions) x = lo + (hi - lo) * draw.Uniform();
    }
    runs[job] = EstimatorErrorRun(inst, config.bench.estimators[e], initial, config.horizon,
                                  seed);
  });

  std::vector<EstimatorCurve> curves(n_est);
  for (int e = 0; e < n_est; ++e) {
    curves[e].kind = config.bench.estimators[e];
    curves[e].mean_error.assign(config.horizon + 1, 0.0);
    for (int t = 0; t <= config.horizon; ++t) {
      double sum = 0.0;
      for (int rep = 0; rep < config.replications; ++rep) {
        sum += runs[static_cast<std::size_t>(e) * config.replications + rep][t];
      }
      curves[e].mean_error[t] = sum / config.replications;
    }
  }

  if (!config.outputs.empty()) {
    std::string csv = std::string(kTraceSchema) + "\n";
    std::vector<std::string> header = {"cycle"};
    for (const EstimatorCurve& c : curves) header.push_back(EstimatorKindName(c.kind));
    csv += CsvLine(header);
    for (int t = 0; t <= config.horizon; ++t) {
      std::vector<std::string> row = {std::to_string(t)};
      for (const EstimatorCurve& c : curves) row.push_back(FormatDouble(c.mean_error[t]));
      csv += CsvLine(row);
    }
    WriteTextFile(config.outputs, "estimator_errors.csv", csv);
  }
  return curves;
}

std::vector<ReductionAuditRun> RunReductionAudit(const ExperimentConfig& config) {
  std::vector<ReductionAuditRun> runs(config.replications);
  std::vector<std::string> paired(config.replications);
  ParallelFor(config.replications, config.threads, [&](int rep) {
    const std::uint64_t seed = config.base_seed + rep;
    const ReductionResult r =
        RunReduction(config.instance, config.policies.front(), config.horizon, seed);
    ReductionAuditRun& a = runs[rep];
    a.seed = seed;
    a.mnli_realized_total = r.mnli_realized_total;
    a.mnl_realized_total = r.mnl_realized_total;
    a.realized_equal = r.mnli_cycle_realized == r.mnl_cycle_realized &&
                       r.mnli_realized_total == r.mnl_realized_total;
    a.mnli_expected_regret = r.mnli_expected_regret;
    a.mnl_expected_regret = r.mnl_expected_regret;
    a.nesting_holds = r.nesting_holds;
    if (!config.outputs.empty()) {
      std::ostringstream csv;
      WritePairedCsv(csv, r);
      paired[rep] = csv.str();
    }
  });
  if (!config.outputs.empty()) {
    json summary = json::array();
    for (int rep = 0; rep < config.replications; ++rep) {
      WriteTextFile(config.outputs, "paired_rep" + std::to_string(rep) + ".csv", paired[rep]);
      const ReductionAuditRun& a = runs[rep];
      summary.push_back({{"seed", a.seed},
                         {"realized_equal", a.realized_equal},
                         {"mnli_realized_total", a.mnli_realized_total},
                         {"mnl_realized_total", a.mnl_realized_total},
                         {"mnli_expected_regret", a.mnli_expected_regret},
                         {"mnl_expected_regret", a.mnl_expected_regret},
                         {"nesting_holds", a.nesting_holds}});
    }
    WriteTextFile(config.outputs, "reduction_summary.json", summary.dump(2) + "\n");
  }
  return runs;
}

json EvaluateRequest(const json& request) {
  const Instance instance = InstanceFromJson(request.at("instance"));
  ProfitQuery query;
  query.decision = InventoryDecision(request.at("decision").get<std::vector<int>>());
  if (query.decision.size() != static_cast<std::size_t>(instance.n_products)) {
    throw std::invalid_argument("decision must have n_products entries");
  }
  query.attractions = VectorOr(request, "attractions", instance.attractions);
  if (query.attractions.empty()) throw std::invalid_argument("no attractions given");
  query.profits = VectorOr(request, "profits", instance.unit_profits);
  query.arrival = instance.arrival;
  std::optional<CostStructure> costs;
  if (request.contains("costs")) {
    costs = CostsFromJson(request.at("costs"));
    query.profits = costs->adjusted_profits();
  }
  EvalOptions opts;
  opts.tail_epsilon = request.value("tail_epsilon", kDefaultTailEpsilon);
  const std::string method = request.value("method", std::string("auto"));
  if (method != "auto" && method != "exact" && method != "mc") {
    throw std::invalid_argument("method must be auto, exact or mc");
  }
  json out;
  out["decision"] = query.decision.levels();
  out["feasible"] = IsFeasible(instance, query.decision);
  bool use_mc = method == "mc";
  if (!use_mc) {
    try {
      const SalesEvaluation eval = EvaluateWithSales(query, opts);
      out["method"] = "exact";
      out["value"] = ExpectedProfitExact(query, opts);
      out["expected_sales"] = eval.expected_sales;
      if (costs) {
        out["normalized_profit"] =
            ExpectedProfitGeneral(query, costs->adjusted_order_costs(), opts);
        out["raw_profit"] = ExpectedProfitRaw(query, *costs, opts);
      }
    } catch (const ResourceLimitError&) {
      if (method == "exact") throw;
      use_mc = true;
      out["fallback"] = "state budget exceeded; Monte Carlo used";
    }
  }
  if (use_mc) {
    Rng rng(request.value("seed", std::uint64_t{0}));
    const McEstimate mc = ExpectedProfitMc(query, request.value("samples", 100000), rng);
    out["method"] = "mc";
    out["value"] = mc.estimate;
    out["std_error"] = mc.std_error;
  }
  return out;
}

json OptimizeRequest(const json& request) {
  const Instance instance = InstanceFromJson(request.at("instance"));
  const std::vector<double> v = VectorOr(request, "attractions", instance.attractions);
  if (v.empty()) throw std::invalid_argument("no attractions given");
  const std::vector<double> r = VectorOr(request, "profits", instance.unit_profits);
  const OracleSpec spec =
      request.contains("oracle") ? OracleSpecFromJson(request.at("oracle")) : OracleSpec{};
  std::optional<std::vector<double>> order_costs;
  if (request.contains("order_costs")) {
    order_costs = request.at("order_costs").get<std::vector<double>>();
  }
  Rng rng(request.value("seed", std::uint64_t{0}));
  std::optional<std::span<const double>> costs;
  if (order_costs) costs = std::span<const double>(*order_costs);
  const Solution sol = SolveEpsDelta(instance, v, r, spec, rng, costs);
  json out;
  out["decision"] = sol.decision.levels();
  out["value"] = sol.value;
  out["evaluations"] = sol.evaluations;
  out["oracle"] = OracleSpecToJson(spec);
  return out;
}

}  // namespace mnli
