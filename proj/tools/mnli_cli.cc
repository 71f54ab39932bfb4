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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "mnli/errors.h"
#include "mnli/harness.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::int64_t> seed;
  std::optional<int> threads;
  std::optional<int> horizon;
};

json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mnli::ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw mnli::ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

mnli::ExperimentConfig LoadFor(const Flags& flags, const std::string& mode) {
  json j = ReadJson(flags.config);
  if (j.contains("mode") && j["mode"] != mode) {
    throw mnli::ConfigError("config mode '" + j["mode"].get<std::string>() +
                            "' does not match subcommand (expects '" + mode + "')");
  }
  j["mode"] = mode;
  if (flags.seed) j["base_seed"] = *flags.seed;
  if (flags.threads) j["threads"] = *flags.threads;
  if (flags.horizon) j["horizon"] = *flags.horizon;
  if (!flags.out.empty()) j["outputs"] = flags.out;
  if (!j.contains("outputs")) j["outputs"] = "mnli_out";
  return mnli::ExperimentConfigFromJson(j);
}

int Simulate(const Flags& flags) {
  const mnli::ExperimentConfig cfg = LoadFor(flags, "regret");
  const mnli::ExperimentResult result = mnli::RunExperiment(cfg);
  std::cout << "optimal " << result.optimal_decision.ToString() << " value "
            << result.optimal_value << "\n";
  bool aborted = false;
  for (const mnli::PolicySummary& s : result.policies) {
    std::cout << mnli::PolicyKindName(s.kind) << ": final regret " << s.final_regret_mean
              << " +- " << s.final_regret_std << " over " << s.runs.size() << " runs\n";
    for (const std::string& reason : s.aborted) {
      std::cerr << "aborted: " << reason << "\n";
      aborted = true;
    }
  }
  std::cout << "outputs written to " << cfg.outputs << "\n";
  return aborted ? kExitResource : kExitOk;
}

int EstimateBench(const Flags& flags) {
  const mnli::ExperimentConfig cfg = LoadFor(flags, "estimator-benchmark");
  const auto curves = mnli::RunEstimatorBenchmark(cfg);
  const int tenth = std::max(1, cfg.horizon / 10);
  for (const mnli::EstimatorCurve& c : curves) {
    std::cout << mnli::EstimatorKindName(c.kind) << ": error at t=" << tenth << " "
              << c.mean_error[tenth] << ", at t=" << cfg.horizon << " "
              << c.mean_error.back() << "\n";
  }
  std::cout << "outputs written to " << cfg.outputs << "\n";
  return kExitOk;
}

int ReduceAudit(const Flags& flags) {
  const mnli::ExperimentConfig cfg = LoadFor(flags, "reduction-audit");
  const auto runs = mnli::RunReductionAudit(cfg);
  bool ok = true;
  for (const mnli::ReductionAuditRun& r : runs) {
    const double gap = std::abs(r.mnli_expected_regret - r.mnl_expected_regret);
    std::cout << "seed " << r.seed << ": realized " << (r.realized_equal ? "equal" : "DIFFER")
              << ", expected-regret gap " << gap << "\n";
    ok = ok && r.realized_equal && gap <= 1e-9 && r.nesting_holds;
  }
  std::cout << "outputs written to " << cfg.outputs << "\n";
  return ok ? kExitOk : kExitFailure;
}

int Passthrough(const Flags& flags, const std::string& mode) {
  json request = ReadJson(flags.config);
  if (request.contains("mode") && request["mode"] != mode) {
    throw mnli::ConfigError("config mode does not match subcommand '" + mode + "'");
  }
  if (flags.seed) request["seed"] = *flags.seed;
  json response;
  try {
    response = mode == "evaluate" ? mnli::EvaluateRequest(request)
                                  : mnli::OptimizeRequest(request);
  } catch (const json::exception& e) {
    throw mnli::ConfigError(std::string("invalid request: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw mnli::ConfigError(std::string("invalid request: ") + e.what());
  }
  std::cout << response.dump(2) << "\n";
  if (!flags.out.empty()) mnli::WriteTextFile(flags.out, mode + ".json", response.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint assortment and inventory learning toolkit"};
  app.require_subcommand(1);
  Flags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON config or request file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--seed", flags.seed, "Override the base seed");
    sub->add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--horizon", flags.horizon, "Override the horizon T")
        ->check(CLI::PositiveNumber);
  };
  auto* simulate = app.add_subcommand("simulate", "Replicated regret experiment");
  auto* bench = app.add_subcommand("estimate-bench", "Estimator error benchmark");
  auto* evaluate = app.add_subcommand("evaluate", "Expected profit of one decision");
  auto* optimize = app.add_subcommand("optimize", "Solve the static problem");
  auto* audit = app.add_subcommand("reduce-audit", "Paired MNL-bandit reduction audit");
  for (auto* sub : {simulate, bench, evaluate, optimize, audit}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (simulate->parsed()) return Simulate(flags);
    if (bench->parsed()) return EstimateBench(flags);
    if (audit->parsed()) return ReduceAudit(flags);
    if (evaluate->parsed()) return Passthrough(flags, "evaluate");
    if (optimize->parsed()) return Passthrough(flags, "optimize");
  } catch (const mnli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const mnli::ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
