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

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mnli/errors.h"
#include "mnli/estimation.h"
#include "mnli/harness.h"
#include "mnli/instance.h"
#include "mnli/policy.h"

namespace py = pybind11;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python wrapper handles dicts.
std::string Evaluate(const std::string& request) {
  return mnli::EvaluateRequest(json::parse(request)).dump();
}

std::string Optimize(const std::string& request) {
  return mnli::OptimizeRequest(json::parse(request)).dump();
}

std::string Simulate(const std::string& config) {
  const mnli::ExperimentConfig c = mnli::ExperimentConfigFromJson(json::parse(config));
  const mnli::ExperimentResult r = mnli::RunExperiment(c);
  json out;
  out["optimal_decision"] = r.optimal_decision.levels();
  out["optimal_value"] = r.optimal_value;
  out["policies"] = json::array();
  for (const mnli::PolicySummary& s : r.policies) {
    out["policies"].push_back({{"policy", mnli::PolicyKindName(s.kind)},
                               {"final_regret_mean", s.final_regret_mean},
                               {"final_regret_std", s.final_regret_std},
                               {"mean_cum_regret", s.mean_cum_regret},
                               {"aborted", s.aborted}});
  }
  return out.dump();
}

double ChoiceProbability(const std::vector<double>& attractions,
                         const std::vector<int>& assortment, int product) {
  return mnli::ChoiceProbability(attractions, assortment, product);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MNL joint assortment-inventory learning core";

  py::register_exception<mnli::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<mnli::ResourceLimitError>(m, "ResourceLimitError", PyExc_RuntimeError);

  m.def("_evaluate", &Evaluate, py::arg("request"), py::call_guard<py::gil_scoped_release>());
  m.def("_optimize", &Optimize, py::arg("request"), py::call_guard<py::gil_scoped_release>());
  m.def("_simulate", &Simulate, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("choice_probability", &ChoiceProbability, py::arg("attractions"),
        py::arg("assortment"), py::arg("product"),
        "MNL probability that a customer offered `assortment` picks `product` (0 = none).");
  m.def("confidence_radius", &mnli::ConfidenceRadius, py::arg("mu_bar"), py::arg("count"),
        py::arg("n_products"), py::arg("epoch_index"));
  m.def("exploration_threshold", &mnli::ExplorationThreshold, py::arg("n_products"),
        py::arg("epoch_index"));
}
