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

#ifndef MNLI_ERRORS_H_
#define MNLI_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mnli {

// Raised when a computation would exceed a configured size budget (DP states,
// enumeration size). Callers are expected to fall back to Monte Carlo or a
// smaller instance.
class ResourceLimitError : public std::runtime_error {
 public:
  ResourceLimitError(const std::string& what, std::size_t budget)
      : std::runtime_error(what + " (budget " + std::to_string(budget) + ")"),
        budget_(budget) {}

  std::size_t budget() const { return budget_; }

 private:
  std::size_t budget_;
};

// An operation was called in a state where its precondition does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Observed data contradicts an internal invariant (e.g. a purchase of a
// product that was never stocked).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mnli

#endif  // MNLI_ERRORS_H_
