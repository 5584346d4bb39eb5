//
// Copyright 2026 The Histsan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef HISTSAN_EXPERIMENTS_H_
#define HISTSAN_EXPERIMENTS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "histsan/json_io.h"

namespace histsan {

// Outcome of one end-to-end experiment: a verdict plus every raw number it
// was based on. Details are a deterministic function of the seed.
struct ExperimentResult {
  std::string name;
  bool passed = false;
  Json details;
};

inline constexpr int kNumCriteria = 10;

// Acceptance experiment `id` in [1, kNumCriteria] with its documented
// parameters.
absl::StatusOr<ExperimentResult> RunCriterion(int id, uint64_t seed);

// Wall-clock allowance for criterion `id`, in seconds.
double CriterionTimeLimitSeconds(int id);

// Named reproduction suites for the CLI.
const std::vector<std::string>& SuiteNames();
absl::StatusOr<ExperimentResult> RunSuite(std::string_view name, uint64_t seed);

// Smallest q with P(Binomial(n, p) <= q) >= level.
int64_t BinomialQuantile(int64_t n, double p, double level);

}  // namespace histsan

#endif  // HISTSAN_EXPERIMENTS_H_
