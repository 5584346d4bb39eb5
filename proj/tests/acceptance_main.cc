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

// Runs the acceptance experiments and prints one PASS/FAIL line each.
// A criterion passes when its experiment passes within its time allowance.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <vector>

#include "CLI11.hpp"
#include "histsan/experiments.h"
#include "histsan/json_io.h"
#include "histsan/parallel.h"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance experiments for histsan"};
  int criterion = 0;
  uint64_t seed = 20260101;
  int threads = 0;
  bool verbose = false;
  app.add_option("--criterion", criterion, "Run only this criterion (1-10); 0 runs all")
      ->check(CLI::Range(0, histsan::kNumCriteria));
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--threads", threads, "Worker threads, 0 = auto");
  app.add_flag("--verbose", verbose, "Print the raw numbers of each experiment");
  CLI11_PARSE(app, argc, argv);
  histsan::SetNumThreads(threads);

  std::vector<int> ids;
  if (criterion == 0) {
    for (int i = 1; i <= histsan::kNumCriteria; ++i) ids.push_back(i);
  } else {
    ids.push_back(criterion);
  }
  int failures = 0;
  for (int id : ids) {
    const auto start = std::chrono::steady_clock::now();
    absl::StatusOr<histsan::ExperimentResult> result = histsan::RunCriterion(id, seed);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double limit = histsan::CriterionTimeLimitSeconds(id);
    if (!result.ok()) {
      std::printf("criterion %d: FAIL (error: %s) [%.1fs]\n", id,
                  std::string(result.status().ToString()).c_str(), seconds);
      ++failures;
      continue;
    }
    const bool in_time = seconds <= limit;
    const bool passed = result->passed && in_time;
    std::printf("criterion %d (%s): %s [%.1fs of %.0fs]%s\n", id, result->name.c_str(),
                passed ? "PASS" : "FAIL", seconds, limit,
                in_time ? "" : " time allowance exceeded");
    if (verbose || !passed) {
      std::printf("  %s", histsan::DumpDocument(result->details).c_str());
    }
    std::fflush(stdout);
    if (!passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
