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

#ifndef HISTSAN_ADVERSARY_H_
#define HISTSAN_ADVERSARY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "histsan/histogram.h"
#include "histsan/point.h"
#include "histsan/roundedness.h"

namespace histsan {

class IsolationParams {
 public:
  static absl::StatusOr<IsolationParams> Create(double c, int t);

  double c() const { return c_; }
  int t() const { return t_; }

 private:
  IsolationParams(double c, int t) : c_(c), t_(t) {}
  double c_;
  int t_;
};

struct IsolationResult {
  bool isolated = false;
  std::optional<size_t> victim;
};

// q isolates y when the closed ball B(q, c |q - y|) holds fewer than t
// points (y included). Reports the lowest isolated index.
absl::StatusOr<IsolationResult> Isolates(const Point& q, const Dataset& data,
                                         const IsolationParams& params);

// As above, skipping victims flagged in `excluded` (which may be empty).
IsolationResult IsolatesExcluding(std::span<const double> q,
                                  const Dataset& data,
                                  const IsolationParams& params,
                                  const std::vector<bool>& excluded);

enum class AttackStrategy { kUniformInLeaf, kLeafCenterWeighted, kAuxInformed };

std::string_view StrategyName(AttackStrategy strategy);
absl::StatusOr<AttackStrategy> ParseStrategy(std::string_view name);

struct AttackOptions {
  AttackStrategy strategy = AttackStrategy::kUniformInLeaf;
  int64_t queries = 10000;
  uint64_t seed = 0;
  // Points whose coordinates the adversary knows. Only valid for
  // kAuxInformed.
  std::optional<std::vector<size_t>> aux_indices;
  int certify_samples = kDefaultCertifySamples;
};

struct IsolationReport {
  AttackStrategy strategy = AttackStrategy::kUniformInLeaf;
  int64_t queries = 0;
  int64_t successes = 0;
  double rate = 0.0;
  // Victim index -> number of queries isolating it.
  std::map<size_t, int64_t> per_point_hits;
  int64_t aux_subset_size = 0;
};

absl::StatusOr<IsolationReport> Attack(const SanitizedHistogram& histogram,
                                       const Dataset& data,
                                       const IsolationParams& params,
                                       const AttackOptions& options);

// round(fraction * n) distinct indices chosen by a seeded shuffle, sorted.
absl::StatusOr<std::vector<size_t>> ChooseAuxSubset(size_t n, double fraction,
                                                    uint64_t seed);

}  // namespace histsan

#endif  // HISTSAN_ADVERSARY_H_
