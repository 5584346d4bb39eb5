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

#ifndef HISTSAN_SANITIZER_H_
#define HISTSAN_SANITIZER_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "histsan/datagen.h"
#include "histsan/histogram.h"
#include "histsan/point.h"
#include "histsan/region.h"
#include "histsan/roundedness.h"

namespace histsan {

inline constexpr int64_t kDefaultNodeBudget = int64_t{1} << 22;

struct CubeOptions {
  int t = 2;
  int max_depth = 8;
  int64_t node_budget = kDefaultNodeBudget;
};

struct GridOptions {
  int t = 2;
  int max_depth = 8;
  uint64_t seed = 0;
  int64_t node_budget = kDefaultNodeBudget;
  // Fixes the grid offset instead of drawing it from the seed.
  std::optional<Point> offset;
};

struct VoronoiOptions {
  int t = 2;
  int max_depth = 3;
  CenterMethod centers = CenterMethod::kGreedySpread;
  uint64_t seed = 0;
  int64_t centers_budget = int64_t{1} << 20;
  int64_t probe_samples = 100000;
  std::optional<int64_t> override_m;
  int certify_samples = kDefaultCertifySamples;
  int64_t node_budget = kDefaultNodeBudget;
};

// Dyadic subcubes of [-1,1]^d; a node splits into 2^d children when it holds
// at least 2t points and is above max_depth.
absl::StatusOr<HistogramTree> BuildRecursiveCubeTree(const Dataset& data,
                                                     const CubeOptions& options);
absl::StatusOr<SanitizedHistogram> BuildRecursiveCube(
    const Dataset& data, const CubeOptions& options);

// Per-axis cut positions of the merged level-`level` mesh: grid lines
// offset + j * 4 * 2^-level strictly inside (-1, 1), minus the outermost
// line on each side when at least two lines exist.
std::vector<double> MergedGridCuts(double offset, int level);

// Nested meshes at a shared random offset with surface strips merged into
// their interior neighbours. Levels that do not cut a node are skipped.
absl::StatusOr<HistogramTree> BuildShiftedGridTree(const Dataset& data,
                                                   const GridOptions& options);
absl::StatusOr<SanitizedHistogram> BuildShiftedGrid(const Dataset& data,
                                                    const GridOptions& options);

// Recursive Voronoi subdivision of a ball or box support; a node splits when
// it holds more than t points and is above max_depth.
absl::StatusOr<HistogramTree> BuildVoronoiTree(const Dataset& data,
                                               RegionPtr support,
                                               const VoronoiOptions& options);
absl::StatusOr<SanitizedHistogram> BuildVoronoi(const Dataset& data,
                                                RegionPtr support,
                                                const VoronoiOptions& options);

// Single pass over `probe_samples` uniform points of the region: a probe
// becomes a center when it is at least radius/4 from every earlier center.
absl::StatusOr<std::vector<Point>> PickCentersGreedy(
    const Region& region, const RoundnessCertificate& cert,
    int64_t probe_samples, uint64_t seed);

// 4 d 8^d, saturating at INT64_MAX.
int64_t DefaultUniformCenterCount(size_t dim);

absl::StatusOr<std::vector<Point>> PickCentersUniform(
    const Region& region, std::optional<int64_t> override_m,
    int64_t centers_budget, uint64_t seed);

// Drops member lists. Fails with an internal error if a published
// coordinate equals a data point or counts do not sum to the dataset size.
absl::StatusOr<SanitizedHistogram> StripToSanitized(const HistogramTree& tree,
                                                    const Dataset& data);

uint64_t ComponentSeed(uint64_t seed, int component);

// Sanitizes each component's points over its own support region.
absl::StatusOr<std::vector<SanitizedHistogram>> SanitizeMixture(
    const Dataset& data, const std::vector<int>& labels,
    const DistributionSpec& spec, const VoronoiOptions& options);

}  // namespace histsan

#endif  // HISTSAN_SANITIZER_H_
