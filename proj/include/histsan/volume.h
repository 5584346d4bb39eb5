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

#ifndef HISTSAN_VOLUME_H_
#define HISTSAN_VOLUME_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "histsan/point.h"
#include "histsan/region.h"

namespace histsan {

// Samples per Monte Carlo block. Each block draws from its own substream, so
// estimates do not depend on how blocks are scheduled across threads.
inline constexpr int64_t kMonteCarloBlock = 8192;

struct VolumeEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int64_t samples = 0;
  int64_t hits = 0;
};

// Closed form for boxes and balls (std_error = 0). Voronoi cells use
// hit-or-miss sampling in their bounding box.
absl::StatusOr<VolumeEstimate> RegionVolume(const Region& region,
                                            int64_t samples, uint64_t seed);

struct RatioEstimate {
  double ratio = 0.0;
  double std_error = 0.0;
  int64_t samples = 0;
  int64_t hits_outer = 0;  // samples in B(q, c r) and the cell
  int64_t hits_inner = 0;  // samples in B(q, r) and the cell
};

// Estimates Vol(B(q, r) n C) / Vol(B(q, c r) n C) by sampling uniformly in
// B(q, c r). Fails with a degenerate-geometry error when no sample lands in C.
absl::StatusOr<RatioEstimate> IntersectionVolumeRatio(const Point& q, double r,
                                                      double c,
                                                      const Region& cell,
                                                      int64_t samples,
                                                      uint64_t seed);

}  // namespace histsan

#endif  // HISTSAN_VOLUME_H_
