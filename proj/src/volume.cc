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

#include "histsan/volume.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"
#include "histsan/parallel.h"
#include "histsan/random.h"
#include "histsan/status_macros.h"

namespace histsan {
namespace {

struct BlockCounts {
  int64_t first = 0;
  int64_t second = 0;
};

int64_t NumBlocks(int64_t samples) {
  return (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
}

int64_t BlockSize(int64_t block, int64_t samples) {
  return std::min(kMonteCarloBlock, samples - block * kMonteCarloBlock);
}

}  // namespace

absl::StatusOr<VolumeEstimate> RegionVolume(const Region& region,
                                            int64_t samples, uint64_t seed) {
  if (std::optional<double> exact = region.ExactVolume(); exact.has_value()) {
    return VolumeEstimate{*exact, 0.0, 0, 0};
  }
  if (samples <= 0) return InputError("sample count must be positive");
  const double box_volume = region.BoundsVolume();
  if (!std::isfinite(box_volume)) return InputError("region is unbounded");

  const RandomStream stream = RandomStream(seed).Fork(stream_tag::kVolume);
  const int64_t blocks = NumBlocks(samples);
  std::vector<BlockCounts> counts(blocks);
  ParallelFor(blocks, [&](size_t b) {
    std::mt19937_64 engine = stream.Fork(b).Engine();
    std::vector<double> x(region.dim());
    const int64_t n = BlockSize(b, samples);
    for (int64_t i = 0; i < n; ++i) {
      for (size_t k = 0; k < x.size(); ++k) {
        const double lo = region.bounds_low()[k];
        x[k] = lo + (region.bounds_high()[k] - lo) * UniformUnit(engine);
      }
      if (region.Contains(x)) ++counts[b].first;
    }
  });
  int64_t hits = 0;
  for (const BlockCounts& c : counts) hits += c.first;
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  VolumeEstimate result;
  result.estimate = p * box_volume;
  result.std_error =
      box_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  result.samples = samples;
  result.hits = hits;
  return result;
}

absl::StatusOr<RatioEstimate> IntersectionVolumeRatio(const Point& q, double r,
                                                      double c,
                                                      const Region& cell,
                                                      int64_t samples,
                                                      uint64_t seed) {
  if (q.dim() != cell.dim()) {
    return InputError(absl::StrCat("dimension mismatch: q has ", q.dim(),
                                   ", cell has ", cell.dim()));
  }
  if (!(r > 0.0)) return InputError("radius must be positive");
  if (!(c > 1.0)) return InputError("c must exceed 1");
  if (samples <= 0) return InputError("sample count must be positive");

  const double outer = c * r;
  const double inner2 = r * r;
  const RandomStream stream = RandomStream(seed).Fork(stream_tag::kRatio);
  const int64_t blocks = NumBlocks(samples);
  std::vector<BlockCounts> counts(blocks);
  ParallelFor(blocks, [&](size_t b) {
    std::mt19937_64 engine = stream.Fork(b).Engine();
    std::vector<double> x(q.dim());
    const int64_t n = BlockSize(b, samples);
    for (int64_t i = 0; i < n; ++i) {
      UniformInBall(engine, q.coords(), outer, x);
      if (!cell.Contains(x)) continue;
      ++counts[b].first;
      if (SquaredDistance(x, q.coords()) <= inner2) ++counts[b].second;
    }
  });
  RatioEstimate result;
  result.samples = samples;
  for (const BlockCounts& block : counts) {
    result.hits_outer += block.first;
    result.hits_inner += block.second;
  }
  if (result.hits_outer == 0) {
    return DegenerateGeometryError(absl::StrCat(
        "no sample of B(q, c r) fell inside the cell after ", samples,
        " samples"));
  }
  const double n = static_cast<double>(result.hits_outer);
  result.ratio = static_cast<double>(result.hits_inner) / n;
  result.std_error = std::sqrt(result.ratio * (1.0 - result.ratio) / n);
  return result;
}

}  // namespace histsan
