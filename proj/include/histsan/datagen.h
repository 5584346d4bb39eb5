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

#ifndef HISTSAN_DATAGEN_H_
#define HISTSAN_DATAGEN_H_

#include <cstdint>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "histsan/point.h"
#include "histsan/region.h"

namespace histsan {

struct UniformCube {
  Point center;
  double half_side = 1.0;
};

struct UniformBall {
  Point center;
  double radius = 1.0;
};

// Gaussian conditioned on lying within `truncation_radius` of its mean.
struct TruncatedGaussian {
  Point mean;
  double stdev = 1.0;
  double truncation_radius = 0.0;
};

double DefaultTruncationRadius(double stdev, size_t dim);

using Shape = std::variant<UniformCube, UniformBall, TruncatedGaussian>;

struct MixtureComponent {
  double weight = 1.0;
  Shape shape;
};

// A finite mixture of bounded "nice" shapes in a common dimension.
class DistributionSpec {
 public:
  static absl::StatusOr<DistributionSpec> Create(
      std::vector<MixtureComponent> components);

  size_t dim() const { return dim_; }
  const std::vector<MixtureComponent>& components() const {
    return components_;
  }

 private:
  size_t dim_ = 0;
  std::vector<MixtureComponent> components_;
};

// The bounded support of a shape: a closed box for cubes, a ball otherwise.
absl::StatusOr<RegionPtr> SupportRegion(const Shape& shape);

struct LabeledSample {
  Dataset data;
  // Generating component of each point. Kept for per-component
  // sanitization; never written into sanitized output.
  std::vector<int> labels;
};

// n i.i.d. draws. Point i uses its own substream, so the result is a pure
// function of (spec, n, seed).
absl::StatusOr<LabeledSample> SampleDataset(const DistributionSpec& spec,
                                            int64_t n, uint64_t seed);

}  // namespace histsan

#endif  // HISTSAN_DATAGEN_H_
