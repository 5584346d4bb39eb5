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

#include "histsan/datagen.h"

#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"
#include "histsan/random.h"
#include "histsan/status_macros.h"

namespace histsan {
namespace {

size_t ShapeDim(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TruncatedGaussian>) {
          return s.mean.dim();
        } else {
          return s.center.dim();
        }
      },
      shape);
}

absl::Status ValidateShape(const Shape& shape) {
  if (const auto* cube = std::get_if<UniformCube>(&shape)) {
    HISTSAN_RETURN_IF_ERROR(Point::Create(cube->center.values()).status());
    if (!(cube->half_side > 0.0)) return InputError("cube half side must be positive");
  } else if (const auto* ball = std::get_if<UniformBall>(&shape)) {
    HISTSAN_RETURN_IF_ERROR(Point::Create(ball->center.values()).status());
    if (!(ball->radius > 0.0)) return InputError("ball radius must be positive");
  } else {
    const auto& gauss = std::get<TruncatedGaussian>(shape);
    HISTSAN_RETURN_IF_ERROR(Point::Create(gauss.mean.values()).status());
    if (!(gauss.stdev > 0.0)) return InputError("Gaussian stdev must be positive");
    if (!(gauss.truncation_radius > 0.0)) {
      return InputError("Gaussian truncation radius must be positive");
    }
  }
  return absl::OkStatus();
}

// Draws one point of the shape. Returns the number of attempts used, or 0 when
// `max_attempts` ran out.
int64_t DrawFromShape(const Shape& shape, std::mt19937_64& engine,
                      int64_t max_attempts, std::span<double> out) {
  const size_t d = out.size();
  if (const auto* cube = std::get_if<UniformCube>(&shape)) {
    for (size_t k = 0; k < d; ++k) {
      out[k] = cube->center[k] +
               cube->half_side * (2.0 * UniformUnit(engine) - 1.0);
    }
    return 1;
  }
  if (const auto* ball = std::get_if<UniformBall>(&shape)) {
    const double r2 = ball->radius * ball->radius;
    for (int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
      UniformInBall(engine, ball->center.coords(), ball->radius, out);
      if (SquaredDistance(out, ball->center.coords()) <= r2) return attempt;
    }
    return 0;
  }
  const auto& gauss = std::get<TruncatedGaussian>(shape);
  const double r2 = gauss.truncation_radius * gauss.truncation_radius;
  for (int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    for (size_t k = 0; k < d; ++k) {
      out[k] = gauss.mean[k] + gauss.stdev * StandardNormal(engine);
    }
    if (SquaredDistance(out, gauss.mean.coords()) <= r2) return attempt;
  }
  return 0;
}

}  // namespace

double DefaultTruncationRadius(double stdev, size_t dim) {
  return 4.0 * stdev * std::sqrt(static_cast<double>(dim));
}

absl::StatusOr<DistributionSpec> DistributionSpec::Create(
    std::vector<MixtureComponent> components) {
  if (components.empty()) return InputError("distribution needs a component");
  const size_t dim = ShapeDim(components.front().shape);
  if (dim == 0) return InputError("distribution dimension must be >= 1");
  double total = 0.0;
  for (size_t i = 0; i < components.size(); ++i) {
    const MixtureComponent& c = components[i];
    if (!(c.weight > 0.0 && c.weight <= 1.0)) {
      return InputError(absl::StrCat("component ", i, " weight must lie in (0, 1]"));
    }
    if (ShapeDim(c.shape) != dim) {
      return InputError(absl::StrCat("component ", i, " has dimension ",
                                     ShapeDim(c.shape), ", expected ", dim));
    }
    HISTSAN_RETURN_IF_ERROR(ValidateShape(c.shape));
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    return InputError(absl::StrCat("component weights sum to ", total, ", not 1"));
  }
  DistributionSpec spec;
  spec.dim_ = dim;
  spec.components_ = std::move(components);
  return spec;
}

absl::StatusOr<RegionPtr> SupportRegion(const Shape& shape) {
  if (const auto* cube = std::get_if<UniformCube>(&shape)) {
    Point low = cube->center;
    Point high = cube->center;
    for (size_t k = 0; k < low.dim(); ++k) {
      low[k] -= cube->half_side;
      high[k] += cube->half_side;
    }
    return Region::ClosedBox(std::move(low), std::move(high));
  }
  if (const auto* ball = std::get_if<UniformBall>(&shape)) {
    return Region::Ball(ball->center, ball->radius);
  }
  const auto& gauss = std::get<TruncatedGaussian>(shape);
  return Region::Ball(gauss.mean, gauss.truncation_radius);
}

absl::StatusOr<LabeledSample> SampleDataset(const DistributionSpec& spec,
                                            int64_t n, uint64_t seed) {
  if (n <= 0) return InputError("sample size must be positive");
  const RandomStream stream = RandomStream(seed).Fork(stream_tag::kSample);
  const int64_t budget = 1000 * n;
  int64_t attempts = 0;

  std::vector<Point> points;
  std::vector<int> labels;
  points.reserve(n);
  labels.reserve(n);
  const std::vector<MixtureComponent>& components = spec.components();
  for (int64_t i = 0; i < n; ++i) {
    std::mt19937_64 engine = stream.Fork(i).Engine();
    const double u = UniformUnit(engine);
    int label = static_cast<int>(components.size()) - 1;
    double cumulative = 0.0;
    for (size_t c = 0; c < components.size(); ++c) {
      cumulative += components[c].weight;
      if (u < cumulative) {
        label = static_cast<int>(c);
        break;
      }
    }
    std::vector<double> coords(spec.dim());
    const int64_t used = DrawFromShape(components[label].shape, engine,
                                       budget - attempts, coords);
    attempts += used;
    if (used == 0 || attempts > budget) {
      return ConfigurationError(absl::StrCat(
          "rejection sampling exceeded ", budget,
          " attempts; the truncation radius is too small"));
    }
    points.emplace_back(std::move(coords));
    labels.push_back(label);
  }
  HISTSAN_ASSIGN_OR_RETURN(Dataset data,
                           Dataset::Create(spec.dim(), std::move(points)));
  return LabeledSample{std::move(data), std::move(labels)};
}

}  // namespace histsan
