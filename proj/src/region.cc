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

#include "histsan/region.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "absl/strings/str_cat.h"
#include "bounding_lp.h"
#include "histsan/random.h"
#include "histsan/status_macros.h"

namespace histsan {
namespace {

// Consecutive rejections tolerated before a cell is declared degenerate.
constexpr int64_t kMaxRejections = 4'000'000;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

absl::Status CheckFinite(const Point& p, absl::string_view what) {
  for (double v : p.coords()) {
    if (!std::isfinite(v)) {
      return InputError(absl::StrCat(what, " has a non-finite coordinate"));
    }
  }
  if (p.dim() == 0) return InputError(absl::StrCat(what, " has dimension 0"));
  return absl::OkStatus();
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

// Largest value of face.normal . x over the box [low, high].
double MaxOverBox(const Halfspace& face, const Point& low, const Point& high) {
  double sum = 0.0;
  for (size_t k = 0; k < low.dim(); ++k) {
    sum += std::max(face.normal[k] * low[k], face.normal[k] * high[k]);
  }
  return sum;
}

double FaceScale(const Halfspace& face, const Point& low, const Point& high) {
  double scale = std::abs(face.offset);
  for (size_t k = 0; k < low.dim(); ++k) {
    scale += std::abs(face.normal[k]) *
             std::max(std::abs(low[k]), std::abs(high[k]));
  }
  return scale;
}

}  // namespace

absl::StatusOr<RegionPtr> Region::Box(Point low, Point high,
                                      std::vector<bool> closed_high) {
  HISTSAN_RETURN_IF_ERROR(CheckFinite(low, "box low corner"));
  HISTSAN_RETURN_IF_ERROR(CheckFinite(high, "box high corner"));
  if (low.dim() != high.dim()) return InputError("box corners differ in dimension");
  if (closed_high.size() != low.dim()) {
    return InputError("closed_high must have one flag per axis");
  }
  for (size_t k = 0; k < low.dim(); ++k) {
    if (!(low[k] < high[k])) {
      return InputError(absl::StrCat("box needs low < high on axis ", k));
    }
  }
  Point bounds_low = low;
  Point bounds_high = high;
  return RegionPtr(new Region(
      BoxData{std::move(low), std::move(high), std::move(closed_high)},
      std::move(bounds_low), std::move(bounds_high)));
}

absl::StatusOr<RegionPtr> Region::ClosedBox(Point low, Point high) {
  std::vector<bool> closed(low.dim(), true);
  return Box(std::move(low), std::move(high), std::move(closed));
}

absl::StatusOr<RegionPtr> Region::Ball(Point center, double radius) {
  HISTSAN_RETURN_IF_ERROR(CheckFinite(center, "ball center"));
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    return InputError("ball radius must be positive and finite");
  }
  Point low = center;
  Point high = center;
  for (size_t k = 0; k < center.dim(); ++k) {
    low[k] -= radius;
    high[k] += radius;
  }
  return RegionPtr(new Region(BallData{std::move(center), radius},
                              std::move(low), std::move(high)));
}

absl::StatusOr<RegionPtr> Region::VoronoiClip(CenterList centers,
                                              size_t own_index,
                                              RegionPtr parent) {
  if (parent == nullptr) return InputError("Voronoi cell needs a parent region");
  if (centers == nullptr || own_index >= centers->size()) {
    return InputError("Voronoi own index out of range");
  }
  const size_t d = parent->dim();
  for (size_t j = 0; j < centers->size(); ++j) {
    if ((*centers)[j].dim() != d) {
      return InputError(absl::StrCat("Voronoi center ", j, " has dimension ",
                                     (*centers)[j].dim(), ", expected ", d));
    }
    HISTSAN_RETURN_IF_ERROR(CheckFinite((*centers)[j], "Voronoi center"));
  }
  const Point& own = (*centers)[own_index];
  if (!parent->Contains(own.coords())) {
    return InputError("Voronoi own center lies outside the parent region");
  }

  std::vector<Halfspace> candidates;
  candidates.reserve(centers->size());
  const double own_norm2 = Dot(own.coords(), own.coords());
  for (size_t j = 0; j < centers->size(); ++j) {
    if (j == own_index) continue;
    const Point& other = (*centers)[j];
    if (other == own) {
      return InputError("Voronoi own center appears more than once");
    }
    Halfspace face;
    face.normal.resize(d);
    for (size_t k = 0; k < d; ++k) face.normal[k] = other[k] - own[k];
    face.offset = 0.5 * (Dot(other.coords(), other.coords()) - own_norm2);
    candidates.push_back(std::move(face));
  }
  if (parent->kind() == RegionKind::kVoronoi) {
    for (const Halfspace& face : parent->voronoi().faces) {
      candidates.push_back(face);
    }
  }

  Point low = parent->bounds_low();
  Point high = parent->bounds_high();
  std::vector<double> objective(d, 0.0);
  for (size_t k = 0; k < d; ++k) {
    const double pad = 1e-9 * (1.0 + high[k] - low[k]);
    objective.assign(d, 0.0);
    objective[k] = 1.0;
    std::optional<double> upper = internal::MaximizeOverPolytope(
        candidates, parent->bounds_low().coords(),
        parent->bounds_high().coords(), objective);
    objective[k] = -1.0;
    std::optional<double> lower = internal::MaximizeOverPolytope(
        candidates, parent->bounds_low().coords(),
        parent->bounds_high().coords(), objective);
    if (upper.has_value()) {
      high[k] = std::min(parent->bounds_high()[k], *upper + pad);
    }
    if (lower.has_value()) {
      low[k] = std::max(parent->bounds_low()[k], -*lower - pad);
    }
    // The own center is inside the cell, so the bounds must contain it.
    low[k] = std::min(low[k], own[k]);
    high[k] = std::max(high[k], own[k]);
  }

  std::vector<Halfspace> faces;
  for (Halfspace& face : candidates) {
    const double margin = 1e-12 * FaceScale(face, low, high);
    if (MaxOverBox(face, low, high) > face.offset - margin) {
      faces.push_back(std::move(face));
    }
  }

  return RegionPtr(new Region(
      VoronoiData{std::move(centers), own_index, std::move(parent),
                  std::move(faces)},
      std::move(low), std::move(high)));
}

RegionKind Region::kind() const {
  switch (data_.index()) {
    case 0:
      return RegionKind::kBox;
    case 1:
      return RegionKind::kBall;
    default:
      return RegionKind::kVoronoi;
  }
}

bool Region::Contains(std::span<const double> x) const {
  switch (kind()) {
    case RegionKind::kBox: {
      const BoxData& b = box();
      for (size_t k = 0; k < x.size(); ++k) {
        if (x[k] < b.low[k]) return false;
        if (b.closed_high[k] ? x[k] > b.high[k] : x[k] >= b.high[k]) {
          return false;
        }
      }
      return true;
    }
    case RegionKind::kBall: {
      const BallData& b = ball();
      return SquaredDistance(x, b.center.coords()) <= b.radius * b.radius;
    }
    case RegionKind::kVoronoi: {
      const VoronoiData& v = voronoi();
      const std::vector<Point>& centers = *v.centers;
      const double own = SquaredDistance(x, centers[v.own_index].coords());
      for (size_t j = 0; j < centers.size(); ++j) {
        if (j == v.own_index) continue;
        const double other = SquaredDistance(x, centers[j].coords());
        if (j < v.own_index ? other <= own : other < own) return false;
      }
      return v.parent->Contains(x);
    }
  }
  return false;
}

bool Region::ContainsApprox(std::span<const double> x) const {
  if (kind() != RegionKind::kVoronoi) return Contains(x);
  for (size_t k = 0; k < x.size(); ++k) {
    if (x[k] < bounds_low_[k] || x[k] > bounds_high_[k]) return false;
  }
  for (const Halfspace& face : voronoi().faces) {
    if (Dot(face.normal, x) > face.offset) return false;
  }
  return Root().Contains(x);
}

absl::StatusOr<bool> Region::Membership(const Point& x) const {
  if (x.dim() != dim()) {
    return InputError(absl::StrCat("dimension mismatch: point has ", x.dim(),
                                   ", region has ", dim()));
  }
  return Contains(x.coords());
}

double Region::BoundsVolume() const {
  double volume = 1.0;
  for (size_t k = 0; k < dim(); ++k) volume *= bounds_high_[k] - bounds_low_[k];
  return volume;
}

std::optional<double> Region::ExactVolume() const {
  switch (kind()) {
    case RegionKind::kBox:
      return BoundsVolume();
    case RegionKind::kBall:
      return BallVolume(dim(), ball().radius);
    case RegionKind::kVoronoi:
      return std::nullopt;
  }
  return std::nullopt;
}

const Region& Region::Root() const {
  const Region* region = this;
  while (region->kind() == RegionKind::kVoronoi) {
    region = region->voronoi().parent.get();
  }
  return *region;
}

const Region* Region::parent() const {
  if (kind() != RegionKind::kVoronoi) return nullptr;
  return voronoi().parent.get();
}

double Region::RayExit(std::span<const double> origin,
                       std::span<const double> direction) const {
  switch (kind()) {
    case RegionKind::kBox: {
      const BoxData& b = box();
      double exit = kInfinity;
      for (size_t k = 0; k < origin.size(); ++k) {
        if (direction[k] > 0.0) {
          exit = std::min(exit, (b.high[k] - origin[k]) / direction[k]);
        } else if (direction[k] < 0.0) {
          exit = std::min(exit, (b.low[k] - origin[k]) / direction[k]);
        }
      }
      return std::max(0.0, exit);
    }
    case RegionKind::kBall: {
      const BallData& b = ball();
      double proj = 0.0;
      double offset2 = 0.0;
      for (size_t k = 0; k < origin.size(); ++k) {
        const double diff = origin[k] - b.center[k];
        proj += diff * direction[k];
        offset2 += diff * diff;
      }
      const double disc = proj * proj - (offset2 - b.radius * b.radius);
      return std::max(0.0, -proj + std::sqrt(std::max(0.0, disc)));
    }
    case RegionKind::kVoronoi: {
      double exit = Root().RayExit(origin, direction);
      for (const Halfspace& face : voronoi().faces) {
        const double rate = Dot(face.normal, direction);
        if (rate > 0.0) {
          exit = std::min(exit, (face.offset - Dot(face.normal, origin)) / rate);
        }
      }
      for (size_t k = 0; k < origin.size(); ++k) {
        if (direction[k] > 0.0) {
          exit = std::min(exit, (bounds_high_[k] - origin[k]) / direction[k]);
        } else if (direction[k] < 0.0) {
          exit = std::min(exit, (bounds_low_[k] - origin[k]) / direction[k]);
        }
      }
      return std::max(0.0, exit);
    }
  }
  return 0.0;
}

double Region::DistanceToBoundary(std::span<const double> p) const {
  switch (kind()) {
    case RegionKind::kBox: {
      const BoxData& b = box();
      double dist = kInfinity;
      for (size_t k = 0; k < p.size(); ++k) {
        dist = std::min({dist, p[k] - b.low[k], b.high[k] - p[k]});
      }
      return std::max(0.0, dist);
    }
    case RegionKind::kBall: {
      const BallData& b = ball();
      return std::max(0.0,
                      b.radius - UncheckedDistance(p, b.center.coords()));
    }
    case RegionKind::kVoronoi: {
      double dist = Root().DistanceToBoundary(p);
      for (const Halfspace& face : voronoi().faces) {
        const double norm = std::sqrt(Dot(face.normal, face.normal));
        dist = std::min(dist, (face.offset - Dot(face.normal, p)) / norm);
      }
      return std::max(0.0, dist);
    }
  }
  return 0.0;
}

Point Region::NominalCenter() const {
  switch (kind()) {
    case RegionKind::kBox: {
      Point center = box().low;
      for (size_t k = 0; k < dim(); ++k) {
        center[k] = 0.5 * (box().low[k] + box().high[k]);
      }
      return center;
    }
    case RegionKind::kBall:
      return ball().center;
    case RegionKind::kVoronoi:
      return own_center();
  }
  return Point();
}

absl::Status Region::SampleUniform(std::mt19937_64& engine,
                                   std::span<double> out, bool exact) const {
  switch (kind()) {
    case RegionKind::kBox:
      for (size_t k = 0; k < out.size(); ++k) {
        const double lo = box().low[k];
        const double hi = box().high[k];
        out[k] = lo + (hi - lo) * UniformUnit(engine);
        if (out[k] >= hi && !box().closed_high[k]) out[k] = lo;
      }
      return absl::OkStatus();
    case RegionKind::kBall:
      UniformInBall(engine, ball().center.coords(), ball().radius, out);
      return absl::OkStatus();
    case RegionKind::kVoronoi:
      for (int64_t attempt = 0; attempt < kMaxRejections; ++attempt) {
        for (size_t k = 0; k < out.size(); ++k) {
          out[k] = bounds_low_[k] +
                   (bounds_high_[k] - bounds_low_[k]) * UniformUnit(engine);
        }
        if (ContainsApprox(out) && (!exact || Contains(out))) {
          return absl::OkStatus();
        }
      }
      return DegenerateGeometryError(absl::StrCat(
          "rejection sampling found no point of the Voronoi cell after ",
          kMaxRejections, " attempts"));
  }
  return absl::OkStatus();
}

absl::StatusOr<Point> Region::SampleUniform(std::mt19937_64& engine) const {
  std::vector<double> coords(dim());
  HISTSAN_RETURN_IF_ERROR(SampleUniform(engine, coords));
  return Point(std::move(coords));
}

double BallVolume(size_t dim, double radius) {
  const double half = 0.5 * static_cast<double>(dim);
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0) *
         std::pow(radius, static_cast<double>(dim));
}

absl::StatusOr<int64_t> CountInRegion(const Dataset& data,
                                      const Region& region) {
  if (!data.empty() && data.dim() != region.dim()) {
    return InputError(absl::StrCat("dimension mismatch: dataset has ",
                                   data.dim(), ", region has ", region.dim()));
  }
  int64_t count = 0;
  for (const Point& p : data.points()) {
    if (region.Contains(p.coords())) ++count;
  }
  return count;
}

}  // namespace histsan
