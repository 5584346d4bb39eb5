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

#include "histsan/point.h"

#include <algorithm>
#include <optional>
#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"
#include "histsan/status_macros.h"

namespace histsan {

absl::StatusOr<Point> Point::Create(std::vector<double> coords) {
  if (coords.empty()) return InputError("point must have dimension >= 1");
  for (size_t i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i])) {
      return InputError(absl::StrCat("coordinate ", i, " is not finite"));
    }
  }
  return Point(std::move(coords));
}

absl::StatusOr<Dataset> Dataset::Create(size_t dim, std::vector<Point> points) {
  if (dim == 0) return InputError("dataset dimension must be >= 1");
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].dim() != dim) {
      return InputError(absl::StrCat("point ", i, " has dimension ",
                                     points[i].dim(), ", expected ", dim));
    }
    for (double v : points[i].coords()) {
      if (!std::isfinite(v)) {
        return InputError(absl::StrCat("point ", i, " has a non-finite coordinate"));
      }
    }
  }
  return Dataset(dim, std::move(points));
}

Dataset Dataset::Subset(std::span<const size_t> indices) const {
  std::vector<Point> subset;
  subset.reserve(indices.size());
  for (size_t i : indices) subset.push_back(points_[i]);
  return Dataset(dim_, std::move(subset));
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

absl::StatusOr<double> Distance(const Point& x, const Point& y) {
  if (x.dim() != y.dim()) {
    return InputError(absl::StrCat("dimension mismatch: ", x.dim(), " vs ", y.dim()));
  }
  return UncheckedDistance(x.coords(), y.coords());
}

namespace {

absl::StatusOr<double> KthDistance(const Dataset& data, const Point& x, int t,
                                   std::optional<size_t> excluded) {
  if (x.dim() != data.dim()) {
    return InputError(absl::StrCat("dimension mismatch: ", x.dim(), " vs ", data.dim()));
  }
  if (t < 1) return InputError("t must be positive");
  std::vector<double> dists;
  dists.reserve(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    if (excluded.has_value() && *excluded == i) continue;
    dists.push_back(UncheckedDistance(x.coords(), data[i].coords()));
  }
  if (static_cast<size_t>(t) > dists.size()) {
    return InputError(absl::StrCat("t = ", t, " exceeds the ", dists.size(),
                                   " available neighbors"));
  }
  std::nth_element(dists.begin(), dists.begin() + (t - 1), dists.end());
  return dists[t - 1];
}

}  // namespace

absl::StatusOr<double> TRadius(const Dataset& data, const Point& x, int t) {
  std::optional<size_t> self;
  for (size_t i = 0; i < data.size(); ++i) {
    if (data[i] == x) {
      self = i;
      break;
    }
  }
  return KthDistance(data, x, t, self);
}

absl::StatusOr<double> TRadiusOfIndex(const Dataset& data, size_t index,
                                      int t) {
  if (index >= data.size()) return InputError("point index out of range");
  return KthDistance(data, data[index], t, index);
}

}  // namespace histsan
