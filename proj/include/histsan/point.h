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

#ifndef HISTSAN_POINT_H_
#define HISTSAN_POINT_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace histsan {

// A point of d-dimensional Euclidean space with finite coordinates.
class Point {
 public:
  Point() = default;
  // Unchecked; use Create() for untrusted input.
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}

  static absl::StatusOr<Point> Create(std::vector<double> coords);

  size_t dim() const { return coords_.size(); }
  double operator[](size_t i) const { return coords_[i]; }
  double& operator[](size_t i) { return coords_[i]; }

  std::span<const double> coords() const { return coords_; }
  std::span<double> mutable_coords() { return coords_; }
  const std::vector<double>& values() const { return coords_; }

  bool operator==(const Point& other) const = default;

 private:
  std::vector<double> coords_;
};

// An ordered collection of points sharing one dimension. The order is the
// input order and is preserved by every operation.
class Dataset {
 public:
  Dataset() = default;

  static absl::StatusOr<Dataset> Create(size_t dim, std::vector<Point> points);

  size_t dim() const { return dim_; }
  size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& operator[](size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }

  // Subset in the order given by `indices`.
  Dataset Subset(std::span<const size_t> indices) const;

 private:
  Dataset(size_t dim, std::vector<Point> points)
      : dim_(dim), points_(std::move(points)) {}

  size_t dim_ = 0;
  std::vector<Point> points_;
};

double SquaredDistance(std::span<const double> a, std::span<const double> b);

inline double UncheckedDistance(std::span<const double> a,
                                std::span<const double> b) {
  return std::sqrt(SquaredDistance(a, b));
}

// Euclidean distance; input error on dimension mismatch.
absl::StatusOr<double> Distance(const Point& x, const Point& y);

// Distance from `x` to its t-th nearest point of `data`. When `x` is itself a
// dataset point, one copy of it is excluded, so t = 1 gives the distance to
// the nearest other point.
absl::StatusOr<double> TRadius(const Dataset& data, const Point& x, int t);

// t-radius of data[index], excluding that index.
absl::StatusOr<double> TRadiusOfIndex(const Dataset& data, size_t index,
                                      int t);

}  // namespace histsan

#endif  // HISTSAN_POINT_H_
