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

#ifndef HISTSAN_REGION_H_
#define HISTSAN_REGION_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "histsan/point.h"

namespace histsan {

enum class RegionKind { kBox, kBall, kVoronoi };

// The closed halfspace {x : normal . x <= offset}.
struct Halfspace {
  std::vector<double> normal;
  double offset = 0.0;
};

class Region;
using RegionPtr = std::shared_ptr<const Region>;
using CenterList = std::shared_ptr<const std::vector<Point>>;

// A bounded convex cell: an axis-aligned box, a closed ball, or the Voronoi
// cell of one center among siblings, clipped to a parent region.
//
// Membership conventions make every subdivision a true partition. Boxes are
// closed on low faces and open on high faces, except on axes flagged in
// `closed_high` (the faces lying on the top of the root box). Voronoi ties go
// to the lowest center index.
//
// Regions are immutable and shared; children keep their parent alive.
class Region {
 public:
  struct BoxData {
    Point low;
    Point high;
    std::vector<bool> closed_high;
  };
  struct BallData {
    Point center;
    double radius = 0.0;
  };
  struct VoronoiData {
    CenterList centers;
    size_t own_index = 0;
    RegionPtr parent;
    // Bisector and inherited faces that are not redundant inside the cell's
    // bounding box. Together with the bounds and the root region they
    // describe the cell exactly up to boundary ties.
    std::vector<Halfspace> faces;
  };

  static absl::StatusOr<RegionPtr> Box(Point low, Point high,
                                       std::vector<bool> closed_high);
  // A box closed on every face, used as the root of a decomposition.
  static absl::StatusOr<RegionPtr> ClosedBox(Point low, Point high);
  static absl::StatusOr<RegionPtr> Ball(Point center, double radius);
  static absl::StatusOr<RegionPtr> VoronoiClip(CenterList centers,
                                               size_t own_index,
                                               RegionPtr parent);

  RegionKind kind() const;
  size_t dim() const { return bounds_low_.dim(); }

  const BoxData& box() const { return std::get<BoxData>(data_); }
  const BallData& ball() const { return std::get<BallData>(data_); }
  const VoronoiData& voronoi() const { return std::get<VoronoiData>(data_); }
  const Point& own_center() const {
    return (*voronoi().centers)[voronoi().own_index];
  }

  // Exact membership. Dimensions are not checked.
  bool Contains(std::span<const double> x) const;
  // Membership with a dimension check.
  absl::StatusOr<bool> Membership(const Point& x) const;

  // Axis-aligned bounding box. Exact for boxes and balls; for Voronoi cells
  // it is the linear-programming hull of the cell's polytope relaxation.
  const Point& bounds_low() const { return bounds_low_; }
  const Point& bounds_high() const { return bounds_high_; }
  double BoundsVolume() const;

  // Closed-form volume for boxes and balls, nullopt for Voronoi cells.
  std::optional<double> ExactVolume() const;

  // Topmost ancestor; never a Voronoi cell.
  const Region& Root() const;
  const Region* parent() const;

  // Distance from `origin` (inside the region) to the boundary along the
  // unit vector `direction`.
  double RayExit(std::span<const double> origin,
                 std::span<const double> direction) const;
  // Radius of the largest ball around `p` (inside the region) that stays
  // inside the region.
  double DistanceToBoundary(std::span<const double> p) const;

  // Box or ball center, or the Voronoi cell's own center.
  Point NominalCenter() const;

  // Uniform sample by direct construction (box, ball) or by rejection from
  // the bounding box (Voronoi). With exact = false the Voronoi test uses the
  // cell's faces only, which differs from Contains() only on boundaries.
  absl::Status SampleUniform(std::mt19937_64& engine, std::span<double> out,
                             bool exact = true) const;
  absl::StatusOr<Point> SampleUniform(std::mt19937_64& engine) const;

  // Face-based membership. Agrees with Contains() off the cell boundaries.
  bool ContainsApprox(std::span<const double> x) const;

 private:
  using Data = std::variant<BoxData, BallData, VoronoiData>;
  Region(Data data, Point bounds_low, Point bounds_high)
      : data_(std::move(data)),
        bounds_low_(std::move(bounds_low)),
        bounds_high_(std::move(bounds_high)) {}

  Data data_;
  Point bounds_low_;
  Point bounds_high_;
};

// Volume of a d-dimensional ball of the given radius.
double BallVolume(size_t dim, double radius);

// Exact count of dataset points inside the region.
absl::StatusOr<int64_t> CountInRegion(const Dataset& data,
                                      const Region& region);

}  // namespace histsan

#endif  // HISTSAN_REGION_H_
