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

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "histsan/random.h"
#include "test_util.h"

namespace histsan {
namespace {

using ::histsan::testing::MakeDataset;
using ::histsan::testing::Origin;

RegionPtr UnitBall(size_t dim) { return Region::Ball(Origin(dim), 1.0).value(); }

RegionPtr RootCube(size_t dim) {
  return Region::ClosedBox(Point(std::vector<double>(dim, -1.0)),
                           Point(std::vector<double>(dim, 1.0)))
      .value();
}

CenterList RandomCenters(const Region& region, int m, uint64_t seed) {
  std::mt19937_64 engine = RandomStream(seed).Engine();
  auto centers = std::make_shared<std::vector<Point>>();
  for (int i = 0; i < m; ++i) centers->push_back(region.SampleUniform(engine).value());
  return centers;
}

TEST(BoxTest, HalfOpenFacesExceptClosedFlags) {
  ASSERT_OK_AND_ASSIGN(RegionPtr box,
                       Region::Box(Point({0.0, 0.0}), Point({1.0, 1.0}),
                                   {false, true}));
  EXPECT_TRUE(box->Contains(std::vector<double>{0.0, 0.0}));
  EXPECT_FALSE(box->Contains(std::vector<double>{1.0, 0.5}));
  EXPECT_TRUE(box->Contains(std::vector<double>{0.5, 1.0}));
  EXPECT_FALSE(box->Contains(std::vector<double>{-1e-12, 0.5}));
}

TEST(BoxTest, RejectsBadCorners) {
  EXPECT_FALSE(Region::ClosedBox(Point({0.0}), Point({0.0})).ok());
  EXPECT_FALSE(Region::ClosedBox(Point({0.0}), Point({1.0, 2.0})).ok());
  EXPECT_FALSE(Region::Box(Point({0.0}), Point({1.0}), {true, true}).ok());
}

TEST(BallTest, ClosedMembershipAndValidation) {
  RegionPtr ball = UnitBall(2);
  EXPECT_TRUE(ball->Contains(std::vector<double>{1.0, 0.0}));
  EXPECT_FALSE(ball->Contains(std::vector<double>{1.0, 1e-6}));
  EXPECT_FALSE(Region::Ball(Origin(2), 0.0).ok());
  EXPECT_FALSE(Region::Ball(Origin(2), -1.0).ok());
}

TEST(BallTest, VolumeClosedForm) {
  EXPECT_NEAR(BallVolume(2, 1.0), std::numbers::pi, 1e-15);
  EXPECT_NEAR(BallVolume(3, 2.0), 4.0 / 3.0 * std::numbers::pi * 8.0, 1e-12);
  EXPECT_NEAR(BallVolume(1, 0.5), 1.0, 1e-15);
}

TEST(MembershipTest, DimensionMismatchIsAnError) {
  EXPECT_FALSE(UnitBall(2)->Membership(Point({0.0})).ok());
}

TEST(CountInRegionTest, LineAndIsolatedCluster) {
  ASSERT_OK_AND_ASSIGN(RegionPtr line_ball, Region::Ball(Point({0.0}), 1.5));
  ASSERT_OK_AND_ASSIGN(int64_t line,
                       CountInRegion(MakeDataset({{0.0}, {1.0}, {2.0}}), *line_ball));
  EXPECT_EQ(line, 2);

  const Dataset data =
      MakeDataset({{0.0, 0.0}, {10.0, 0.0}, {10.0, 1.0}, {10.0, -1.0}});
  ASSERT_OK_AND_ASSIGN(RegionPtr ball, Region::Ball(Point({0.0, 0.1}), 0.4));
  ASSERT_OK_AND_ASSIGN(int64_t count, CountInRegion(data, *ball));
  EXPECT_EQ(count, 1);

  ASSERT_OK_AND_ASSIGN(Dataset empty, Dataset::Create(2, {}));
  ASSERT_OK_AND_ASSIGN(int64_t none, CountInRegion(empty, *ball));
  EXPECT_EQ(none, 0);
}

TEST(CountInRegionTest, DimensionMismatchIsAnError) {
  EXPECT_FALSE(CountInRegion(MakeDataset({{0.0}}), *UnitBall(2)).ok());
}

TEST(RayExitTest, BoxAndBall) {
  RegionPtr cube = RootCube(2);
  EXPECT_DOUBLE_EQ(cube->RayExit(std::vector<double>{0.0, 0.0},
                                 std::vector<double>{1.0, 0.0}),
                   1.0);
  const double s = std::sqrt(0.5);
  EXPECT_NEAR(cube->RayExit(std::vector<double>{0.0, 0.0},
                            std::vector<double>{s, s}),
              std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(UnitBall(3)->RayExit(std::vector<double>{0.5, 0.0, 0.0},
                                   std::vector<double>{-1.0, 0.0, 0.0}),
              1.5, 1e-12);
  EXPECT_NEAR(cube->DistanceToBoundary(std::vector<double>{0.5, -0.2}), 0.5,
              1e-15);
}

TEST(VoronoiClipTest, ValidatesInput) {
  RegionPtr ball = UnitBall(2);
  auto centers = std::make_shared<std::vector<Point>>(
      std::vector<Point>{Point({0.0, 0.0}), Point({0.5, 0.0})});
  EXPECT_FALSE(Region::VoronoiClip(centers, 2, ball).ok());
  auto outside = std::make_shared<std::vector<Point>>(
      std::vector<Point>{Point({2.0, 0.0}), Point({0.5, 0.0})});
  EXPECT_FALSE(Region::VoronoiClip(outside, 0, ball).ok());
  auto duplicate = std::make_shared<std::vector<Point>>(
      std::vector<Point>{Point({0.1, 0.0}), Point({0.1, 0.0})});
  EXPECT_FALSE(Region::VoronoiClip(duplicate, 0, ball).ok());
}

TEST(VoronoiClipTest, TwoCellsSplitAtBisector) {
  RegionPtr cube = RootCube(2);
  auto centers = std::make_shared<std::vector<Point>>(
      std::vector<Point>{Point({-0.5, 0.0}), Point({0.5, 0.0})});
  ASSERT_OK_AND_ASSIGN(RegionPtr left, Region::VoronoiClip(centers, 0, cube));
  ASSERT_OK_AND_ASSIGN(RegionPtr right, Region::VoronoiClip(centers, 1, cube));
  // Ties go to the lower index.
  EXPECT_TRUE(left->Contains(std::vector<double>{0.0, 0.3}));
  EXPECT_FALSE(right->Contains(std::vector<double>{0.0, 0.3}));
  EXPECT_NEAR(left->bounds_high()[0], 0.0, 1e-8);
  EXPECT_NEAR(right->bounds_low()[0], 0.0, 1e-8);
  EXPECT_NEAR(left->bounds_low()[1], -1.0, 1e-8);
  EXPECT_NEAR(left->DistanceToBoundary(std::vector<double>{-0.5, 0.0}), 0.5,
              1e-12);
  EXPECT_NEAR(right->RayExit(std::vector<double>{0.5, 0.0},
                             std::vector<double>{-1.0, 0.0}),
              0.5, 1e-12);
}

// Every probe of the parent lands in exactly one child.
TEST(VoronoiClipTest, ChildrenPartitionParent) {
  for (size_t dim : {2, 3, 5}) {
    RegionPtr parent = dim == 3 ? RootCube(dim) : UnitBall(dim);
    CenterList centers = RandomCenters(*parent, 40, dim);
    std::vector<RegionPtr> cells;
    for (size_t i = 0; i < centers->size(); ++i) {
      ASSERT_OK_AND_ASSIGN(RegionPtr cell,
                           Region::VoronoiClip(centers, i, parent));
      cells.push_back(cell);
    }
    std::mt19937_64 engine = RandomStream(99).Engine();
    for (int probe = 0; probe < 10000; ++probe) {
      ASSERT_OK_AND_ASSIGN(Point x, parent->SampleUniform(engine));
      int owners = 0;
      for (const RegionPtr& cell : cells) {
        if (cell->Contains(x.coords())) {
          ++owners;
          EXPECT_TRUE(cell->ContainsApprox(x.coords()));
          for (size_t k = 0; k < dim; ++k) {
            EXPECT_GE(x[k], cell->bounds_low()[k]);
            EXPECT_LE(x[k], cell->bounds_high()[k]);
          }
        }
      }
      EXPECT_EQ(owners, 1);
    }
  }
}

TEST(VoronoiClipTest, NestedCellsPartitionTheirParent) {
  RegionPtr ball = UnitBall(2);
  CenterList top = RandomCenters(*ball, 8, 1);
  ASSERT_OK_AND_ASSIGN(RegionPtr parent, Region::VoronoiClip(top, 3, ball));
  CenterList inner = RandomCenters(*parent, 12, 2);
  std::vector<RegionPtr> cells;
  for (size_t i = 0; i < inner->size(); ++i) {
    ASSERT_OK_AND_ASSIGN(RegionPtr cell, Region::VoronoiClip(inner, i, parent));
    cells.push_back(cell);
  }
  std::mt19937_64 engine = RandomStream(5).Engine();
  std::vector<double> x(2);
  for (int probe = 0; probe < 10000; ++probe) {
    UniformInBall(engine, std::vector<double>{0.0, 0.0}, 1.0, x);
    int owners = 0;
    for (const RegionPtr& cell : cells) owners += cell->Contains(x) ? 1 : 0;
    EXPECT_EQ(owners, parent->Contains(x) ? 1 : 0);
  }
}

TEST(VoronoiClipTest, SamplesStayInsideAndRayExitIsOnBoundary) {
  RegionPtr ball = UnitBall(3);
  CenterList centers = RandomCenters(*ball, 30, 8);
  ASSERT_OK_AND_ASSIGN(RegionPtr cell, Region::VoronoiClip(centers, 4, ball));
  std::mt19937_64 engine = RandomStream(6).Engine();
  std::vector<double> u(3), y(3);
  for (int i = 0; i < 500; ++i) {
    ASSERT_OK_AND_ASSIGN(Point x, cell->SampleUniform(engine));
    ASSERT_TRUE(cell->Contains(x.coords()));
    RandomDirection(engine, u);
    const double exit = cell->RayExit(x.coords(), u);
    for (size_t k = 0; k < 3; ++k) y[k] = x[k] + 0.999 * exit * u[k];
    EXPECT_TRUE(cell->Contains(y));
    for (size_t k = 0; k < 3; ++k) y[k] = x[k] + (1.001 * exit + 1e-12) * u[k];
    EXPECT_FALSE(cell->Contains(y));
    EXPECT_LE(cell->DistanceToBoundary(x.coords()), exit + 1e-12);
  }
}

TEST(SampleUniformTest, BoxAndBallSamplesAreMembers) {
  std::mt19937_64 engine = RandomStream(3).Engine();
  ASSERT_OK_AND_ASSIGN(RegionPtr box, Region::Box(Point({0.0, 1.0}),
                                                  Point({0.5, 3.0}),
                                                  {false, false}));
  for (int i = 0; i < 1000; ++i) {
    ASSERT_OK_AND_ASSIGN(Point a, box->SampleUniform(engine));
    EXPECT_TRUE(box->Contains(a.coords()));
    ASSERT_OK_AND_ASSIGN(Point b, UnitBall(4)->SampleUniform(engine));
    EXPECT_TRUE(UnitBall(4)->Contains(b.coords()));
  }
}

}  // namespace
}  // namespace histsan
