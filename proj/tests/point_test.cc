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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "histsan/random.h"
#include "test_util.h"

namespace histsan {
namespace {

using ::histsan::testing::MakeDataset;

TEST(PointTest, CreateRejectsNonFiniteAndEmpty) {
  EXPECT_FALSE(Point::Create({}).ok());
  EXPECT_FALSE(Point::Create({1.0, std::nan("")}).ok());
  EXPECT_FALSE(
      Point::Create({std::numeric_limits<double>::infinity()}).ok());
  EXPECT_TRUE(Point::Create({0.0, -2.5}).ok());
}

TEST(DatasetTest, CreateRejectsMixedDimensions) {
  EXPECT_FALSE(
      Dataset::Create(2, {Point({0.0, 0.0}), Point({1.0, 2.0, 3.0})}).ok());
  EXPECT_TRUE(Dataset::Create(2, {}).ok());
}

TEST(DistanceTest, RejectsDimensionMismatch) {
  EXPECT_FALSE(Distance(Point({0.0}), Point({0.0, 1.0})).ok());
}

TEST(DistanceTest, ThreeFourFive) {
  ASSERT_OK_AND_ASSIGN(double d, Distance(Point({0.0, 0.0}), Point({3.0, 4.0})));
  EXPECT_DOUBLE_EQ(d, 5.0);
  ASSERT_OK_AND_ASSIGN(double diag, Distance(Point({1.0, 1.0, 1.0, 1.0}),
                                             Point({0.0, 0.0, 0.0, 0.0})));
  EXPECT_DOUBLE_EQ(diag, 2.0);
  ASSERT_OK_AND_ASSIGN(double zero, Distance(Point({0.3}), Point({0.3})));
  EXPECT_EQ(zero, 0.0);
}

TEST(DistanceTest, TriangleInequalityOnRandomTriples) {
  std::mt19937_64 engine = RandomStream(11).Engine();
  const double kUlps = 8 * std::numeric_limits<double>::epsilon();
  for (int trial = 0; trial < 2000; ++trial) {
    const size_t dim = 1 + trial % 9;
    std::vector<double> a(dim), b(dim), c(dim);
    for (size_t k = 0; k < dim; ++k) {
      a[k] = 10.0 * (UniformUnit(engine) - 0.5);
      b[k] = 10.0 * (UniformUnit(engine) - 0.5);
      c[k] = 10.0 * (UniformUnit(engine) - 0.5);
    }
    const double ac = UncheckedDistance(a, c);
    const double ab = UncheckedDistance(a, b);
    const double bc = UncheckedDistance(b, c);
    EXPECT_LE(ac, (ab + bc) * (1.0 + kUlps));
  }
}

TEST(TRadiusTest, ExcludesTheQueryPoint) {
  // {0,1,2,3}, x = 0: neighbours at 1, 2, 3, so the 2nd is at distance 2.
  const Dataset data = MakeDataset({{0.0}, {1.0}, {2.0}, {3.0}});
  ASSERT_OK_AND_ASSIGN(double r, TRadius(data, Point({0.0}), 2));
  EXPECT_DOUBLE_EQ(r, 2.0);
  ASSERT_OK_AND_ASSIGN(double by_index, TRadiusOfIndex(data, 0, 2));
  EXPECT_DOUBLE_EQ(by_index, 2.0);
}

TEST(TRadiusTest, PlanarExample) {
  const Dataset data = MakeDataset({{0.0, 0.0}, {0.0, 3.0}, {4.0, 0.0}});
  ASSERT_OK_AND_ASSIGN(double r, TRadius(data, Point({0.0, 0.0}), 2));
  EXPECT_DOUBLE_EQ(r, 4.0);
  ASSERT_OK_AND_ASSIGN(double nearest, TRadius(data, Point({0.0, 0.0}), 1));
  EXPECT_DOUBLE_EQ(nearest, 3.0);
}

TEST(TRadiusTest, OutsidePointUsesAllPoints) {
  const Dataset data = MakeDataset({{0.0}, {1.0}, {2.0}, {3.0}});
  ASSERT_OK_AND_ASSIGN(double r, TRadius(data, Point({-1.0}), 1));
  EXPECT_DOUBLE_EQ(r, 1.0);
}

TEST(TRadiusTest, DuplicateKeepsOtherCopies) {
  const Dataset data = MakeDataset({{0.0}, {0.0}, {5.0}});
  ASSERT_OK_AND_ASSIGN(double r, TRadiusOfIndex(data, 0, 1));
  EXPECT_DOUBLE_EQ(r, 0.0);
}

TEST(TRadiusTest, RejectsTooLargeT) {
  const Dataset data = MakeDataset({{0.0}, {1.0}});
  EXPECT_FALSE(TRadiusOfIndex(data, 0, 2).ok());
  EXPECT_FALSE(TRadius(data, Point({0.0}), 0).ok());
}

TEST(TRadiusTest, MonotoneInT) {
  const Dataset data = testing::UniformCubeData(3, 60, 4);
  for (size_t i = 0; i < data.size(); ++i) {
    double previous = 0.0;
    for (int t = 1; t < 59; ++t) {
      ASSERT_OK_AND_ASSIGN(double r, TRadiusOfIndex(data, i, t));
      EXPECT_LE(previous, r);
      previous = r;
    }
  }
}

}  // namespace
}  // namespace histsan
