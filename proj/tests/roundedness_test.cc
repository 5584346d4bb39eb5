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

#include "histsan/roundedness.h"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "histsan/random.h"
#include "histsan/sanitizer.h"
#include "test_util.h"

namespace histsan {
namespace {

using ::histsan::testing::MakeDataset;
using ::histsan::testing::Origin;
using ::histsan::testing::UniformBallData;

TEST(CertifyRoundnessTest, SquareIsRootTwoRound) {
  ASSERT_OK_AND_ASSIGN(RegionPtr box,
                       Region::ClosedBox(Point({-1.0, -1.0}), Point({1.0, 1.0})));
  ASSERT_OK_AND_ASSIGN(RoundnessCertificate cert, CertifyRoundness(*box, 256, 1));
  EXPECT_NEAR(cert.k, std::sqrt(2.0), 0.02 * std::sqrt(2.0));
  EXPECT_NEAR(cert.radius, std::sqrt(2.0), 0.02 * std::sqrt(2.0));
  EXPECT_EQ(cert.center.values(), std::vector<double>({0.0, 0.0}));
}

TEST(CertifyRoundnessTest, RectangleOneByTwo) {
  ASSERT_OK_AND_ASSIGN(RegionPtr box,
                       Region::ClosedBox(Point({-0.5, -1.0}), Point({0.5, 1.0})));
  ASSERT_OK_AND_ASSIGN(RoundnessCertificate cert, CertifyRoundness(*box, 256, 1));
  EXPECT_NEAR(cert.k, std::sqrt(5.0), 0.02 * std::sqrt(5.0));
  EXPECT_NEAR(cert.inner_radius(), 0.5, 0.01);
}

TEST(CertifyRoundnessTest, BallsAreOneRound) {
  for (size_t dim : {1, 2, 5, 10}) {
    ASSERT_OK_AND_ASSIGN(RegionPtr ball, Region::Ball(Origin(dim), 0.7));
    ASSERT_OK_AND_ASSIGN(RoundnessCertificate cert, CertifyRoundness(*ball, 64, 2));
    EXPECT_GE(cert.k, 1.0);
    EXPECT_LE(cert.k, 1.05);
    EXPECT_NEAR(cert.radius, 0.7, 0.7 * 0.02);
  }
}

// Sampled points of the cell lie in the outer ball; sampled points of the
// inner ball lie in the cell.
TEST(CertifyRoundnessTest, VoronoiCertificateSandwichesCell) {
  for (size_t dim : {2, 3}) {
    ASSERT_OK_AND_ASSIGN(RegionPtr ball, Region::Ball(Origin(dim), 1.0));
    std::mt19937_64 engine = RandomStream(dim).Engine();
    auto centers = std::make_shared<std::vector<Point>>();
    std::vector<double> c(dim);
    for (int i = 0; i < 12; ++i) {
      UniformInBall(engine, Origin(dim).coords(), 1.0, c);
      centers->push_back(Point(c));
    }
    for (size_t i = 0; i < centers->size(); ++i) {
      ASSERT_OK_AND_ASSIGN(RegionPtr cell, Region::VoronoiClip(centers, i, ball));
      ASSERT_OK_AND_ASSIGN(RoundnessCertificate cert, CertifyRoundness(*cell, 256, i));
      EXPECT_GE(cert.k, 1.0);
      ASSERT_TRUE(cell->Contains(cert.center.coords()));
      std::vector<double> x(dim);
      for (int s = 0; s < 2000; ++s) {
        ASSERT_OK_AND_ASSIGN(Point inside, cell->SampleUniform(engine));
        EXPECT_LE(Distance(inside, cert.center).value(), cert.radius);
        UniformInBall(engine, cert.center.coords(), cert.inner_radius(), x);
        EXPECT_TRUE(cell->Contains(x));
      }
    }
  }
}

TEST(WellSpreadCheckTest, Examples) {
  const std::vector<Point> line = {Point({0.0}), Point({0.5}), Point({1.0})};
  EXPECT_TRUE(WellSpreadCheck(line, 0.4).value());
  EXPECT_FALSE(WellSpreadCheck(line, 0.6).value());
  const std::vector<Point> pair = {Point({0.0, 0.0}), Point({3.0, 4.0})};
  EXPECT_TRUE(WellSpreadCheck(pair, 5.0).value());
  const std::vector<Point> single = {Point({0.0})};
  EXPECT_FALSE(WellSpreadCheck(single, 0.1).ok());
  EXPECT_FALSE(WellSpreadCheck(line, 0.0).ok());
  EXPECT_DOUBLE_EQ(MinPairwiseDistance(line), 0.5);
}

TEST(CoverCheckTest, SingleCenterInUnitDisk) {
  ASSERT_OK_AND_ASSIGN(RegionPtr disk, Region::Ball(Origin(2), 1.0));
  const std::vector<Point> center = {Origin(2)};
  ASSERT_OK_AND_ASSIGN(CoverResult full, CoverCheck(center, *disk, 1.0, 10000, 1));
  EXPECT_TRUE(full.covered);
  EXPECT_LE(full.worst_gap, 1.0);
  EXPECT_GT(full.worst_gap, 0.99);
  ASSERT_OK_AND_ASSIGN(CoverResult half, CoverCheck(center, *disk, 0.5, 10000, 1));
  EXPECT_FALSE(half.covered);
}

TEST(CoverCheckTest, GridCoveringRadius) {
  for (size_t dim : {2, 3}) {
    const double pitch = 0.25;
    std::vector<Point> centers;
    const int per_axis = 8;
    std::vector<int> idx(dim, 0);
    while (true) {
      std::vector<double> c(dim);
      for (size_t k = 0; k < dim; ++k) c[k] = -1.0 + pitch * (idx[k] + 0.5);
      centers.push_back(Point(c));
      size_t k = 0;
      while (k < dim && ++idx[k] == per_axis) idx[k++] = 0;
      if (k == dim) break;
    }
    ASSERT_OK_AND_ASSIGN(RegionPtr box, Region::ClosedBox(Point(std::vector<double>(dim, -1.0)),
                                                          Point(std::vector<double>(dim, 1.0))));
    const double r1 = pitch * std::sqrt(static_cast<double>(dim)) / 2;
    ASSERT_OK_AND_ASSIGN(CoverResult result, CoverCheck(centers, *box, r1, 20000, dim));
    EXPECT_TRUE(result.covered);
    EXPECT_LE(result.worst_gap, r1);
  }
}

TEST(CoverCheckTest, RejectsEmptyCenters) {
  ASSERT_OK_AND_ASSIGN(RegionPtr disk, Region::Ball(Origin(2), 1.0));
  EXPECT_FALSE(CoverCheck({}, *disk, 1.0, 10, 1).ok());
}

// With R = 1 and c = 8 the radius grid over [1e-4, 2] has eight geometric
// steps; c r reaches 3 R (the largest possible |q - p| + R) at the last two
// and stays below R at the first six.
TEST(CheckPrivacyConditionTest, ContainmentBranchCountsMatchRadiusGrid) {
  ASSERT_OK_AND_ASSIGN(RegionPtr ball, Region::Ball(Origin(2), 1.0));
  ASSERT_OK_AND_ASSIGN(SanitizedHistogram h,
                       BuildVoronoi(MakeDataset({{0.1, 0.2}}), ball, VoronoiOptions{}));
  PrivacyConditionOptions options;
  options.c = 8.0;
  options.q_probes = 20;
  options.r_grid = 8;
  options.volume_samples = 2000;
  ASSERT_OK_AND_ASSIGN(PrivacyConditionReport report, CheckPrivacyCondition(h, options));
  EXPECT_EQ(report.cells_checked, 1);
  EXPECT_EQ(report.probes_per_cell, 160);
  EXPECT_EQ(report.containment, 40);
  EXPECT_EQ(report.containment + report.ratios_recorded + report.degenerate, 160);
}

TEST(CheckPrivacyConditionTest, NestedBallRatioInUnitBall) {
  const size_t dim = 4;
  ASSERT_OK_AND_ASSIGN(RegionPtr ball, Region::Ball(Origin(dim), 1.0));
  ASSERT_OK_AND_ASSIGN(SanitizedHistogram h,
                       BuildVoronoi(MakeDataset({std::vector<double>(dim, 0.0)}), ball,
                                    VoronoiOptions{}));
  PrivacyConditionOptions options;
  options.c = 8.0;
  options.q_probes = 48;
  options.r_grid = 1;
  options.volume_samples = 1000000;
  options.seed = 3;
  ASSERT_OK_AND_ASSIGN(PrivacyConditionReport report, CheckPrivacyCondition(h, options));
  ASSERT_GT(report.ratios_recorded, 0);
  const double expected = std::pow(8.0, -4.0);
  const double stderr_ = std::sqrt(expected * (1 - expected) / 1e6);
  EXPECT_NEAR(report.epsilon_observed, expected, 3 * stderr_);
}

TEST(CheckPrivacyConditionTest, EveryProbeClassifiedOnce) {
  const Dataset data = UniformBallData(2, 60, 4);
  ASSERT_OK_AND_ASSIGN(RegionPtr ball, Region::Ball(Origin(2), 1.0));
  VoronoiOptions build;
  build.probe_samples = 5000;
  ASSERT_OK_AND_ASSIGN(SanitizedHistogram h, BuildVoronoi(data, ball, build));
  PrivacyConditionOptions options;
  options.q_probes = 4;
  options.r_grid = 4;
  options.volume_samples = 1000;
  options.epsilon = 0.5;
  ASSERT_OK_AND_ASSIGN(PrivacyConditionReport report, CheckPrivacyCondition(h, options));
  EXPECT_EQ(report.containment + report.ratios_recorded + report.degenerate,
            report.cells_checked * report.probes_per_cell);
  for (const PrivacyFailure& f : report.failures) {
    EXPECT_GE(f.ratio, 0.5);
    EXPECT_LE(f.ratio, report.epsilon_observed);
  }
}

TEST(CheckPrivacyConditionTest, RejectsBadOptions) {
  ASSERT_OK_AND_ASSIGN(RegionPtr ball, Region::Ball(Origin(2), 1.0));
  ASSERT_OK_AND_ASSIGN(SanitizedHistogram h,
                       BuildVoronoi(MakeDataset({{0.0, 0.0}}), ball, VoronoiOptions{}));
  PrivacyConditionOptions options;
  options.c = 1.0;
  EXPECT_FALSE(CheckPrivacyCondition(h, options).ok());
  options.c = 2.0;
  options.r_grid = 0;
  EXPECT_FALSE(CheckPrivacyCondition(h, options).ok());
}

// Greedy centers are R/4-spread and R/4-cover the parent, so children are
// at most 4 k-round, within certification slack.
TEST(VoronoiRoundnessTest, GreedyChildrenWithinRecurrence) {
  ASSERT_OK_AND_ASSIGN(RegionPtr ball, Region::Ball(Origin(2), 1.0));
  VoronoiOptions build;
  build.seed = 6;
  build.probe_samples = 20000;
  ASSERT_OK_AND_ASSIGN(SanitizedHistogram h,
                       BuildVoronoi(UniformBallData(2, 200, 6), ball, build));
  int checked = 0;
  std::function<void(const SanitizedNode&, double)> visit =
      [&](const SanitizedNode& node, double parent_k) {
        ASSERT_OK_AND_ASSIGN(RoundnessCertificate cert,
                             CertifyRoundness(*node.region, 256, node.level + 11));
        if (node.level > 0) {
          EXPECT_LE(cert.k, 4 * parent_k * 1.1);
          ++checked;
        }
        for (const SanitizedNode& child : node.children) visit(child, cert.k);
      };
  visit(h.root, 1.0);
  EXPECT_GT(checked, 10);
}

}  // namespace
}  // namespace histsan
