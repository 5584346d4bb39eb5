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

#include "histsan/json_io.h"

#include <cmath>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "histsan/sanitizer.h"
#include "test_util.h"

namespace histsan {
namespace {

using ::histsan::testing::MakeDataset;
using ::histsan::testing::Origin;
using ::histsan::testing::UniformBallData;
using ::histsan::testing::UniformCubeData;

TEST(JsonIoTest, DoublesRoundTripExactly) {
  const Point p({0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23});
  ASSERT_OK_AND_ASSIGN(Json parsed, ParseDocument(DumpDocument(PointToJson(p))));
  ASSERT_OK_AND_ASSIGN(Point back, PointFromJson(parsed));
  EXPECT_EQ(back.values(), p.values());
  EXPECT_EQ(DumpDocument(PointToJson(Point({0.1}))), "[0.1]\n");
}

TEST(JsonIoTest, ParseRejectsGarbage) {
  EXPECT_FALSE(ParseDocument("{\"a\": ").ok());
  EXPECT_FALSE(PointFromJson(Json::parse("[1, \"x\"]")).ok());
  EXPECT_FALSE(PointFromJson(Json::parse("[]")).ok());
}

TEST(JsonIoTest, DatasetWithLabels) {
  const Dataset data = UniformCubeData(3, 20, 1);
  std::vector<int> labels(20, 0);
  labels[7] = 1;
  const Json doc = DatasetToJson(data, &labels);
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["n"], 20);
  ASSERT_OK_AND_ASSIGN(DatasetDocument back, DatasetFromJson(doc));
  ASSERT_EQ(back.data.size(), 20u);
  for (size_t i = 0; i < 20; ++i) EXPECT_EQ(back.data[i].values(), data[i].values());
  EXPECT_EQ(back.labels, labels);

  Json wrong = doc;
  wrong["n"] = 21;
  EXPECT_FALSE(DatasetFromJson(wrong).ok());
  wrong = doc;
  wrong["schema_version"] = 2;
  EXPECT_FALSE(DatasetFromJson(wrong).ok());
}

TEST(JsonIoTest, DistributionSpecRoundTripAndBroadcast) {
  ASSERT_OK_AND_ASSIGN(
      DistributionSpec spec,
      DistributionSpec::Create({{0.25, UniformCube{Point({0.0, 0.5}), 0.5}},
                                {0.5, UniformBall{Point({1.0, 1.0}), 2.0}},
                                {0.25, TruncatedGaussian{Point({0.0, 0.0}), 0.3, 1.0}}}));
  const std::string text = DumpDocument(DistributionSpecToJson(spec));
  ASSERT_OK_AND_ASSIGN(DistributionSpec back,
                       DistributionSpecFromJson(ParseDocument(text).value()));
  EXPECT_EQ(DumpDocument(DistributionSpecToJson(back)), text);

  const Json scalar = Json::parse(
      R"({"components": [{"shape": "ball", "center": 0, "radius": 1}]})");
  EXPECT_FALSE(DistributionSpecFromJson(scalar).ok());
  ASSERT_OK_AND_ASSIGN(DistributionSpec broadcast, DistributionSpecFromJson(scalar, 4));
  EXPECT_EQ(broadcast.dim(), 4u);
  EXPECT_EQ(broadcast.components()[0].weight, 1.0);
}

TEST(JsonIoTest, Regions) {
  ASSERT_OK_AND_ASSIGN(RegionPtr box,
                       Region::Box(Point({-1.0, 0.0}), Point({0.0, 2.0}), {false, true}));
  ASSERT_OK_AND_ASSIGN(Json box_json, RegionToJson(*box));
  ASSERT_OK_AND_ASSIGN(RegionPtr box_back, RegionFromJson(box_json));
  EXPECT_EQ(box_back->box().closed_high, box->box().closed_high);
  EXPECT_FALSE(box_back->Contains(std::vector<double>{0.0, 1.0}));
  EXPECT_TRUE(box_back->Contains(std::vector<double>{-0.5, 2.0}));

  ASSERT_OK_AND_ASSIGN(RegionPtr ball, Region::Ball(Point({1.0, 2.0, 3.0}), 0.5));
  ASSERT_OK_AND_ASSIGN(Json ball_json, RegionToJson(*ball));
  ASSERT_OK_AND_ASSIGN(RegionPtr ball_back, RegionFromJson(ball_json));
  EXPECT_EQ(ball_back->kind(), RegionKind::kBall);
  EXPECT_EQ(DumpDocument(RegionToJson(*ball_back).value()), DumpDocument(ball_json));
  EXPECT_FALSE(RegionFromJson(Json::parse(R"({"kind": "ball", "center": [0], "radius": -1})")).ok());
  EXPECT_FALSE(RegionFromJson(Json::parse(R"({"kind": "torus"})")).ok());
}

void ExpectRoundTrip(const SanitizedHistogram& h) {
  ASSERT_OK_AND_ASSIGN(Json doc, HistogramToJson(h));
  const std::string text = DumpDocument(doc);
  ASSERT_OK_AND_ASSIGN(Json parsed, ParseDocument(text));
  ASSERT_OK_AND_ASSIGN(SanitizedHistogram back, HistogramFromJson(parsed));
  EXPECT_EQ(back.method, h.method);
  EXPECT_EQ(back.root.count, h.root.count);
  ASSERT_OK_AND_ASSIGN(Json again, HistogramToJson(back));
  EXPECT_EQ(DumpDocument(again), text);
}

TEST(JsonIoTest, HistogramsOfEveryMethod) {
  const Dataset cube_data = UniformCubeData(2, 100, 3);
  ExpectRoundTrip(BuildRecursiveCube(cube_data, CubeOptions{}).value());
  GridOptions grid;
  grid.seed = 9;
  ExpectRoundTrip(BuildShiftedGrid(cube_data, grid).value());
  ASSERT_OK_AND_ASSIGN(RegionPtr ball, Region::Ball(Origin(2), 1.0));
  VoronoiOptions voronoi;
  voronoi.probe_samples = 10000;
  ASSERT_OK_AND_ASSIGN(SanitizedHistogram h,
                       BuildVoronoi(UniformBallData(2, 100, 4), ball, voronoi));
  h.component_index = 3;
  ExpectRoundTrip(h);
}

TEST(JsonIoTest, VoronoiRegionsSurviveRoundTrip) {
  ASSERT_OK_AND_ASSIGN(RegionPtr ball, Region::Ball(Origin(2), 1.0));
  const Dataset data = UniformBallData(2, 80, 5);
  VoronoiOptions voronoi;
  voronoi.probe_samples = 10000;
  ASSERT_OK_AND_ASSIGN(SanitizedHistogram h, BuildVoronoi(data, ball, voronoi));
  ASSERT_OK_AND_ASSIGN(Json doc, HistogramToJson(h));
  ASSERT_OK_AND_ASSIGN(SanitizedHistogram back, HistogramFromJson(doc));
  const std::vector<NodeRef> a = EnumerateNodes(h);
  const std::vector<NodeRef> b = EnumerateNodes(back);
  ASSERT_EQ(a.size(), b.size());
  for (const Point& p : data.points()) {
    EXPECT_EQ(LocateLeaf(h, p.coords())->count, LocateLeaf(back, p.coords())->count);
  }
}

TEST(JsonIoTest, RejectsInconsistentCounts) {
  const Dataset data = UniformCubeData(1, 10, 3);
  ASSERT_OK_AND_ASSIGN(SanitizedHistogram h, BuildRecursiveCube(data, CubeOptions{}));
  ASSERT_OK_AND_ASSIGN(Json doc, HistogramToJson(h));
  ASSERT_FALSE(doc["root"]["children"].empty());
  doc["root"]["children"][0]["count"] = doc["root"]["children"][0]["count"].get<int64_t>() + 1;
  EXPECT_FALSE(HistogramFromJson(doc).ok());
}

}  // namespace
}  // namespace histsan
