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

#include "histsan/adversary.h"

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "histsan/parallel.h"
#include "histsan/random.h"
#include "histsan/sanitizer.h"
#include "test_util.h"

namespace histsan {
namespace {

using ::histsan::testing::MakeDataset;
using ::histsan::testing::UniformCubeData;

// Brute-force reading of the definition.
std::optional<size_t> OracleVictim(const std::vector<double>& q,
                                   const std::vector<std::vector<double>>& rows,
                                   double c, int t) {
  auto dist = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
  };
  for (size_t y = 0; y < rows.size(); ++y) {
    const double radius = c * dist(q, rows[y]);
    int inside = 0;
    for (const auto& z : rows) inside += dist(q, z) <= radius ? 1 : 0;
    if (inside < t) return y;
  }
  return std::nullopt;
}

IsolationParams Params(double c, int t) { return IsolationParams::Create(c, t).value(); }

TEST(IsolationParamsTest, Validation) {
  EXPECT_OK(IsolationParams::Create(1.0, 1));
  EXPECT_FALSE(IsolationParams::Create(0.99, 2).ok());
  EXPECT_FALSE(IsolationParams::Create(4.0, 0).ok());
  EXPECT_FALSE(IsolationParams::Create(std::nan(""), 2).ok());
}

TEST(IsolatesTest, SinglePointWithTOneNeverIsolated) {
  ASSERT_OK_AND_ASSIGN(IsolationResult r,
                       Isolates(Point({1.0, 0.0}), MakeDataset({{0.0, 0.0}}), Params(4, 1)));
  EXPECT_FALSE(r.isolated);
  EXPECT_FALSE(r.victim.has_value());
}

TEST(IsolatesTest, FarClusterLeavesOriginIsolated) {
  const Dataset data = MakeDataset({{0, 0}, {10, 0}, {10, 1}, {10, -1}});
  ASSERT_OK_AND_ASSIGN(IsolationResult r, Isolates(Point({0.0, 0.1}), data, Params(4, 2)));
  EXPECT_TRUE(r.isolated);
  EXPECT_EQ(r.victim, 0u);
}

TEST(IsolatesTest, CoLocatedClusterNeverIsolated) {
  const Dataset data = MakeDataset({{0.3, 0.3}, {0.3, 0.3}, {0.3, 0.3}});
  std::mt19937_64 engine = RandomStream(1).Engine();
  for (int i = 0; i < 200; ++i) {
    const Point q({UniformUnit(engine) * 4 - 2, UniformUnit(engine) * 4 - 2});
    for (int t : {2, 3}) {
      ASSERT_OK_AND_ASSIGN(IsolationResult r, Isolates(q, data, Params(1.0, t)));
      EXPECT_FALSE(r.isolated);
    }
  }
  // An exact hit counts the multiplicity of the location.
  ASSERT_OK_AND_ASSIGN(IsolationResult hit, Isolates(Point({0.3, 0.3}), data, Params(4, 4)));
  EXPECT_TRUE(hit.isolated);
}

TEST(IsolatesTest, DimensionMismatch) {
  EXPECT_FALSE(Isolates(Point({0.0}), MakeDataset({{0.0, 0.0}}), Params(2, 2)).ok());
}

TEST(IsolatesTest, AgreesWithBruteForce) {
  std::mt19937_64 engine = RandomStream(2).Engine();
  for (int trial = 0; trial < 300; ++trial) {
    const size_t dim = 1 + trial % 3;
    std::vector<std::vector<double>> rows(12, std::vector<double>(dim));
    for (auto& r : rows) {
      for (double& v : r) v = std::round((UniformUnit(engine) * 2 - 1) * 8) / 8;
    }
    std::vector<double> q(dim);
    for (double& v : q) v = std::round((UniformUnit(engine) * 2 - 1) * 8) / 8;
    const double c = 1.0 + 3.0 * UniformUnit(engine);
    const int t = 1 + trial % 4;
    ASSERT_OK_AND_ASSIGN(IsolationResult r, Isolates(Point(q), MakeDataset(rows), Params(c, t)));
    const std::optional<size_t> expected = OracleVictim(q, rows, c, t);
    EXPECT_EQ(r.isolated, expected.has_value());
    EXPECT_EQ(r.victim, expected);
  }
}

// Isolation is antitone in c and monotone in t.
TEST(IsolatesTest, MonotoneInParameters) {
  const Dataset data = UniformCubeData(3, 40, 3);
  std::mt19937_64 engine = RandomStream(4).Engine();
  for (int i = 0; i < 300; ++i) {
    std::vector<double> q(3);
    for (double& v : q) v = UniformUnit(engine) * 2 - 1;
    for (size_t y = 0; y < data.size(); ++y) {
      std::vector<bool> only(data.size(), true);
      only[y] = false;
      bool previous = true;
      for (double c : {1.0, 1.5, 2.0, 4.0, 8.0}) {
        const bool now = IsolatesExcluding(q, data, Params(c, 3), only).isolated;
        EXPECT_TRUE(previous || !now);
        previous = now;
      }
      previous = false;
      for (int t : {1, 2, 3, 5, 8}) {
        const bool now = IsolatesExcluding(q, data, Params(2.0, t), only).isolated;
        EXPECT_TRUE(!previous || now);
        previous = now;
      }
    }
  }
}

TEST(StrategyNameTest, RoundTrip) {
  for (AttackStrategy s : {AttackStrategy::kUniformInLeaf, AttackStrategy::kLeafCenterWeighted,
                           AttackStrategy::kAuxInformed}) {
    ASSERT_OK_AND_ASSIGN(AttackStrategy parsed, ParseStrategy(StrategyName(s)));
    EXPECT_EQ(parsed, s);
  }
  EXPECT_FALSE(ParseStrategy("oracle").ok());
}

SanitizedHistogram CubeHistogram(const Dataset& data) {
  return BuildRecursiveCube(data, CubeOptions{2, 8}).value();
}

void ExpectConsistent(const IsolationReport& report) {
  EXPECT_LE(report.successes, report.queries);
  EXPECT_DOUBLE_EQ(report.rate, static_cast<double>(report.successes) / report.queries);
  int64_t hits = 0;
  for (const auto& [index, count] : report.per_point_hits) hits += count;
  EXPECT_EQ(hits, report.successes);
}

TEST(AttackTest, CoLocatedDataGivesZeroRate) {
  const Dataset data = MakeDataset(std::vector<std::vector<double>>(6, {0.2, -0.4}));
  const SanitizedHistogram h = CubeHistogram(data);
  for (AttackStrategy s : {AttackStrategy::kUniformInLeaf, AttackStrategy::kLeafCenterWeighted,
                           AttackStrategy::kAuxInformed}) {
    AttackOptions options;
    options.strategy = s;
    options.queries = 2000;
    if (s == AttackStrategy::kAuxInformed) options.aux_indices = std::vector<size_t>{0, 1};
    ASSERT_OK_AND_ASSIGN(IsolationReport report, Attack(h, data, Params(4, 2), options));
    EXPECT_EQ(report.successes, 0) << StrategyName(s);
    ExpectConsistent(report);
  }
}

TEST(AttackTest, AuxWithAllButOneKnown) {
  const Dataset data = UniformCubeData(2, 30, 5);
  const SanitizedHistogram h = CubeHistogram(data);
  std::vector<size_t> aux;
  for (size_t i = 0; i < 30; ++i) {
    if (i != 17) aux.push_back(i);
  }
  AttackOptions options;
  options.strategy = AttackStrategy::kAuxInformed;
  options.queries = 3000;
  options.aux_indices = aux;
  ASSERT_OK_AND_ASSIGN(IsolationReport report, Attack(h, data, Params(2, 2), options));
  ExpectConsistent(report);
  EXPECT_EQ(report.aux_subset_size, 29);
  EXPECT_LE(report.rate, 1.0);
  for (const auto& [index, count] : report.per_point_hits) EXPECT_EQ(index, 17u);
}

TEST(AttackTest, AuxIndicesRejectedForOtherStrategies) {
  const Dataset data = UniformCubeData(2, 10, 5);
  AttackOptions options;
  options.aux_indices = std::vector<size_t>{1};
  EXPECT_EQ(Attack(CubeHistogram(data), data, Params(2, 2), options).status().code(),
            absl::StatusCode::kInvalidArgument);
  options.strategy = AttackStrategy::kAuxInformed;
  options.aux_indices = std::vector<size_t>{10};
  EXPECT_FALSE(Attack(CubeHistogram(data), data, Params(2, 2), options).ok());
}

TEST(AttackTest, ScoresMatchIndependentReplay) {
  // A single-node histogram makes UniformInLeaf queries uniform on the cube,
  // so its rate must match a brute-force Monte Carlo on fresh queries.
  const Dataset data = UniformCubeData(2, 20, 8);
  ASSERT_OK_AND_ASSIGN(SanitizedHistogram h, BuildRecursiveCube(data, CubeOptions{100, 8}));
  ASSERT_TRUE(h.root.is_leaf());
  AttackOptions options;
  options.queries = 20000;
  ASSERT_OK_AND_ASSIGN(IsolationReport report, Attack(h, data, Params(2, 2), options));
  std::vector<std::vector<double>> rows;
  for (const Point& p : data.points()) rows.push_back(p.values());
  std::mt19937_64 engine = RandomStream(99).Engine();
  int successes = 0;
  const int kQueries = 20000;
  for (int i = 0; i < kQueries; ++i) {
    std::vector<double> q = {UniformUnit(engine) * 2 - 1, UniformUnit(engine) * 2 - 1};
    successes += OracleVictim(q, rows, 2, 2).has_value() ? 1 : 0;
  }
  const double p = static_cast<double>(successes) / kQueries;
  const double se = std::sqrt(2 * p * (1 - p) / kQueries);
  EXPECT_NEAR(report.rate, p, 4 * se + 1e-9);
}

TEST(AttackTest, DeterministicAndThreadIndependent) {
  const Dataset data = UniformCubeData(4, 100, 6);
  const SanitizedHistogram h = CubeHistogram(data);
  AttackOptions options;
  options.strategy = AttackStrategy::kLeafCenterWeighted;
  options.queries = 3000;
  options.seed = 12;
  SetNumThreads(1);
  ASSERT_OK_AND_ASSIGN(IsolationReport a, Attack(h, data, Params(4, 2), options));
  SetNumThreads(4);
  ASSERT_OK_AND_ASSIGN(IsolationReport b, Attack(h, data, Params(4, 2), options));
  SetNumThreads(0);
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_EQ(a.per_point_hits, b.per_point_hits);
}

TEST(ChooseAuxSubsetTest, SizeSortedAndSeeded) {
  ASSERT_OK_AND_ASSIGN(std::vector<size_t> a, ChooseAuxSubset(100, 0.25, 3));
  ASSERT_OK_AND_ASSIGN(std::vector<size_t> b, ChooseAuxSubset(100, 0.25, 3));
  ASSERT_OK_AND_ASSIGN(std::vector<size_t> c, ChooseAuxSubset(100, 0.25, 4));
  EXPECT_EQ(a.size(), 25u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_FALSE(ChooseAuxSubset(10, 1.5, 0).ok());
}

}  // namespace
}  // namespace histsan
