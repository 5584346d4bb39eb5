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

#ifndef HISTSAN_METRICS_H_
#define HISTSAN_METRICS_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"
#include "histsan/histogram.h"
#include "histsan/point.h"
#include "histsan/region.h"
#include "histsan/roundedness.h"

namespace histsan {

// Leaf lookup, diameters and cell-to-cell distances for one histogram.
// Certificates of non-box leaves are computed on first use with a seed
// derived from the leaf's preorder id, so results do not depend on query
// order. Thread-safe.
class HistogramGeometry {
 public:
  static absl::StatusOr<std::unique_ptr<HistogramGeometry>> Create(
      const SanitizedHistogram& histogram,
      int certify_samples = kDefaultCertifySamples, uint64_t seed = 0);

  const SanitizedHistogram& histogram() const { return histogram_; }

  // Smallest cell containing x; input error outside the root.
  absl::StatusOr<const SanitizedNode*> Leaf(std::span<const double> x) const;

  // Box: exact diagonal. Otherwise twice the certified radius.
  absl::StatusOr<double> Diameter(const SanitizedNode* leaf) const;

  // sup over a in A, b in B of |a - b|; exact for two boxes, otherwise the
  // certificate bound |p_A - p_B| + R_A + R_B.
  absl::StatusOr<double> CellDistance(const SanitizedNode* a,
                                      const SanitizedNode* b) const;

 private:
  HistogramGeometry(const SanitizedHistogram& histogram, int samples,
                    uint64_t seed);
  absl::StatusOr<RoundnessCertificate> Certificate(
      const SanitizedNode* node) const;

  const SanitizedHistogram& histogram_;
  int certify_samples_;
  uint64_t seed_;
  std::unordered_map<const SanitizedNode*, size_t> ids_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<const SanitizedNode*, RoundnessCertificate> certs_;
};

absl::StatusOr<double> HistDistance(const HistogramGeometry& geometry,
                                    const Point& x, const Point& y);

struct DiameterBuilderConfig {
  SanitizerMethod method = SanitizerMethod::kGrid;
  int max_depth = 8;
  // Voronoi only.
  RegionPtr support;
  CenterMethod centers = CenterMethod::kUniformRandom;
  std::optional<int64_t> override_m;
  int64_t centers_budget = int64_t{1} << 20;
  int64_t probe_samples = 100000;
  int certify_samples = kDefaultCertifySamples;
};

struct DiameterEntry {
  size_t index = 0;
  double t_radius = 0.0;
  double mean_diameter = 0.0;
  double bound = 0.0;
};

struct DiameterStats {
  std::vector<DiameterEntry> per_point;
  int trials = 0;
  int t = 0;
  // "grid" or "voronoi".
  std::string bound_kind;
  // Fitted constant of the Voronoi bound.
  std::optional<double> kappa;
};

// 2 min{d^1.5, t d} r max(1, log2(1/r)); zero when r = 0.
double GridDiameterBound(size_t dim, int t, double t_radius);

absl::StatusOr<DiameterStats> MeasureDiameters(
    const DiameterBuilderConfig& config, const Dataset& data, int t,
    int trials, uint64_t seed);

struct CutOptions {
  int64_t m = 512;
  int trials = 1000;
  uint64_t seed = 0;
  int random_probes = 100;
  int certify_samples = kDefaultCertifySamples;
};

struct CutPoint {
  double r = 0.0;
  double probability = 0.0;
  double std_error = 0.0;
};

struct CutResult {
  // Certified radius of the region.
  double rho = 0.0;
  // In the order of the requested radii.
  std::vector<CutPoint> points;
};

// Probes of B(x, r): x, x +- r e_k and `random_probes` points r v with v
// uniform in the unit ball, shared across r. A trial counts as cut at r
// when the probes inside the region at radii up to r reach two cells.
absl::StatusOr<CutResult> CutProbability(const Region& region, const Point& x,
                                         std::span<const double> r_values,
                                         const CutOptions& options);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit FitLine(std::span<const double> x, std::span<const double> y);

struct MstComparison {
  double actual_cost = 0.0;
  double hist_cost = 0.0;
  double gap = 0.0;
  double gap_bound = 0.0;
};

// Total weight of the Euclidean MST and its edges as (i, j) pairs.
double EuclideanMstCost(const Dataset& data,
                        std::vector<std::pair<size_t, size_t>>* edges = nullptr);

absl::StatusOr<MstComparison> MstCompare(const HistogramGeometry& geometry,
                                         const Dataset& data);

}  // namespace histsan

#endif  // HISTSAN_METRICS_H_
