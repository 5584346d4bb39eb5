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

#ifndef HISTSAN_ROUNDEDNESS_H_
#define HISTSAN_ROUNDEDNESS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "histsan/histogram.h"
#include "histsan/point.h"
#include "histsan/region.h"

namespace histsan {

inline constexpr int kDefaultCertifySamples = 256;
// Multiplicative slack applied to probed radii of Voronoi cells.
inline constexpr double kCertificateSafety = 1.01;

// Witness that B(center, radius / k) ⊆ C ⊆ B(center, radius).
struct RoundnessCertificate {
  double k = 1.0;
  double radius = 0.0;
  Point center;

  double inner_radius() const { return radius / k; }
};

// Boxes and balls get closed-form certificates. Voronoi cells get a witness
// point chosen to minimize k, an exact inscribed radius and a probed
// circumradius, both padded by kCertificateSafety.
absl::StatusOr<RoundnessCertificate> CertifyRoundness(const Region& region,
                                                      int samples,
                                                      uint64_t seed);

double MinPairwiseDistance(std::span<const Point> centers);

absl::StatusOr<bool> WellSpreadCheck(std::span<const Point> centers,
                                     double r2);

struct CoverResult {
  bool covered = false;
  double worst_gap = 0.0;
};

absl::StatusOr<CoverResult> CoverCheck(std::span<const Point> centers,
                                       const Region& region, double r1,
                                       int64_t probes, uint64_t seed);

struct PrivacyConditionOptions {
  double c = 4.0;
  int q_probes = 16;
  int r_grid = 8;
  int64_t volume_samples = 10000;
  uint64_t seed = 0;
  int certify_samples = kDefaultCertifySamples;
  // Ratios at or above this value are listed as failures.
  std::optional<double> epsilon;
};

struct PrivacyFailure {
  size_t cell_id = 0;
  Point q;
  double r = 0.0;
  double ratio = 0.0;
};

struct PrivacyConditionReport {
  int64_t cells_checked = 0;
  int64_t probes_per_cell = 0;
  double c = 0.0;
  double epsilon_observed = 0.0;
  int64_t containment = 0;
  int64_t ratios_recorded = 0;
  int64_t degenerate = 0;
  std::vector<PrivacyFailure> failures;
};

absl::StatusOr<PrivacyConditionReport> CheckPrivacyCondition(
    const SanitizedHistogram& histogram,
    const PrivacyConditionOptions& options);

}  // namespace histsan

#endif  // HISTSAN_ROUNDEDNESS_H_
