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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "absl/strings/str_cat.h"
#include "histsan/parallel.h"
#include "histsan/random.h"
#include "histsan/status_macros.h"
#include "histsan/volume.h"

namespace histsan {
namespace {

constexpr int kCentroidSamples = 256;
constexpr int kCoarseDirections = 64;
constexpr int kRefinedDirections = 4;

using Directions = std::vector<std::vector<double>>;

Directions MakeDirections(size_t dim, int random_count,
                          std::mt19937_64& engine) {
  Directions dirs;
  for (size_t k = 0; k < dim; ++k) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> u(dim, 0.0);
      u[k] = sign;
      dirs.push_back(std::move(u));
    }
  }
  for (int i = 0; i < random_count; ++i) {
    std::vector<double> u(dim);
    RandomDirection(engine, u);
    dirs.push_back(std::move(u));
  }
  return dirs;
}

double MaxExit(const Region& region, std::span<const double> p,
               const Directions& dirs, size_t limit) {
  double best = 0.0;
  for (size_t i = 0; i < std::min(limit, dirs.size()); ++i) {
    best = std::max(best, region.RayExit(p, dirs[i]));
  }
  return best;
}

// Ratio of the probed circumradius to the inscribed radius around p.
double Roundness(const Region& region, std::span<const double> p,
                 const Directions& dirs, size_t limit) {
  if (!region.ContainsApprox(p)) return std::numeric_limits<double>::infinity();
  const double inner = region.DistanceToBoundary(p);
  if (inner <= 0.0) return std::numeric_limits<double>::infinity();
  return MaxExit(region, p, dirs, limit) / inner;
}

// Local ascent on the sphere from the best probed directions.
double RefineOuterRadius(const Region& region, std::span<const double> p,
                         const Directions& dirs, std::mt19937_64& engine) {
  const size_t dim = p.size();
  std::vector<std::pair<double, size_t>> exits;
  exits.reserve(dirs.size());
  for (size_t i = 0; i < dirs.size(); ++i) {
    exits.emplace_back(region.RayExit(p, dirs[i]), i);
  }
  std::sort(exits.begin(), exits.end(), std::greater<>());
  double best = exits.front().first;
  std::vector<double> trial(dim), perturb(dim);
  const size_t starts = std::min<size_t>(kRefinedDirections, exits.size());
  for (size_t s = 0; s < starts; ++s) {
    std::vector<double> u = dirs[exits[s].second];
    double value = exits[s].first;
    double step = 0.25;
    int failures = 0;
    while (step > 1e-5) {
      RandomDirection(engine, perturb);
      double norm = 0.0;
      for (size_t k = 0; k < dim; ++k) {
        trial[k] = u[k] + step * perturb[k];
        norm += trial[k] * trial[k];
      }
      norm = std::sqrt(norm);
      for (double& v : trial) v /= norm;
      const double candidate = region.RayExit(p, trial);
      if (candidate > value) {
        value = candidate;
        u = trial;
        failures = 0;
      } else if (++failures >= static_cast<int>(2 * dim + 2)) {
        step *= 0.5;
        failures = 0;
      }
    }
    best = std::max(best, value);
  }
  return best;
}

absl::Status CheckConvexAlongRays(const Region& region,
                                  std::span<const double> p,
                                  const Directions& dirs, double radius) {
  std::vector<double> x(p.size());
  for (const std::vector<double>& u : dirs) {
    const double exit = region.RayExit(p, u);
    if (exit <= 1e-6 * radius) continue;
    for (size_t k = 0; k < p.size(); ++k) x[k] = p[k] + 0.999 * exit * u[k];
    const bool before = region.Contains(x);
    for (size_t k = 0; k < p.size(); ++k) {
      x[k] = p[k] + (1.001 * exit + 1e-9 * radius) * u[k];
    }
    const bool after = region.Contains(x);
    if (!before || after) {
      return absl::InternalError(
          "non-convex region detected: ray membership is inconsistent with "
          "its boundary exit");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<RoundnessCertificate> CertifyVoronoi(const Region& region,
                                                    int samples,
                                                    uint64_t seed) {
  const size_t dim = region.dim();
  const RandomStream stream = RandomStream(seed).Fork(stream_tag::kCertify);
  std::mt19937_64 engine = stream.Fork(0).Engine();
  const Directions dirs = MakeDirections(dim, samples, engine);
  const size_t coarse = std::min(dirs.size(), 2 * dim + kCoarseDirections);

  // Candidate witnesses: the own center and the centroid of a sample.
  std::vector<double> best(region.own_center().values());
  double best_value = Roundness(region, best, dirs, coarse);
  {
    std::mt19937_64 sampler = stream.Fork(1).Engine();
    std::vector<double> centroid(dim, 0.0), x(dim);
    for (int i = 0; i < kCentroidSamples; ++i) {
      HISTSAN_RETURN_IF_ERROR(region.SampleUniform(sampler, x, false));
      for (size_t k = 0; k < dim; ++k) centroid[k] += x[k] / kCentroidSamples;
    }
    const double value = Roundness(region, centroid, dirs, coarse);
    if (value < best_value) {
      best = centroid;
      best_value = value;
    }
  }
  if (!std::isfinite(best_value)) {
    return DegenerateGeometryError(
        "Voronoi cell has no interior witness point");
  }

  // Compass search on k.
  double step = 0.1 * MaxExit(region, best, dirs, coarse);
  const double min_step = 1e-4 * step;
  std::vector<double> trial(dim);
  for (int iter = 0; iter < 200 && step > min_step; ++iter) {
    bool improved = false;
    for (size_t k = 0; k < dim; ++k) {
      for (double sign : {1.0, -1.0}) {
        trial = best;
        trial[k] += sign * step;
        const double value = Roundness(region, trial, dirs, coarse);
        if (value < best_value) {
          best_value = value;
          best = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  std::mt19937_64 refiner = stream.Fork(2).Engine();
  const double outer =
      RefineOuterRadius(region, best, dirs, refiner) * kCertificateSafety;
  const double inner = region.DistanceToBoundary(best) / kCertificateSafety;
  if (!(inner > 0.0) || !std::isfinite(outer)) {
    return DegenerateGeometryError("Voronoi cell has an empty interior");
  }
  HISTSAN_RETURN_IF_ERROR(CheckConvexAlongRays(region, best, dirs, outer));
  return RoundnessCertificate{outer / inner, outer, Point(std::move(best))};
}

}  // namespace

absl::StatusOr<RoundnessCertificate> CertifyRoundness(const Region& region,
                                                      int samples,
                                                      uint64_t seed) {
  if (samples <= 0) return InputError("certification samples must be positive");
  switch (region.kind()) {
    case RegionKind::kBall:
      return RoundnessCertificate{1.0, region.ball().radius,
                                  region.ball().center};
    case RegionKind::kBox: {
      const Region::BoxData& box = region.box();
      double half_diagonal2 = 0.0;
      double min_half_side = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < region.dim(); ++k) {
        const double half = 0.5 * (box.high[k] - box.low[k]);
        half_diagonal2 += half * half;
        min_half_side = std::min(min_half_side, half);
      }
      if (!(min_half_side > 0.0)) {
        return DegenerateGeometryError("box has a zero-width side");
      }
      const double radius = std::sqrt(half_diagonal2);
      return RoundnessCertificate{radius / min_half_side, radius,
                                  region.NominalCenter()};
    }
    case RegionKind::kVoronoi:
      return CertifyVoronoi(region, samples, seed);
  }
  return absl::InternalError("unknown region kind");
}

double MinPairwiseDistance(std::span<const Point> centers) {
  double best2 = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < centers.size(); ++i) {
    for (size_t j = i + 1; j < centers.size(); ++j) {
      best2 = std::min(best2,
                       SquaredDistance(centers[i].coords(), centers[j].coords()));
    }
  }
  return std::sqrt(best2);
}

absl::StatusOr<bool> WellSpreadCheck(std::span<const Point> centers,
                                     double r2) {
  if (centers.size() < 2) return InputError("need at least two centers");
  if (!(r2 > 0.0)) return InputError("spread radius must be positive");
  for (size_t i = 0; i < centers.size(); ++i) {
    for (size_t j = i + 1; j < centers.size(); ++j) {
      if (UncheckedDistance(centers[i].coords(), centers[j].coords()) < r2) {
        return false;
      }
    }
  }
  return true;
}

absl::StatusOr<CoverResult> CoverCheck(std::span<const Point> centers,
                                       const Region& region, double r1,
                                       int64_t probes, uint64_t seed) {
  if (centers.empty()) return InputError("center list is empty");
  if (!(r1 > 0.0)) return InputError("cover radius must be positive");
  if (probes <= 0) return InputError("probe count must be positive");
  for (const Point& c : centers) {
    if (c.dim() != region.dim()) return InputError("center dimension mismatch");
  }
  const RandomStream stream = RandomStream(seed).Fork(stream_tag::kCover);
  const int64_t blocks = (probes + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<double> gaps(blocks, 0.0);
  std::vector<absl::Status> statuses(blocks);
  ParallelFor(blocks, [&](size_t b) {
    std::mt19937_64 engine = stream.Fork(b).Engine();
    std::vector<double> x(region.dim());
    const int64_t n =
        std::min(kMonteCarloBlock, probes - static_cast<int64_t>(b) * kMonteCarloBlock);
    for (int64_t i = 0; i < n; ++i) {
      if (absl::Status s = region.SampleUniform(engine, x); !s.ok()) {
        statuses[b] = s;
        return;
      }
      double nearest2 = std::numeric_limits<double>::infinity();
      for (const Point& c : centers) {
        nearest2 = std::min(nearest2, SquaredDistance(x, c.coords()));
      }
      gaps[b] = std::max(gaps[b], std::sqrt(nearest2));
    }
  });
  for (const absl::Status& s : statuses) HISTSAN_RETURN_IF_ERROR(s);
  const double worst = *std::max_element(gaps.begin(), gaps.end());
  return CoverResult{worst <= r1, worst};
}

absl::StatusOr<PrivacyConditionReport> CheckPrivacyCondition(
    const SanitizedHistogram& histogram,
    const PrivacyConditionOptions& options) {
  if (!(options.c > 1.0)) return InputError("c must exceed 1");
  if (options.q_probes <= 0 || options.r_grid <= 0 ||
      options.volume_samples <= 0) {
    return InputError("probe, radius-grid and volume counts must be positive");
  }
  const std::vector<NodeRef> nodes = EnumerateNodes(histogram);
  std::vector<NodeRef> leaves;
  for (const NodeRef& ref : nodes) {
    if (ref.node->is_leaf()) leaves.push_back(ref);
  }

  struct CellResult {
    absl::Status status;
    int64_t containment = 0;
    int64_t ratios = 0;
    int64_t degenerate = 0;
    double worst = 0.0;
    std::vector<PrivacyFailure> failures;
  };
  std::vector<CellResult> results(leaves.size());
  const RandomStream stream = RandomStream(options.seed).Fork(stream_tag::kPrivacy);
  const size_t dim = histogram.dim();

  ParallelFor(leaves.size(), [&](size_t i) {
    CellResult& out = results[i];
    const NodeRef& ref = leaves[i];
    const Region& cell = *ref.node->region;
    const Region& parent = ref.parent ? *ref.parent->region : cell;
    const RandomStream cell_stream = stream.Fork(ref.id);
    absl::StatusOr<RoundnessCertificate> cert_c = CertifyRoundness(
        cell, options.certify_samples, cell_stream.Fork(0).key());
    absl::StatusOr<RoundnessCertificate> cert_p = CertifyRoundness(
        parent, options.certify_samples, cell_stream.Fork(1).key());
    if (!cert_c.ok() || !cert_p.ok()) {
      const absl::Status& s = cert_c.ok() ? cert_p.status() : cert_c.status();
      if (IsDegenerateGeometry(s)) {
        out.degenerate += static_cast<int64_t>(options.q_probes) * options.r_grid;
      } else {
        out.status = s;
      }
      return;
    }
    const double radius = cert_c->radius;
    const double r_low = radius * 1e-4;
    const double r_high = 2.0 * radius;
    std::mt19937_64 engine = cell_stream.Fork(2).Engine();
    std::vector<double> q(dim);
    for (int a = 0; a < options.q_probes; ++a) {
      UniformInBall(engine, cert_c->center.coords(), 2.0 * radius, q);
      const Point qp(q);
      const double to_parent = UncheckedDistance(q, cert_p->center.coords());
      for (int b = 0; b < options.r_grid; ++b) {
        const double r =
            options.r_grid == 1
                ? r_low
                : r_low * std::pow(r_high / r_low,
                                   static_cast<double>(b) / (options.r_grid - 1));
        if (options.c * r >= to_parent + cert_p->radius) {
          ++out.containment;
          continue;
        }
        absl::StatusOr<RatioEstimate> ratio = IntersectionVolumeRatio(
            qp, r, options.c, cell, options.volume_samples,
            cell_stream.Fork(3).Fork(static_cast<uint64_t>(a) * options.r_grid + b).key());
        if (!ratio.ok()) {
          if (IsDegenerateGeometry(ratio.status())) {
            ++out.degenerate;
            continue;
          }
          out.status = ratio.status();
          return;
        }
        ++out.ratios;
        out.worst = std::max(out.worst, ratio->ratio);
        if (options.epsilon.has_value() && ratio->ratio >= *options.epsilon) {
          out.failures.push_back(PrivacyFailure{ref.id, qp, r, ratio->ratio});
        }
      }
    }
  });

  PrivacyConditionReport report;
  report.cells_checked = static_cast<int64_t>(leaves.size());
  report.probes_per_cell = static_cast<int64_t>(options.q_probes) * options.r_grid;
  report.c = options.c;
  for (CellResult& r : results) {
    HISTSAN_RETURN_IF_ERROR(r.status);
    report.containment += r.containment;
    report.ratios_recorded += r.ratios;
    report.degenerate += r.degenerate;
    report.epsilon_observed = std::max(report.epsilon_observed, r.worst);
    for (PrivacyFailure& f : r.failures) report.failures.push_back(std::move(f));
  }
  return report;
}

}  // namespace histsan
