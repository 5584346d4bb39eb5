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

#include "histsan/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "absl/strings/str_cat.h"
#include "histsan/parallel.h"
#include "histsan/random.h"
#include "histsan/sanitizer.h"
#include "histsan/status_macros.h"

namespace histsan {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Dense Prim over n vertices; returns the total weight and, optionally, the
// tree edges.
double PrimMst(size_t n, const std::function<double(size_t, size_t)>& weight,
               std::vector<std::pair<size_t, size_t>>* edges) {
  if (n < 2) return 0.0;
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, kInfinity);
  std::vector<size_t> link(n, 0);
  double total = 0.0;
  size_t current = 0;
  in_tree[0] = true;
  for (size_t step = 1; step < n; ++step) {
    for (size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double w = weight(current, v);
      if (w < best[v]) {
        best[v] = w;
        link[v] = current;
      }
    }
    size_t next = n;
    for (size_t v = 0; v < n; ++v) {
      if (!in_tree[v] && (next == n || best[v] < best[next])) next = v;
    }
    in_tree[next] = true;
    total += best[next];
    if (edges != nullptr) edges->emplace_back(link[next], next);
    current = next;
  }
  return total;
}

bool IsBox(const SanitizedNode* node) {
  return node->region->kind() == RegionKind::kBox;
}

}  // namespace

HistogramGeometry::HistogramGeometry(const SanitizedHistogram& histogram,
                                     int samples, uint64_t seed)
    : histogram_(histogram), certify_samples_(samples), seed_(seed) {
  for (const NodeRef& ref : EnumerateNodes(histogram)) ids_[ref.node] = ref.id;
}

absl::StatusOr<std::unique_ptr<HistogramGeometry>> HistogramGeometry::Create(
    const SanitizedHistogram& histogram, int certify_samples, uint64_t seed) {
  if (certify_samples <= 0) {
    return InputError("certification samples must be positive");
  }
  return std::unique_ptr<HistogramGeometry>(
      new HistogramGeometry(histogram, certify_samples, seed));
}

absl::StatusOr<const SanitizedNode*> HistogramGeometry::Leaf(
    std::span<const double> x) const {
  if (x.size() != histogram_.dim()) return InputError("point dimension mismatch");
  const SanitizedNode* leaf = LocateLeaf(histogram_, x);
  if (leaf == nullptr) return InputError("point lies outside the histogram root");
  return leaf;
}

absl::StatusOr<RoundnessCertificate> HistogramGeometry::Certificate(
    const SanitizedNode* node) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = certs_.find(node);
    if (it != certs_.end()) return it->second;
  }
  const uint64_t seed =
      RandomStream(seed_).Fork(stream_tag::kCertify, ids_.at(node)).key();
  HISTSAN_ASSIGN_OR_RETURN(
      RoundnessCertificate cert,
      CertifyRoundness(*node->region, certify_samples_, seed));
  std::lock_guard<std::mutex> lock(mutex_);
  return certs_.emplace(node, std::move(cert)).first->second;
}

absl::StatusOr<double> HistogramGeometry::Diameter(
    const SanitizedNode* leaf) const {
  if (IsBox(leaf)) {
    const Region::BoxData& box = leaf->region->box();
    double sum = 0.0;
    for (size_t k = 0; k < box.low.dim(); ++k) {
      const double side = box.high[k] - box.low[k];
      sum += side * side;
    }
    return std::sqrt(sum);
  }
  HISTSAN_ASSIGN_OR_RETURN(RoundnessCertificate cert, Certificate(leaf));
  return 2.0 * cert.radius;
}

absl::StatusOr<double> HistogramGeometry::CellDistance(
    const SanitizedNode* a, const SanitizedNode* b) const {
  // Canonical order keeps the result bitwise symmetric.
  if (ids_.at(b) < ids_.at(a)) std::swap(a, b);
  if (IsBox(a) && IsBox(b)) {
    const Region::BoxData& x = a->region->box();
    const Region::BoxData& y = b->region->box();
    double sum = 0.0;
    for (size_t k = 0; k < x.low.dim(); ++k) {
      const double far =
          std::max(std::abs(x.high[k] - y.low[k]), std::abs(y.high[k] - x.low[k]));
      sum += far * far;
    }
    return std::sqrt(sum);
  }
  HISTSAN_ASSIGN_OR_RETURN(RoundnessCertificate ca, Certificate(a));
  HISTSAN_ASSIGN_OR_RETURN(RoundnessCertificate cb, Certificate(b));
  return UncheckedDistance(ca.center.coords(), cb.center.coords()) +
         ca.radius + cb.radius;
}

absl::StatusOr<double> HistDistance(const HistogramGeometry& geometry,
                                    const Point& x, const Point& y) {
  HISTSAN_ASSIGN_OR_RETURN(const SanitizedNode* a, geometry.Leaf(x.coords()));
  HISTSAN_ASSIGN_OR_RETURN(const SanitizedNode* b, geometry.Leaf(y.coords()));
  return geometry.CellDistance(a, b);
}

double GridDiameterBound(size_t dim, int t, double t_radius) {
  if (t_radius <= 0.0) return 0.0;
  const double d = static_cast<double>(dim);
  const double factor = std::min(std::pow(d, 1.5), static_cast<double>(t) * d);
  const double levels = std::max(1.0, std::log2(1.0 / t_radius));
  return 2.0 * factor * t_radius * levels;
}

absl::StatusOr<DiameterStats> MeasureDiameters(
    const DiameterBuilderConfig& config, const Dataset& data, int t,
    int trials, uint64_t seed) {
  if (config.method == SanitizerMethod::kCube ||
      (config.method == SanitizerMethod::kVoronoi &&
       config.centers == CenterMethod::kGreedySpread)) {
    return InputError(
        "diameter measurement needs a randomized builder (grid, or Voronoi "
        "with uniform centers)");
  }
  if (trials < 30) return InputError("at least 30 trials are required");
  if (t < 1) return InputError("t must be a positive integer");
  if (data.size() < 2) return InputError("need at least two points");
  if (config.method == SanitizerMethod::kVoronoi && config.support == nullptr) {
    return InputError("Voronoi measurement needs a support region");
  }
  const size_t n = data.size();

  std::vector<double> t_radius(n);
  for (size_t i = 0; i < n; ++i) {
    HISTSAN_ASSIGN_OR_RETURN(t_radius[i], TRadiusOfIndex(data, i, t));
  }

  const RandomStream stream = RandomStream(seed).Fork(stream_tag::kTrial);
  std::vector<std::vector<double>> diameters(trials, std::vector<double>(n));
  std::vector<absl::Status> statuses(trials);
  ParallelFor(static_cast<size_t>(trials), [&](size_t j) {
    const uint64_t trial_seed = stream.Fork(j).key();
    absl::StatusOr<SanitizedHistogram> h;
    if (config.method == SanitizerMethod::kGrid) {
      GridOptions options;
      options.t = t;
      options.max_depth = config.max_depth;
      options.seed = trial_seed;
      h = BuildShiftedGrid(data, options);
    } else {
      VoronoiOptions options;
      options.t = t;
      options.max_depth = config.max_depth;
      options.centers = config.centers;
      options.seed = trial_seed;
      options.override_m = config.override_m;
      options.centers_budget = config.centers_budget;
      options.probe_samples = config.probe_samples;
      options.certify_samples = config.certify_samples;
      h = BuildVoronoi(data, config.support, options);
    }
    if (!h.ok()) {
      statuses[j] = h.status();
      return;
    }
    absl::StatusOr<std::unique_ptr<HistogramGeometry>> geometry =
        HistogramGeometry::Create(*h, config.certify_samples, trial_seed);
    if (!geometry.ok()) {
      statuses[j] = geometry.status();
      return;
    }
    for (size_t i = 0; i < n; ++i) {
      absl::StatusOr<const SanitizedNode*> leaf =
          (*geometry)->Leaf(data[i].coords());
      absl::StatusOr<double> diameter =
          leaf.ok() ? (*geometry)->Diameter(*leaf)
                    : absl::StatusOr<double>(leaf.status());
      if (!diameter.ok()) {
        statuses[j] = diameter.status();
        return;
      }
      diameters[j][i] = *diameter;
    }
  });
  for (const absl::Status& s : statuses) HISTSAN_RETURN_IF_ERROR(s);

  DiameterStats stats;
  stats.trials = trials;
  stats.t = t;
  stats.per_point.resize(n);
  for (size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < trials; ++j) sum += diameters[j][i];
    stats.per_point[i] = DiameterEntry{i, t_radius[i], sum / trials, 0.0};
  }
  const size_t dim = data.dim();
  if (config.method == SanitizerMethod::kGrid) {
    stats.bound_kind = "grid";
    for (DiameterEntry& e : stats.per_point) {
      e.bound = GridDiameterBound(dim, t, e.t_radius);
    }
  } else {
    stats.bound_kind = "voronoi";
    const double depth = config.max_depth;
    auto base = [&](double r) {
      return depth * static_cast<double>(dim) * r + std::ldexp(1.0, -config.max_depth);
    };
    double kappa = 0.0;
    for (const DiameterEntry& e : stats.per_point) {
      kappa = std::max(kappa, e.mean_diameter / base(e.t_radius));
    }
    stats.kappa = kappa;
    for (DiameterEntry& e : stats.per_point) e.bound = kappa * base(e.t_radius);
  }
  return stats;
}

absl::StatusOr<CutResult> CutProbability(const Region& region, const Point& x,
                                         std::span<const double> r_values,
                                         const CutOptions& options) {
  if (options.m < 2) return InputError("need at least two centers");
  if (options.trials <= 0) return InputError("trial count must be positive");
  if (options.random_probes < 0) return InputError("probe count must be nonnegative");
  if (r_values.empty()) return InputError("radius list is empty");
  if (x.dim() != region.dim()) return InputError("point dimension mismatch");
  if (!region.Contains(x.coords())) return InputError("x lies outside the region");
  const RandomStream stream = RandomStream(options.seed);
  HISTSAN_ASSIGN_OR_RETURN(
      RoundnessCertificate cert,
      CertifyRoundness(region, options.certify_samples,
                       stream.Fork(stream_tag::kCertify).key()));
  const double rho = cert.radius;
  for (double r : r_values) {
    if (!(r > 0.0)) return InputError("radii must be positive");
    if (r >= rho) {
      return InputError(absl::StrCat("radius ", r,
                                     " is not below the certified radius ", rho));
    }
  }
  const size_t dim = region.dim();
  std::vector<size_t> order(r_values.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return r_values[a] < r_values[b]; });

  // cut[j][i]: trial j is cut at the i-th smallest radius.
  std::vector<std::vector<char>> cut(options.trials,
                                     std::vector<char>(r_values.size(), 0));
  std::vector<absl::Status> statuses(options.trials);
  const RandomStream trials = stream.Fork(stream_tag::kTrial);
  ParallelFor(static_cast<size_t>(options.trials), [&](size_t j) {
    const RandomStream trial = trials.Fork(j);
    absl::StatusOr<std::vector<Point>> centers = PickCentersUniform(
        region, options.m, options.m, trial.Fork(stream_tag::kCenters).key());
    if (!centers.ok()) {
      statuses[j] = centers.status();
      return;
    }
    // Unit offsets: axis directions then uniform points of the unit ball.
    std::vector<std::vector<double>> offsets;
    for (size_t k = 0; k < dim; ++k) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> u(dim, 0.0);
        u[k] = sign;
        offsets.push_back(std::move(u));
      }
    }
    std::mt19937_64 engine = trial.Fork(stream_tag::kProbe).Engine();
    const std::vector<double> origin(dim, 0.0);
    for (int p = 0; p < options.random_probes; ++p) {
      std::vector<double> v(dim);
      UniformInBall(engine, origin, 1.0, v);
      offsets.push_back(std::move(v));
    }
    auto nearest = [&](std::span<const double> y) {
      size_t best = 0;
      double best2 = kInfinity;
      for (size_t c = 0; c < centers->size(); ++c) {
        const double d2 = SquaredDistance(y, (*centers)[c].coords());
        if (d2 < best2) {
          best2 = d2;
          best = c;
        }
      }
      return best;
    };
    const size_t home = nearest(x.coords());
    bool is_cut = false;
    std::vector<double> probe(dim);
    for (size_t i = 0; i < order.size(); ++i) {
      const double r = r_values[order[i]];
      for (const std::vector<double>& u : offsets) {
        if (is_cut) break;
        for (size_t k = 0; k < dim; ++k) probe[k] = x[k] + r * u[k];
        if (!region.Contains(probe)) continue;
        if (nearest(probe) != home) is_cut = true;
      }
      cut[j][i] = is_cut ? 1 : 0;
    }
  });
  for (const absl::Status& s : statuses) HISTSAN_RETURN_IF_ERROR(s);

  CutResult result;
  result.rho = rho;
  result.points.resize(r_values.size());
  for (size_t i = 0; i < order.size(); ++i) {
    int64_t hits = 0;
    for (int j = 0; j < options.trials; ++j) hits += cut[j][i];
    const double p = static_cast<double>(hits) / options.trials;
    result.points[order[i]] = CutPoint{r_values[order[i]], p,
                                       std::sqrt(p * (1.0 - p) / options.trials)};
  }
  return result;
}

LinearFit FitLine(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  LinearFit fit;
  if (n < 2) return fit;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

double EuclideanMstCost(const Dataset& data,
                        std::vector<std::pair<size_t, size_t>>* edges) {
  return PrimMst(
      data.size(),
      [&](size_t i, size_t j) {
        return UncheckedDistance(data[i].coords(), data[j].coords());
      },
      edges);
}

absl::StatusOr<MstComparison> MstCompare(const HistogramGeometry& geometry,
                                         const Dataset& data) {
  if (data.size() < 2) return InputError("need at least two points");
  if (data.dim() != geometry.histogram().dim()) {
    return InputError("dataset and histogram differ in dimension");
  }
  const size_t n = data.size();
  // Leaf slot of every point; d_H depends on points only through it.
  std::vector<const SanitizedNode*> leaves;
  std::unordered_map<const SanitizedNode*, size_t> slot_of;
  std::vector<size_t> slot(n);
  std::vector<double> diameter;
  for (size_t i = 0; i < n; ++i) {
    HISTSAN_ASSIGN_OR_RETURN(const SanitizedNode* leaf,
                             geometry.Leaf(data[i].coords()));
    auto [it, inserted] = slot_of.emplace(leaf, leaves.size());
    if (inserted) {
      leaves.push_back(leaf);
      HISTSAN_ASSIGN_OR_RETURN(double d, geometry.Diameter(leaf));
      diameter.push_back(d);
    }
    slot[i] = it->second;
  }
  const size_t m = leaves.size();
  std::vector<double> cache(m * m, std::numeric_limits<double>::quiet_NaN());
  absl::Status status;
  auto cell_distance = [&](size_t a, size_t b) {
    double& entry = cache[a * m + b];
    if (std::isnan(entry)) {
      absl::StatusOr<double> d = geometry.CellDistance(leaves[a], leaves[b]);
      if (!d.ok()) {
        status = d.status();
        entry = kInfinity;
      } else {
        entry = *d;
      }
      cache[b * m + a] = entry;
    }
    return entry;
  };

  MstComparison out;
  std::vector<std::pair<size_t, size_t>> edges;
  out.actual_cost = EuclideanMstCost(data, &edges);
  out.hist_cost = PrimMst(
      n, [&](size_t i, size_t j) { return cell_distance(slot[i], slot[j]); },
      nullptr);
  HISTSAN_RETURN_IF_ERROR(status);
  out.gap = out.hist_cost - out.actual_cost;
  for (const auto& [i, j] : edges) {
    out.gap_bound += diameter[slot[i]] + diameter[slot[j]];
  }
  return out;
}

}  // namespace histsan
