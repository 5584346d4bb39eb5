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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "absl/strings/str_cat.h"
#include "histsan/parallel.h"
#include "histsan/random.h"
#include "histsan/status_macros.h"

namespace histsan {
namespace {

// Fraction of aux-informed queries placed next to a known point.
constexpr double kNearKnownProbability = 0.25;
// Offset length relative to the containing leaf's bounding diagonal.
constexpr double kNearKnownOffset = 0.05;

size_t PickWeighted(const std::vector<double>& cumulative,
                    std::mt19937_64& engine) {
  const double u = UniformUnit(engine) * cumulative.back();
  const size_t i = static_cast<size_t>(
      std::upper_bound(cumulative.begin(), cumulative.end(), u) -
      cumulative.begin());
  return std::min(i, cumulative.size() - 1);
}

double BoundsDiagonal(const Region& region) {
  double sum = 0.0;
  for (size_t k = 0; k < region.dim(); ++k) {
    const double side = region.bounds_high()[k] - region.bounds_low()[k];
    sum += side * side;
  }
  return std::sqrt(sum);
}

}  // namespace

absl::StatusOr<IsolationParams> IsolationParams::Create(double c, int t) {
  if (!(c >= 1.0) || !std::isfinite(c)) return InputError("c must be at least 1");
  if (t < 1) return InputError("t must be a positive integer");
  return IsolationParams(c, t);
}

IsolationResult IsolatesExcluding(std::span<const double> q,
                                  const Dataset& data,
                                  const IsolationParams& params,
                                  const std::vector<bool>& excluded) {
  const size_t n = data.size();
  std::vector<double> dist(n);
  for (size_t i = 0; i < n; ++i) dist[i] = UncheckedDistance(q, data[i].coords());
  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  for (size_t y = 0; y < n; ++y) {
    if (!excluded.empty() && excluded[y]) continue;
    const double radius = params.c() * dist[y];
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), radius) -
                       sorted.begin();
    if (count < params.t()) return IsolationResult{true, y};
  }
  return IsolationResult{};
}

absl::StatusOr<IsolationResult> Isolates(const Point& q, const Dataset& data,
                                         const IsolationParams& params) {
  if (data.empty()) return InputError("dataset is empty");
  if (q.dim() != data.dim()) return InputError("query dimension mismatch");
  return IsolatesExcluding(q.coords(), data, params, {});
}

std::string_view StrategyName(AttackStrategy strategy) {
  switch (strategy) {
    case AttackStrategy::kUniformInLeaf:
      return "uniform-in-leaf";
    case AttackStrategy::kLeafCenterWeighted:
      return "leaf-center";
    case AttackStrategy::kAuxInformed:
      return "aux-informed";
  }
  return "unknown";
}

absl::StatusOr<AttackStrategy> ParseStrategy(std::string_view name) {
  for (AttackStrategy s :
       {AttackStrategy::kUniformInLeaf, AttackStrategy::kLeafCenterWeighted,
        AttackStrategy::kAuxInformed}) {
    if (StrategyName(s) == name) return s;
  }
  return InputError(
      absl::StrCat("unknown attack strategy '", std::string(name), "'"));
}

absl::StatusOr<std::vector<size_t>> ChooseAuxSubset(size_t n, double fraction,
                                                    uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    return InputError("aux fraction must lie in [0, 1]");
  }
  std::vector<size_t> indices(n);
  std::iota(indices.begin(), indices.end(), size_t{0});
  std::mt19937_64 engine = RandomStream(seed).Fork(stream_tag::kAux).Engine();
  // Fisher-Yates with the library's own uniform draw for portability.
  for (size_t i = n; i > 1; --i) {
    const size_t j = std::min(
        i - 1, static_cast<size_t>(UniformUnit(engine) * static_cast<double>(i)));
    std::swap(indices[i - 1], indices[j]);
  }
  const size_t take = static_cast<size_t>(std::llround(fraction * n));
  indices.resize(take);
  std::sort(indices.begin(), indices.end());
  return indices;
}

absl::StatusOr<IsolationReport> Attack(const SanitizedHistogram& histogram,
                                       const Dataset& data,
                                       const IsolationParams& params,
                                       const AttackOptions& options) {
  if (data.empty()) return InputError("dataset is empty");
  if (data.dim() != histogram.dim()) {
    return InputError("dataset and histogram differ in dimension");
  }
  if (options.queries <= 0) return InputError("query count must be positive");
  if (options.strategy != AttackStrategy::kAuxInformed &&
      options.aux_indices.has_value()) {
    return InputError("aux indices are only accepted by the aux-informed strategy");
  }
  std::vector<size_t> aux = options.aux_indices.value_or(std::vector<size_t>{});
  std::vector<bool> known(data.size(), false);
  for (size_t i : aux) {
    if (i >= data.size()) return InputError("aux index out of range");
    known[i] = true;
  }
  const size_t dim = data.dim();

  // Leaves with published points.
  std::vector<const SanitizedNode*> leaves;
  std::unordered_map<const SanitizedNode*, size_t> leaf_id;
  std::vector<size_t> node_ids;
  for (const NodeRef& ref : EnumerateNodes(histogram)) {
    if (ref.node->is_leaf() && ref.node->count > 0) {
      leaf_id[ref.node] = leaves.size();
      leaves.push_back(ref.node);
      node_ids.push_back(ref.id);
    }
  }
  if (leaves.empty()) return InputError("histogram has no populated leaf");

  std::vector<double> weights(leaves.size());
  for (size_t i = 0; i < leaves.size(); ++i) {
    weights[i] = static_cast<double>(leaves[i]->count);
  }
  if (options.strategy == AttackStrategy::kAuxInformed) {
    // Favour leaves with few unknown points left.
    std::vector<int64_t> residual(leaves.size());
    for (size_t i = 0; i < leaves.size(); ++i) residual[i] = leaves[i]->count;
    for (size_t i : aux) {
      const SanitizedNode* leaf = LocateLeaf(histogram, data[i].coords());
      auto it = leaf_id.find(leaf);
      if (it != leaf_id.end()) --residual[it->second];
    }
    for (size_t i = 0; i < leaves.size(); ++i) {
      weights[i] = residual[i] > 0 ? 1.0 / static_cast<double>(residual[i]) : 0.0;
    }
    if (std::all_of(weights.begin(), weights.end(),
                    [](double w) { return w == 0.0; })) {
      for (size_t i = 0; i < leaves.size(); ++i) weights[i] = 1.0;
    }
  }
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());

  std::vector<Point> centers;
  if (options.strategy == AttackStrategy::kLeafCenterWeighted) {
    centers.resize(leaves.size());
    std::vector<absl::Status> statuses(leaves.size());
    ParallelFor(leaves.size(), [&](size_t i) {
      absl::StatusOr<RoundnessCertificate> cert = CertifyRoundness(
          *leaves[i]->region, options.certify_samples,
          RandomStream(options.seed).Fork(stream_tag::kCertify, node_ids[i]).key());
      if (cert.ok()) {
        centers[i] = cert->center;
      } else {
        statuses[i] = cert.status();
      }
    });
    for (const absl::Status& s : statuses) HISTSAN_RETURN_IF_ERROR(s);
  }

  const RandomStream stream = RandomStream(options.seed).Fork(stream_tag::kAttack);
  std::vector<IsolationResult> results(options.queries);
  std::vector<absl::Status> statuses(options.queries);
  ParallelFor(static_cast<size_t>(options.queries), [&](size_t i) {
    std::mt19937_64 engine = stream.Fork(i).Engine();
    std::vector<double> q(dim);
    if (options.strategy == AttackStrategy::kAuxInformed && !aux.empty() &&
        UniformUnit(engine) < kNearKnownProbability) {
      const size_t pick = std::min(
          aux.size() - 1,
          static_cast<size_t>(UniformUnit(engine) * static_cast<double>(aux.size())));
      const Point& base = data[aux[pick]];
      const SanitizedNode* leaf = LocateLeaf(histogram, base.coords());
      const double length =
          kNearKnownOffset * BoundsDiagonal(*(leaf ? leaf : &histogram.root)->region);
      std::vector<double> u(dim);
      RandomDirection(engine, u);
      for (size_t k = 0; k < dim; ++k) q[k] = base[k] + length * u[k];
    } else {
      const size_t leaf = PickWeighted(cumulative, engine);
      if (options.strategy == AttackStrategy::kLeafCenterWeighted) {
        std::copy(centers[leaf].coords().begin(), centers[leaf].coords().end(),
                  q.begin());
      } else if (absl::Status s = leaves[leaf]->region->SampleUniform(engine, q);
                 !s.ok()) {
        statuses[i] = s;
        return;
      }
    }
    results[i] = IsolatesExcluding(q, data, params, known);
  });
  for (const absl::Status& s : statuses) HISTSAN_RETURN_IF_ERROR(s);

  IsolationReport report;
  report.strategy = options.strategy;
  report.queries = options.queries;
  report.aux_subset_size = static_cast<int64_t>(aux.size());
  for (const IsolationResult& r : results) {
    if (r.isolated) {
      ++report.successes;
      ++report.per_point_hits[*r.victim];
    }
  }
  report.rate = static_cast<double>(report.successes) /
                static_cast<double>(report.queries);
  return report;
}

}  // namespace histsan
