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

#include "histsan/sanitizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "histsan/digest.h"
#include "histsan/random.h"
#include "histsan/status_macros.h"

namespace histsan {
namespace {

absl::Status CheckInsideRoot(const Dataset& data, size_t dim) {
  if (!data.empty() && data.dim() != dim) {
    return InputError(absl::StrCat("dataset dimension ", data.dim(),
                                   " does not match ", dim));
  }
  for (size_t i = 0; i < data.size(); ++i) {
    for (size_t k = 0; k < dim; ++k) {
      if (!(data[i][k] >= -1.0 && data[i][k] <= 1.0)) {
        return InputError(absl::StrCat("point ", i,
                                       " lies outside the root box [-1,1]^",
                                       dim));
      }
    }
  }
  return absl::OkStatus();
}

absl::Status CheckCommon(int t, int max_depth) {
  if (t < 1) return InputError("t must be a positive integer");
  if (max_depth < 1) return InputError("max depth must be a positive integer");
  return absl::OkStatus();
}

std::vector<size_t> AllIndices(size_t n) {
  std::vector<size_t> indices(n);
  for (size_t i = 0; i < n; ++i) indices[i] = i;
  return indices;
}

absl::StatusOr<RegionPtr> RootBox(size_t dim) {
  return Region::ClosedBox(Point(std::vector<double>(dim, -1.0)),
                           Point(std::vector<double>(dim, 1.0)));
}

class NodeCounter {
 public:
  explicit NodeCounter(int64_t budget) : budget_(budget) {}

  absl::Status Add(int64_t nodes) {
    if (nodes > budget_ - used_) {
      return ResourceError(absl::StrCat("histogram needs more than ", budget_,
                                        " nodes (node budget exceeded)"));
    }
    used_ += nodes;
    return absl::OkStatus();
  }

 private:
  int64_t budget_;
  int64_t used_ = 1;
};

// ---------------------------------------------------------------------------
// Recursive cube.

absl::Status SplitCube(HistogramNode& node, const Dataset& data,
                       const CubeOptions& options, NodeCounter& counter) {
  if (node.count < 2 * static_cast<int64_t>(options.t) ||
      node.level >= options.max_depth) {
    return absl::OkStatus();
  }
  const Region::BoxData& box = node.region->box();
  const size_t dim = box.low.dim();
  const size_t children = size_t{1} << dim;
  HISTSAN_RETURN_IF_ERROR(counter.Add(static_cast<int64_t>(children)));

  std::vector<double> mid(dim);
  for (size_t k = 0; k < dim; ++k) mid[k] = 0.5 * (box.low[k] + box.high[k]);

  node.children.resize(children);
  for (size_t code = 0; code < children; ++code) {
    std::vector<double> low(dim), high(dim);
    std::vector<bool> closed(dim);
    for (size_t k = 0; k < dim; ++k) {
      const bool upper = (code >> k) & 1;
      low[k] = upper ? mid[k] : box.low[k];
      high[k] = upper ? box.high[k] : mid[k];
      closed[k] = upper && box.closed_high[k];
    }
    HISTSAN_ASSIGN_OR_RETURN(
        node.children[code].region,
        Region::Box(Point(std::move(low)), Point(std::move(high)),
                    std::move(closed)));
    node.children[code].level = node.level + 1;
  }
  for (size_t index : node.members) {
    size_t code = 0;
    for (size_t k = 0; k < dim; ++k) {
      if (data[index][k] >= mid[k]) code |= size_t{1} << k;
    }
    node.children[code].members.push_back(index);
  }
  for (HistogramNode& child : node.children) {
    child.count = static_cast<int64_t>(child.members.size());
    HISTSAN_RETURN_IF_ERROR(SplitCube(child, data, options, counter));
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// Shifted grid.

struct GridContext {
  const Dataset* data;
  const GridOptions* options;
  std::vector<double> offset;
  // cuts[level][axis]
  std::vector<std::vector<std::vector<double>>> cuts;
  NodeCounter* counter;
};

// Sub-intervals of [low, high) produced by the cuts strictly inside it.
std::vector<double> InteriorCuts(const std::vector<double>& cuts, double low,
                                 double high) {
  std::vector<double> inside;
  for (double c : cuts) {
    if (c > low && c < high) inside.push_back(c);
  }
  return inside;
}

absl::Status SplitGrid(HistogramNode& node, GridContext& ctx) {
  const GridOptions& options = *ctx.options;
  if (node.count < 2 * static_cast<int64_t>(options.t) ||
      node.level >= options.max_depth) {
    return absl::OkStatus();
  }
  const Region::BoxData& box = node.region->box();
  const size_t dim = box.low.dim();

  int level = node.level + 1;
  std::vector<std::vector<double>> axis_cuts(dim);
  for (; level <= options.max_depth; ++level) {
    bool any = false;
    for (size_t k = 0; k < dim; ++k) {
      axis_cuts[k] = InteriorCuts(ctx.cuts[level][k], box.low[k], box.high[k]);
      any = any || !axis_cuts[k].empty();
    }
    if (any) break;
  }
  if (level > options.max_depth) return absl::OkStatus();

  // Child grid: per axis, the boundaries low, cuts..., high.
  std::vector<std::vector<double>> edges(dim);
  int64_t children = 1;
  for (size_t k = 0; k < dim; ++k) {
    edges[k].push_back(box.low[k]);
    edges[k].insert(edges[k].end(), axis_cuts[k].begin(), axis_cuts[k].end());
    edges[k].push_back(box.high[k]);
    const int64_t parts = static_cast<int64_t>(edges[k].size()) - 1;
    if (children > std::numeric_limits<int64_t>::max() / parts) {
      return ResourceError("shifted-grid split overflows the node budget");
    }
    children *= parts;
  }
  HISTSAN_RETURN_IF_ERROR(ctx.counter->Add(children));

  node.children.resize(children);
  std::vector<size_t> digit(dim, 0);
  for (int64_t c = 0; c < children; ++c) {
    std::vector<double> low(dim), high(dim);
    std::vector<bool> closed(dim);
    for (size_t k = 0; k < dim; ++k) {
      low[k] = edges[k][digit[k]];
      high[k] = edges[k][digit[k] + 1];
      closed[k] = digit[k] + 2 == edges[k].size() && box.closed_high[k];
    }
    HISTSAN_ASSIGN_OR_RETURN(
        node.children[c].region,
        Region::Box(Point(std::move(low)), Point(std::move(high)),
                    std::move(closed)));
    node.children[c].level = level;
    for (size_t k = 0; k < dim; ++k) {
      if (++digit[k] + 1 < edges[k].size()) break;
      digit[k] = 0;
    }
  }
  for (size_t index : node.members) {
    int64_t c = 0;
    int64_t stride = 1;
    for (size_t k = 0; k < dim; ++k) {
      const std::vector<double>& cuts = axis_cuts[k];
      const size_t slot = static_cast<size_t>(
          std::upper_bound(cuts.begin(), cuts.end(), (*ctx.data)[index][k]) -
          cuts.begin());
      c += stride * static_cast<int64_t>(slot);
      stride *= static_cast<int64_t>(edges[k].size()) - 1;
    }
    node.children[c].members.push_back(index);
  }
  for (HistogramNode& child : node.children) {
    child.count = static_cast<int64_t>(child.members.size());
    HISTSAN_RETURN_IF_ERROR(SplitGrid(child, ctx));
  }
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// Voronoi.

struct VoronoiContext {
  const Dataset* data;
  const VoronoiOptions* options;
  NodeCounter* counter;
};

size_t NearestCenter(std::span<const double> x,
                     const std::vector<Point>& centers) {
  size_t best = 0;
  double best2 = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < centers.size(); ++j) {
    const double d2 = SquaredDistance(x, centers[j].coords());
    if (d2 < best2) {
      best2 = d2;
      best = j;
    }
  }
  return best;
}

absl::Status SplitVoronoi(HistogramNode& node, const RandomStream& stream,
                          VoronoiContext& ctx) {
  const VoronoiOptions& options = *ctx.options;
  if (node.count <= options.t || node.level >= options.max_depth) {
    return absl::OkStatus();
  }
  const Region& region = *node.region;
  std::vector<Point> centers;
  if (options.centers == CenterMethod::kGreedySpread) {
    HISTSAN_ASSIGN_OR_RETURN(
        RoundnessCertificate cert,
        CertifyRoundness(region, options.certify_samples,
                         stream.Fork(stream_tag::kCertify).key()));
    HISTSAN_ASSIGN_OR_RETURN(
        centers, PickCentersGreedy(region, cert, options.probe_samples,
                                   stream.Fork(stream_tag::kCenters).key()));
  } else {
    HISTSAN_ASSIGN_OR_RETURN(
        centers, PickCentersUniform(region, options.override_m,
                                    options.centers_budget,
                                    stream.Fork(stream_tag::kCenters).key()));
  }
  // A one-center split would reproduce the parent; keep the node a leaf.
  if (centers.size() < 2) return absl::OkStatus();
  HISTSAN_RETURN_IF_ERROR(ctx.counter->Add(static_cast<int64_t>(centers.size())));

  const CenterList list =
      std::make_shared<const std::vector<Point>>(std::move(centers));
  node.children.resize(list->size());
  for (size_t j = 0; j < list->size(); ++j) {
    HISTSAN_ASSIGN_OR_RETURN(node.children[j].region,
                             Region::VoronoiClip(list, j, node.region));
    node.children[j].level = node.level + 1;
  }
  for (size_t index : node.members) {
    node.children[NearestCenter((*ctx.data)[index].coords(), *list)]
        .members.push_back(index);
  }
  for (size_t j = 0; j < node.children.size(); ++j) {
    HistogramNode& child = node.children[j];
    child.count = static_cast<int64_t>(child.members.size());
    HISTSAN_RETURN_IF_ERROR(SplitVoronoi(child, stream.Fork(j), ctx));
  }
  return absl::OkStatus();
}

SanitizedNode StripNode(const HistogramNode& node) {
  SanitizedNode out;
  out.region = node.region;
  out.count = node.count;
  out.level = node.level;
  out.children.reserve(node.children.size());
  for (const HistogramNode& child : node.children) {
    out.children.push_back(StripNode(child));
  }
  return out;
}

void CollectCenterLists(const HistogramNode& node,
                        std::set<const std::vector<Point>*>& lists) {
  if (node.region->kind() == RegionKind::kVoronoi) {
    lists.insert(node.region->voronoi().centers.get());
  }
  for (const HistogramNode& child : node.children) {
    CollectCenterLists(child, lists);
  }
}

absl::Status CheckConservation(const HistogramNode& node) {
  if (node.children.empty()) return absl::OkStatus();
  int64_t total = 0;
  for (const HistogramNode& child : node.children) {
    total += child.count;
    HISTSAN_RETURN_IF_ERROR(CheckConservation(child));
  }
  if (total != node.count) {
    return absl::InternalError("child counts do not sum to the parent count");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<HistogramTree> BuildRecursiveCubeTree(
    const Dataset& data, const CubeOptions& options) {
  HISTSAN_RETURN_IF_ERROR(CheckCommon(options.t, options.max_depth));
  if (data.empty()) return InputError("dataset is empty");
  const size_t dim = data.dim();
  HISTSAN_RETURN_IF_ERROR(CheckInsideRoot(data, dim));
  if (dim >= 62 ||
      (int64_t{1} << dim) > options.node_budget) {
    return ResourceError(absl::StrCat(
        "a cube split into 2^", dim, " children exceeds the node budget of ",
        options.node_budget));
  }
  HistogramTree tree;
  tree.method = SanitizerMethod::kCube;
  tree.params.t = options.t;
  tree.params.max_depth = options.max_depth;
  HISTSAN_ASSIGN_OR_RETURN(tree.root.region, RootBox(dim));
  tree.root.members = AllIndices(data.size());
  tree.root.count = static_cast<int64_t>(data.size());
  NodeCounter counter(options.node_budget);
  HISTSAN_RETURN_IF_ERROR(SplitCube(tree.root, data, options, counter));
  return tree;
}

absl::StatusOr<SanitizedHistogram> BuildRecursiveCube(
    const Dataset& data, const CubeOptions& options) {
  HISTSAN_ASSIGN_OR_RETURN(HistogramTree tree,
                           BuildRecursiveCubeTree(data, options));
  return StripToSanitized(tree, data);
}

std::vector<double> MergedGridCuts(double offset, int level) {
  const double width = 4.0 * std::ldexp(1.0, -level);
  // Lowest j with offset + j * width > -1.
  double j = std::floor((-1.0 - offset) / width);
  while (offset + j * width <= -1.0) j += 1.0;
  std::vector<double> lines;
  for (double line = offset + j * width; line < 1.0;
       j += 1.0, line = offset + j * width) {
    lines.push_back(line);
  }
  if (lines.size() >= 2) {
    lines.erase(lines.begin());
    lines.pop_back();
  }
  return lines;
}

absl::StatusOr<HistogramTree> BuildShiftedGridTree(const Dataset& data,
                                                   const GridOptions& options) {
  HISTSAN_RETURN_IF_ERROR(CheckCommon(options.t, options.max_depth));
  if (data.empty()) return InputError("dataset is empty");
  const size_t dim = data.dim();
  HISTSAN_RETURN_IF_ERROR(CheckInsideRoot(data, dim));
  if (options.max_depth > 50) {
    return InputError("grid max depth must be at most 50");
  }

  GridContext ctx;
  ctx.data = &data;
  ctx.options = &options;
  if (options.offset.has_value()) {
    if (options.offset->dim() != dim) {
      return InputError("grid offset dimension mismatch");
    }
    for (size_t k = 0; k < dim; ++k) {
      if (!((*options.offset)[k] >= -1.0 && (*options.offset)[k] <= 1.0)) {
        return InputError("grid offset must lie in [-1,1]^d");
      }
    }
    ctx.offset = options.offset->values();
  } else {
    std::mt19937_64 engine =
        RandomStream(options.seed).Fork(stream_tag::kGridOffset).Engine();
    ctx.offset.resize(dim);
    for (double& v : ctx.offset) v = -1.0 + 2.0 * UniformUnit(engine);
  }
  ctx.cuts.resize(options.max_depth + 1);
  for (int level = 1; level <= options.max_depth; ++level) {
    for (size_t k = 0; k < dim; ++k) {
      ctx.cuts[level].push_back(MergedGridCuts(ctx.offset[k], level));
    }
  }
  NodeCounter counter(options.node_budget);
  ctx.counter = &counter;

  HistogramTree tree;
  tree.method = SanitizerMethod::kGrid;
  tree.params.t = options.t;
  tree.params.max_depth = options.max_depth;
  tree.params.seed_commitment = SeedCommitment(options.seed);
  tree.params.grid_offset = Point(ctx.offset);
  HISTSAN_ASSIGN_OR_RETURN(tree.root.region, RootBox(dim));
  tree.root.members = AllIndices(data.size());
  tree.root.count = static_cast<int64_t>(data.size());
  HISTSAN_RETURN_IF_ERROR(SplitGrid(tree.root, ctx));
  return tree;
}

absl::StatusOr<SanitizedHistogram> BuildShiftedGrid(const Dataset& data,
                                                    const GridOptions& options) {
  HISTSAN_ASSIGN_OR_RETURN(HistogramTree tree,
                           BuildShiftedGridTree(data, options));
  return StripToSanitized(tree, data);
}

absl::StatusOr<HistogramTree> BuildVoronoiTree(const Dataset& data,
                                               RegionPtr support,
                                               const VoronoiOptions& options) {
  HISTSAN_RETURN_IF_ERROR(CheckCommon(options.t, options.max_depth));
  if (support == nullptr || support->kind() == RegionKind::kVoronoi) {
    return InputError("Voronoi support must be a ball or a box");
  }
  if (options.probe_samples <= 0 || options.centers_budget <= 0) {
    return InputError("probe count and centers budget must be positive");
  }
  if (!data.empty() && data.dim() != support->dim()) {
    return InputError("dataset and support differ in dimension");
  }
  for (size_t i = 0; i < data.size(); ++i) {
    if (!support->Contains(data[i].coords())) {
      return InputError(
          absl::StrCat("point ", i, " lies outside the support region"));
    }
  }
  const size_t dim = support->dim();
  if (options.centers == CenterMethod::kUniformRandom && dim >= 6 &&
      !options.override_m.has_value()) {
    return ConfigurationError(absl::StrCat(
        "the default uniform center count 4d8^d is infeasible at d=", dim,
        "; pass an explicit override"));
  }

  HistogramTree tree;
  tree.method = SanitizerMethod::kVoronoi;
  tree.params.t = options.t;
  tree.params.max_depth = options.max_depth;
  tree.params.seed_commitment = SeedCommitment(options.seed);
  tree.params.centers = options.centers;
  if (options.centers == CenterMethod::kUniformRandom) {
    tree.params.centers_per_split =
        options.override_m.value_or(DefaultUniformCenterCount(dim));
    tree.params.roundness_guarantee_voided =
        options.override_m.has_value() &&
        *options.override_m != DefaultUniformCenterCount(dim);
  }
  tree.root.region = std::move(support);
  tree.root.members = AllIndices(data.size());
  tree.root.count = static_cast<int64_t>(data.size());
  NodeCounter counter(options.node_budget);
  VoronoiContext ctx{&data, &options, &counter};
  HISTSAN_RETURN_IF_ERROR(SplitVoronoi(
      tree.root, RandomStream(options.seed).Fork(stream_tag::kNode), ctx));
  return tree;
}

absl::StatusOr<SanitizedHistogram> BuildVoronoi(const Dataset& data,
                                                RegionPtr support,
                                                const VoronoiOptions& options) {
  HISTSAN_ASSIGN_OR_RETURN(HistogramTree tree,
                           BuildVoronoiTree(data, std::move(support), options));
  return StripToSanitized(tree, data);
}

absl::StatusOr<std::vector<Point>> PickCentersGreedy(
    const Region& region, const RoundnessCertificate& cert,
    int64_t probe_samples, uint64_t seed) {
  if (probe_samples <= 0) return InputError("probe count must be positive");
  if (!(cert.radius > 0.0)) return InputError("certificate radius must be positive");
  const double spacing = cert.radius / 4.0;
  const double spacing2 = spacing * spacing;
  std::mt19937_64 engine = RandomStream(seed).Fork(stream_tag::kProbe).Engine();
  std::vector<Point> centers;
  std::vector<double> x(region.dim());
  for (int64_t i = 0; i < probe_samples; ++i) {
    HISTSAN_RETURN_IF_ERROR(region.SampleUniform(engine, x));
    bool far = true;
    for (const Point& c : centers) {
      if (SquaredDistance(x, c.coords()) < spacing2) {
        far = false;
        break;
      }
    }
    if (far) centers.emplace_back(x);
  }
  return centers;
}

int64_t DefaultUniformCenterCount(size_t dim) {
  const int64_t max = std::numeric_limits<int64_t>::max();
  int64_t m = 4 * static_cast<int64_t>(dim);
  for (size_t k = 0; k < dim; ++k) {
    if (m > max / 8) return max;
    m *= 8;
  }
  return m;
}

absl::StatusOr<std::vector<Point>> PickCentersUniform(
    const Region& region, std::optional<int64_t> override_m,
    int64_t centers_budget, uint64_t seed) {
  const int64_t m = override_m.value_or(DefaultUniformCenterCount(region.dim()));
  if (m <= 0) return InputError("center count must be positive");
  if (m > centers_budget) {
    return ResourceError(absl::StrCat("uniform centers need m = ", m,
                                      ", above the centers budget of ",
                                      centers_budget));
  }
  std::mt19937_64 engine = RandomStream(seed).Fork(stream_tag::kProbe).Engine();
  std::vector<Point> centers;
  centers.reserve(m);
  for (int64_t i = 0; i < m; ++i) {
    HISTSAN_ASSIGN_OR_RETURN(Point p, region.SampleUniform(engine));
    centers.push_back(std::move(p));
  }
  return centers;
}

absl::StatusOr<SanitizedHistogram> StripToSanitized(const HistogramTree& tree,
                                                    const Dataset& data) {
  HISTSAN_RETURN_IF_ERROR(CheckConservation(tree.root));
  if (tree.root.count != static_cast<int64_t>(data.size())) {
    return absl::InternalError("leaf counts do not sum to the dataset size");
  }
  std::set<std::vector<double>> data_points;
  for (const Point& p : data.points()) data_points.insert(p.values());
  std::set<const std::vector<Point>*> lists;
  CollectCenterLists(tree.root, lists);
  for (const std::vector<Point>* list : lists) {
    for (const Point& c : *list) {
      if (data_points.count(c.values()) > 0) {
        return absl::InternalError(
            "leakage check failed: a published center equals a data point");
      }
    }
  }
  if (tree.params.grid_offset.has_value() &&
      data_points.count(tree.params.grid_offset->values()) > 0) {
    return absl::InternalError(
        "leakage check failed: the grid offset equals a data point");
  }
  SanitizedHistogram out;
  out.method = tree.method;
  out.params = tree.params;
  out.component_index = tree.component_index;
  out.root = StripNode(tree.root);
  return out;
}

uint64_t ComponentSeed(uint64_t seed, int component) {
  return RandomStream(seed)
      .Fork(stream_tag::kComponent, static_cast<uint64_t>(component))
      .key();
}

absl::StatusOr<std::vector<SanitizedHistogram>> SanitizeMixture(
    const Dataset& data, const std::vector<int>& labels,
    const DistributionSpec& spec, const VoronoiOptions& options) {
  if (labels.size() != data.size()) {
    return InputError("one label per point is required");
  }
  const size_t components = spec.components().size();
  std::vector<std::vector<size_t>> members(components);
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<size_t>(labels[i]) >= components) {
      return InputError(absl::StrCat("label of point ", i, " is out of range"));
    }
    members[labels[i]].push_back(i);
  }
  std::vector<SanitizedHistogram> out;
  for (size_t j = 0; j < components; ++j) {
    HISTSAN_ASSIGN_OR_RETURN(RegionPtr support,
                             SupportRegion(spec.components()[j].shape));
    const Dataset subset = data.Subset(members[j]);
    VoronoiOptions component_options = options;
    component_options.seed = ComponentSeed(options.seed, static_cast<int>(j));
    HISTSAN_ASSIGN_OR_RETURN(
        HistogramTree tree,
        BuildVoronoiTree(subset, std::move(support), component_options));
    tree.component_index = static_cast<int>(j);
    HISTSAN_ASSIGN_OR_RETURN(SanitizedHistogram h,
                             StripToSanitized(tree, subset));
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace histsan
