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

#ifndef HISTSAN_HISTOGRAM_H_
#define HISTSAN_HISTOGRAM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "histsan/region.h"

namespace histsan {

enum class SanitizerMethod { kCube, kGrid, kVoronoi };
enum class CenterMethod { kGreedySpread, kUniformRandom };

std::string_view MethodName(SanitizerMethod method);
absl::StatusOr<SanitizerMethod> ParseMethod(std::string_view name);
std::string_view CenterMethodName(CenterMethod method);
absl::StatusOr<CenterMethod> ParseCenterMethod(std::string_view name);

struct HistogramParameters {
  int t = 1;
  int max_depth = 1;
  // SHA-256 commitment to the construction seed; empty for the
  // deterministic cube construction.
  std::string seed_commitment;
  std::optional<CenterMethod> centers;
  // Centers drawn per split by the uniform method.
  std::optional<int64_t> centers_per_split;
  // Set when the uniform center count was overridden, which voids the
  // roundness guarantee attached to the default count.
  bool roundness_guarantee_voided = false;
  // Random offset of the shifted grid.
  std::optional<Point> grid_offset;
};

// Construction-time node. `members` lists the dataset indices inside the
// region and never leaves the sanitizer.
struct HistogramNode {
  RegionPtr region;
  int64_t count = 0;
  int level = 0;
  std::vector<HistogramNode> children;
  std::vector<size_t> members;
};

struct HistogramTree {
  SanitizerMethod method = SanitizerMethod::kCube;
  HistogramParameters params;
  HistogramNode root;
  std::optional<int> component_index;
};

// Published node: region descriptor and exact count only.
struct SanitizedNode {
  RegionPtr region;
  int64_t count = 0;
  int level = 0;
  std::vector<SanitizedNode> children;

  bool is_leaf() const { return children.empty(); }
};

struct SanitizedHistogram {
  SanitizerMethod method = SanitizerMethod::kCube;
  HistogramParameters params;
  SanitizedNode root;
  std::optional<int> component_index;

  size_t dim() const { return root.region->dim(); }
};

// A node together with its parent and preorder id.
struct NodeRef {
  const SanitizedNode* node = nullptr;
  const SanitizedNode* parent = nullptr;
  size_t id = 0;
};

// All nodes in preorder; ids are positions in this list.
std::vector<NodeRef> EnumerateNodes(const SanitizedHistogram& histogram);

// Deepest node whose region contains x, or nullptr when x is outside the
// root region.
const SanitizedNode* LocateLeaf(const SanitizedHistogram& histogram,
                                std::span<const double> x);

int64_t SumLeafCounts(const SanitizedNode& node);

}  // namespace histsan

#endif  // HISTSAN_HISTOGRAM_H_
