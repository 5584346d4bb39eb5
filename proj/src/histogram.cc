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

#include "histsan/histogram.h"

#include <functional>
#include <vector>

#include "absl/strings/str_cat.h"
#include "histsan/status_macros.h"

namespace histsan {

std::string_view MethodName(SanitizerMethod method) {
  switch (method) {
    case SanitizerMethod::kCube:
      return "cube";
    case SanitizerMethod::kGrid:
      return "grid";
    case SanitizerMethod::kVoronoi:
      return "voronoi";
  }
  return "unknown";
}

absl::StatusOr<SanitizerMethod> ParseMethod(std::string_view name) {
  if (name == "cube") return SanitizerMethod::kCube;
  if (name == "grid") return SanitizerMethod::kGrid;
  if (name == "voronoi") return SanitizerMethod::kVoronoi;
  return InputError(absl::StrCat("unknown sanitizer method '", std::string(name), "'"));
}

std::string_view CenterMethodName(CenterMethod method) {
  return method == CenterMethod::kGreedySpread ? "greedy" : "uniform";
}

absl::StatusOr<CenterMethod> ParseCenterMethod(std::string_view name) {
  if (name == "greedy") return CenterMethod::kGreedySpread;
  if (name == "uniform") return CenterMethod::kUniformRandom;
  return InputError(
      absl::StrCat("unknown center method '", std::string(name), "'"));
}

std::vector<NodeRef> EnumerateNodes(const SanitizedHistogram& histogram) {
  std::vector<NodeRef> nodes;
  std::function<void(const SanitizedNode&, const SanitizedNode*)> visit =
      [&](const SanitizedNode& node, const SanitizedNode* parent) {
        nodes.push_back(NodeRef{&node, parent, nodes.size()});
        for (const SanitizedNode& child : node.children) visit(child, &node);
      };
  visit(histogram.root, nullptr);
  return nodes;
}

const SanitizedNode* LocateLeaf(const SanitizedHistogram& histogram,
                                std::span<const double> x) {
  const SanitizedNode* node = &histogram.root;
  if (!node->region->Contains(x)) return nullptr;
  while (!node->is_leaf()) {
    const SanitizedNode* next = nullptr;
    for (const SanitizedNode& child : node->children) {
      if (child.region->Contains(x)) {
        next = &child;
        break;
      }
    }
    // Children partition their parent, so this only triggers on a malformed
    // document; stop at the deepest containing node.
    if (next == nullptr) break;
    node = next;
  }
  return node;
}

int64_t SumLeafCounts(const SanitizedNode& node) {
  if (node.is_leaf()) return node.count;
  int64_t total = 0;
  for (const SanitizedNode& child : node.children) total += SumLeafCounts(child);
  return total;
}

}  // namespace histsan
