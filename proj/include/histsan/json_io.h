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

#ifndef HISTSAN_JSON_IO_H_
#define HISTSAN_JSON_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "histsan/datagen.h"
#include "histsan/histogram.h"
#include "histsan/point.h"
#include "histsan/region.h"
#include "json.hpp"

namespace histsan {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Compact single-line rendering with shortest round-trip doubles and a
// trailing newline.
std::string DumpDocument(const Json& document);
absl::StatusOr<Json> ParseDocument(const std::string& text);

Json PointToJson(const Point& p);
absl::StatusOr<Point> PointFromJson(const Json& value);

Json DatasetToJson(const Dataset& data,
                   const std::vector<int>* labels = nullptr);
struct DatasetDocument {
  Dataset data;
  std::optional<std::vector<int>> labels;
};
absl::StatusOr<DatasetDocument> DatasetFromJson(const Json& document);

// Shapes: {"shape": "cube", "center", "half_side"}, {"shape": "ball",
// "center", "radius"}, {"shape": "gaussian", "mean", "stdev",
// "truncation_radius"?}. A scalar center or mean is broadcast to
// `broadcast_dim` coordinates when one is given.
Json DistributionSpecToJson(const DistributionSpec& spec);
absl::StatusOr<DistributionSpec> DistributionSpecFromJson(
    const Json& document, std::optional<size_t> broadcast_dim = std::nullopt);

// Box or ball region: {"kind": "box", "low", "high", "closed_high"?} or
// {"kind": "ball", "center", "radius"}.
absl::StatusOr<Json> RegionToJson(const Region& region);
absl::StatusOr<RegionPtr> RegionFromJson(const Json& value);

// Voronoi nodes reference a shared sibling-center list by index into the
// document's "center_lists" array.
absl::StatusOr<Json> HistogramToJson(const SanitizedHistogram& histogram);
absl::StatusOr<SanitizedHistogram> HistogramFromJson(const Json& document);

}  // namespace histsan

#endif  // HISTSAN_JSON_IO_H_
