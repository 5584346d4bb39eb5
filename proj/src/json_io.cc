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

#include "histsan/json_io.h"

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "histsan/status_macros.h"

namespace histsan {
namespace {

absl::StatusOr<const Json*> Field(const Json& object, const char* name) {
  if (!object.is_object()) return InputError("expected a JSON object");
  auto it = object.find(name);
  if (it == object.end()) {
    return InputError(absl::StrCat("missing field '", name, "'"));
  }
  return &*it;
}

absl::StatusOr<double> NumberField(const Json& object, const char* name) {
  HISTSAN_ASSIGN_OR_RETURN(const Json* v, Field(object, name));
  if (!v->is_number()) return InputError(absl::StrCat("field '", name, "' must be a number"));
  const double x = v->get<double>();
  if (!std::isfinite(x)) return InputError(absl::StrCat("field '", name, "' is not finite"));
  return x;
}

absl::StatusOr<int64_t> IntegerField(const Json& object, const char* name) {
  HISTSAN_ASSIGN_OR_RETURN(const Json* v, Field(object, name));
  if (!v->is_number_integer()) {
    return InputError(absl::StrCat("field '", name, "' must be an integer"));
  }
  return v->get<int64_t>();
}

absl::StatusOr<std::string> StringField(const Json& object, const char* name) {
  HISTSAN_ASSIGN_OR_RETURN(const Json* v, Field(object, name));
  if (!v->is_string()) return InputError(absl::StrCat("field '", name, "' must be a string"));
  return v->get<std::string>();
}

absl::Status CheckSchema(const Json& document) {
  if (!document.is_object()) return InputError("document must be a JSON object");
  auto it = document.find("schema_version");
  if (it != document.end() && (!it->is_number_integer() ||
                               it->get<int64_t>() != kSchemaVersion)) {
    return InputError(absl::StrCat("unsupported schema_version (expected ",
                                   kSchemaVersion, ")"));
  }
  return absl::OkStatus();
}

absl::StatusOr<Point> CoordinatesField(const Json& object, const char* name,
                                       std::optional<size_t> broadcast_dim) {
  HISTSAN_ASSIGN_OR_RETURN(const Json* v, Field(object, name));
  if (v->is_number() && broadcast_dim.has_value()) {
    return Point::Create(std::vector<double>(*broadcast_dim, v->get<double>()));
  }
  return PointFromJson(*v);
}

Json ShapeToJson(const Shape& shape) {
  Json out = Json::object();
  if (const auto* cube = std::get_if<UniformCube>(&shape)) {
    out["shape"] = "cube";
    out["center"] = PointToJson(cube->center);
    out["half_side"] = cube->half_side;
  } else if (const auto* ball = std::get_if<UniformBall>(&shape)) {
    out["shape"] = "ball";
    out["center"] = PointToJson(ball->center);
    out["radius"] = ball->radius;
  } else {
    const auto& gauss = std::get<TruncatedGaussian>(shape);
    out["shape"] = "gaussian";
    out["mean"] = PointToJson(gauss.mean);
    out["stdev"] = gauss.stdev;
    out["truncation_radius"] = gauss.truncation_radius;
  }
  return out;
}

absl::StatusOr<Shape> ShapeFromJson(const Json& value,
                                    std::optional<size_t> broadcast_dim) {
  HISTSAN_ASSIGN_OR_RETURN(std::string kind, StringField(value, "shape"));
  if (kind == "cube") {
    HISTSAN_ASSIGN_OR_RETURN(Point c, CoordinatesField(value, "center", broadcast_dim));
    HISTSAN_ASSIGN_OR_RETURN(double h, NumberField(value, "half_side"));
    return Shape(UniformCube{std::move(c), h});
  }
  if (kind == "ball") {
    HISTSAN_ASSIGN_OR_RETURN(Point c, CoordinatesField(value, "center", broadcast_dim));
    HISTSAN_ASSIGN_OR_RETURN(double r, NumberField(value, "radius"));
    return Shape(UniformBall{std::move(c), r});
  }
  if (kind == "gaussian") {
    HISTSAN_ASSIGN_OR_RETURN(Point m, CoordinatesField(value, "mean", broadcast_dim));
    HISTSAN_ASSIGN_OR_RETURN(double s, NumberField(value, "stdev"));
    double trunc = DefaultTruncationRadius(s, m.dim());
    if (value.contains("truncation_radius")) {
      HISTSAN_ASSIGN_OR_RETURN(trunc, NumberField(value, "truncation_radius"));
    }
    return Shape(TruncatedGaussian{std::move(m), s, trunc});
  }
  return InputError(absl::StrCat("unknown shape '", kind, "'"));
}

// Serialization state shared across one histogram document.
struct ListTable {
  std::map<const std::vector<Point>*, size_t> index;
  Json lists = Json::array();
};

absl::StatusOr<Json> NodeToJson(const SanitizedNode& node, ListTable& table) {
  Json out = Json::object();
  if (node.region->kind() == RegionKind::kVoronoi) {
    const Region::VoronoiData& v = node.region->voronoi();
    auto [it, inserted] = table.index.emplace(v.centers.get(), table.lists.size());
    if (inserted) {
      Json list = Json::array();
      for (const Point& c : *v.centers) list.push_back(PointToJson(c));
      table.lists.push_back(std::move(list));
    }
    out["region"] = Json{{"kind", "voronoi"},
                         {"own_index", v.own_index},
                         {"own_center", PointToJson(node.region->own_center())},
                         {"sibling_centers", it->second}};
  } else {
    HISTSAN_ASSIGN_OR_RETURN(out["region"], RegionToJson(*node.region));
  }
  out["count"] = node.count;
  out["level"] = node.level;
  Json children = Json::array();
  for (const SanitizedNode& child : node.children) {
    HISTSAN_ASSIGN_OR_RETURN(Json c, NodeToJson(child, table));
    children.push_back(std::move(c));
  }
  out["children"] = std::move(children);
  return out;
}

absl::StatusOr<SanitizedNode> NodeFromJson(
    const Json& value, const RegionPtr& parent,
    const std::vector<CenterList>& lists, int parent_level) {
  SanitizedNode node;
  HISTSAN_ASSIGN_OR_RETURN(const Json* region, Field(value, "region"));
  HISTSAN_ASSIGN_OR_RETURN(std::string kind, StringField(*region, "kind"));
  if (kind == "voronoi") {
    if (parent == nullptr) return InputError("a Voronoi cell cannot be the root");
    HISTSAN_ASSIGN_OR_RETURN(int64_t own, IntegerField(*region, "own_index"));
    HISTSAN_ASSIGN_OR_RETURN(int64_t list, IntegerField(*region, "sibling_centers"));
    if (list < 0 || static_cast<size_t>(list) >= lists.size()) {
      return InputError("sibling_centers index out of range");
    }
    const CenterList& centers = lists[list];
    if (own < 0 || static_cast<size_t>(own) >= centers->size()) {
      return InputError("own_index out of range");
    }
    HISTSAN_ASSIGN_OR_RETURN(const Json* own_json, Field(*region, "own_center"));
    HISTSAN_ASSIGN_OR_RETURN(Point own_center, PointFromJson(*own_json));
    if (!(own_center == (*centers)[own])) {
      return InputError("own_center disagrees with the sibling center list");
    }
    HISTSAN_ASSIGN_OR_RETURN(node.region,
                             Region::VoronoiClip(centers, own, parent));
  } else {
    HISTSAN_ASSIGN_OR_RETURN(node.region, RegionFromJson(*region));
  }
  HISTSAN_ASSIGN_OR_RETURN(node.count, IntegerField(value, "count"));
  if (node.count < 0) return InputError("counts must be nonnegative");
  HISTSAN_ASSIGN_OR_RETURN(int64_t level, IntegerField(value, "level"));
  if (level <= parent_level || level > 1000) {
    return InputError("node levels must increase along every path");
  }
  node.level = static_cast<int>(level);
  if (parent != nullptr && node.region->dim() != parent->dim()) {
    return InputError("child region dimension differs from its parent");
  }
  HISTSAN_ASSIGN_OR_RETURN(const Json* children, Field(value, "children"));
  if (!children->is_array()) return InputError("'children' must be an array");
  int64_t total = 0;
  for (const Json& child : *children) {
    HISTSAN_ASSIGN_OR_RETURN(
        SanitizedNode c, NodeFromJson(child, node.region, lists, node.level));
    total += c.count;
    node.children.push_back(std::move(c));
  }
  if (!node.children.empty() && total != node.count) {
    return InputError("child counts do not sum to their parent's count");
  }
  return node;
}

}  // namespace

std::string DumpDocument(const Json& document) {
  return document.dump() + "\n";
}

absl::StatusOr<Json> ParseDocument(const std::string& text) {
  Json document = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (document.is_discarded()) return InputError("malformed JSON document");
  return document;
}

Json PointToJson(const Point& p) {
  Json out = Json::array();
  for (double v : p.coords()) out.push_back(v);
  return out;
}

absl::StatusOr<Point> PointFromJson(const Json& value) {
  if (!value.is_array()) return InputError("a point must be an array of numbers");
  std::vector<double> coords;
  coords.reserve(value.size());
  for (const Json& v : value) {
    if (!v.is_number()) return InputError("a point must be an array of numbers");
    coords.push_back(v.get<double>());
  }
  return Point::Create(std::move(coords));
}

Json DatasetToJson(const Dataset& data, const std::vector<int>* labels) {
  Json out = Json::object();
  out["schema_version"] = kSchemaVersion;
  out["d"] = data.dim();
  out["n"] = data.size();
  Json points = Json::array();
  for (const Point& p : data.points()) points.push_back(PointToJson(p));
  out["points"] = std::move(points);
  if (labels != nullptr) out["labels"] = *labels;
  return out;
}

absl::StatusOr<DatasetDocument> DatasetFromJson(const Json& document) {
  HISTSAN_RETURN_IF_ERROR(CheckSchema(document));
  HISTSAN_ASSIGN_OR_RETURN(int64_t d, IntegerField(document, "d"));
  HISTSAN_ASSIGN_OR_RETURN(int64_t n, IntegerField(document, "n"));
  HISTSAN_ASSIGN_OR_RETURN(const Json* points, Field(document, "points"));
  if (d < 1) return InputError("d must be positive");
  if (!points->is_array() || static_cast<int64_t>(points->size()) != n) {
    return InputError("'points' must be an array of n points");
  }
  std::vector<Point> parsed;
  parsed.reserve(n);
  for (size_t i = 0; i < points->size(); ++i) {
    absl::StatusOr<Point> p = PointFromJson((*points)[i]);
    if (!p.ok()) {
      return InputError(absl::StrCat("point ", i, ": ", p.status().message()));
    }
    parsed.push_back(*std::move(p));
  }
  DatasetDocument out;
  HISTSAN_ASSIGN_OR_RETURN(out.data, Dataset::Create(d, std::move(parsed)));
  if (document.contains("labels")) {
    const Json& labels = document["labels"];
    if (!labels.is_array() || static_cast<int64_t>(labels.size()) != n) {
      return InputError("'labels' must hold one integer per point");
    }
    std::vector<int> values;
    for (const Json& l : labels) {
      if (!l.is_number_integer()) return InputError("labels must be integers");
      values.push_back(l.get<int>());
    }
    out.labels = std::move(values);
  }
  return out;
}

Json DistributionSpecToJson(const DistributionSpec& spec) {
  Json out = Json::object();
  out["schema_version"] = kSchemaVersion;
  Json components = Json::array();
  for (const MixtureComponent& c : spec.components()) {
    Json entry = ShapeToJson(c.shape);
    entry["weight"] = c.weight;
    components.push_back(std::move(entry));
  }
  out["components"] = std::move(components);
  return out;
}

absl::StatusOr<DistributionSpec> DistributionSpecFromJson(
    const Json& document, std::optional<size_t> broadcast_dim) {
  HISTSAN_RETURN_IF_ERROR(CheckSchema(document));
  HISTSAN_ASSIGN_OR_RETURN(const Json* components, Field(document, "components"));
  if (!components->is_array()) return InputError("'components' must be an array");
  std::vector<MixtureComponent> parsed;
  for (const Json& entry : *components) {
    MixtureComponent c;
    c.weight = 1.0;
    if (entry.is_object() && entry.contains("weight")) {
      HISTSAN_ASSIGN_OR_RETURN(c.weight, NumberField(entry, "weight"));
    }
    HISTSAN_ASSIGN_OR_RETURN(c.shape, ShapeFromJson(entry, broadcast_dim));
    parsed.push_back(std::move(c));
  }
  return DistributionSpec::Create(std::move(parsed));
}

absl::StatusOr<Json> RegionToJson(const Region& region) {
  switch (region.kind()) {
    case RegionKind::kBox: {
      const Region::BoxData& box = region.box();
      Json closed = Json::array();
      for (bool c : box.closed_high) closed.push_back(c);
      return Json{{"kind", "box"},
                  {"low", PointToJson(box.low)},
                  {"high", PointToJson(box.high)},
                  {"closed_high", std::move(closed)}};
    }
    case RegionKind::kBall:
      return Json{{"kind", "ball"},
                  {"center", PointToJson(region.ball().center)},
                  {"radius", region.ball().radius}};
    case RegionKind::kVoronoi:
      break;
  }
  return InputError("Voronoi cells are serialized only inside a histogram");
}

absl::StatusOr<RegionPtr> RegionFromJson(const Json& value) {
  HISTSAN_ASSIGN_OR_RETURN(std::string kind, StringField(value, "kind"));
  if (kind == "box") {
    HISTSAN_ASSIGN_OR_RETURN(const Json* low_json, Field(value, "low"));
    HISTSAN_ASSIGN_OR_RETURN(const Json* high_json, Field(value, "high"));
    HISTSAN_ASSIGN_OR_RETURN(Point low, PointFromJson(*low_json));
    HISTSAN_ASSIGN_OR_RETURN(Point high, PointFromJson(*high_json));
    std::vector<bool> closed(low.dim(), true);
    if (value.contains("closed_high")) {
      const Json& flags = value["closed_high"];
      if (!flags.is_array() || flags.size() != low.dim()) {
        return InputError("'closed_high' needs one flag per axis");
      }
      for (size_t k = 0; k < flags.size(); ++k) {
        if (!flags[k].is_boolean()) return InputError("'closed_high' flags must be booleans");
        closed[k] = flags[k].get<bool>();
      }
    }
    return Region::Box(std::move(low), std::move(high), std::move(closed));
  }
  if (kind == "ball") {
    HISTSAN_ASSIGN_OR_RETURN(const Json* center_json, Field(value, "center"));
    HISTSAN_ASSIGN_OR_RETURN(Point center, PointFromJson(*center_json));
    HISTSAN_ASSIGN_OR_RETURN(double radius, NumberField(value, "radius"));
    return Region::Ball(std::move(center), radius);
  }
  return InputError(absl::StrCat("unknown region kind '", kind, "'"));
}

absl::StatusOr<Json> HistogramToJson(const SanitizedHistogram& histogram) {
  Json out = Json::object();
  out["schema_version"] = kSchemaVersion;
  out["method"] = std::string(MethodName(histogram.method));
  Json params = Json::object();
  params["t"] = histogram.params.t;
  params["max_depth"] = histogram.params.max_depth;
  params["seed_commitment"] = histogram.params.seed_commitment;
  if (histogram.params.centers.has_value()) {
    params["centers"] = std::string(CenterMethodName(*histogram.params.centers));
  }
  if (histogram.params.centers_per_split.has_value()) {
    params["centers_per_split"] = *histogram.params.centers_per_split;
    params["roundness_guarantee_voided"] =
        histogram.params.roundness_guarantee_voided;
  }
  if (histogram.params.grid_offset.has_value()) {
    params["grid_offset"] = PointToJson(*histogram.params.grid_offset);
  }
  out["parameters"] = std::move(params);
  if (histogram.component_index.has_value()) {
    out["component_index"] = *histogram.component_index;
  }
  ListTable table;
  HISTSAN_ASSIGN_OR_RETURN(Json root, NodeToJson(histogram.root, table));
  out["center_lists"] = std::move(table.lists);
  out["root"] = std::move(root);
  return out;
}

absl::StatusOr<SanitizedHistogram> HistogramFromJson(const Json& document) {
  HISTSAN_RETURN_IF_ERROR(CheckSchema(document));
  SanitizedHistogram h;
  HISTSAN_ASSIGN_OR_RETURN(std::string method, StringField(document, "method"));
  HISTSAN_ASSIGN_OR_RETURN(h.method, ParseMethod(method));
  HISTSAN_ASSIGN_OR_RETURN(const Json* params, Field(document, "parameters"));
  HISTSAN_ASSIGN_OR_RETURN(int64_t t, IntegerField(*params, "t"));
  HISTSAN_ASSIGN_OR_RETURN(int64_t depth, IntegerField(*params, "max_depth"));
  if (t < 1 || depth < 1) return InputError("t and max_depth must be positive");
  h.params.t = static_cast<int>(t);
  h.params.max_depth = static_cast<int>(depth);
  HISTSAN_ASSIGN_OR_RETURN(h.params.seed_commitment,
                           StringField(*params, "seed_commitment"));
  if (params->contains("centers")) {
    HISTSAN_ASSIGN_OR_RETURN(std::string name, StringField(*params, "centers"));
    HISTSAN_ASSIGN_OR_RETURN(h.params.centers, ParseCenterMethod(name));
  }
  if (params->contains("centers_per_split")) {
    HISTSAN_ASSIGN_OR_RETURN(h.params.centers_per_split,
                             IntegerField(*params, "centers_per_split"));
    const Json& voided = (*params)["roundness_guarantee_voided"];
    h.params.roundness_guarantee_voided = voided.is_boolean() && voided.get<bool>();
  }
  if (params->contains("grid_offset")) {
    HISTSAN_ASSIGN_OR_RETURN(h.params.grid_offset,
                             PointFromJson((*params)["grid_offset"]));
  }
  if (document.contains("component_index")) {
    HISTSAN_ASSIGN_OR_RETURN(int64_t c, IntegerField(document, "component_index"));
    h.component_index = static_cast<int>(c);
  }
  std::vector<CenterList> lists;
  if (document.contains("center_lists")) {
    const Json& raw = document["center_lists"];
    if (!raw.is_array()) return InputError("'center_lists' must be an array");
    for (const Json& list : raw) {
      if (!list.is_array()) return InputError("a center list must be an array");
      std::vector<Point> centers;
      for (const Json& c : list) {
        HISTSAN_ASSIGN_OR_RETURN(Point p, PointFromJson(c));
        centers.push_back(std::move(p));
      }
      lists.push_back(std::make_shared<const std::vector<Point>>(std::move(centers)));
    }
  }
  HISTSAN_ASSIGN_OR_RETURN(const Json* root, Field(document, "root"));
  HISTSAN_ASSIGN_OR_RETURN(h.root, NodeFromJson(*root, nullptr, lists, -1));
  return h;
}

}  // namespace histsan
