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

#include "cli.h"

#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "histsan/adversary.h"
#include "histsan/datagen.h"
#include "histsan/digest.h"
#include "histsan/experiments.h"
#include "histsan/histogram.h"
#include "histsan/json_io.h"
#include "histsan/metrics.h"
#include "histsan/parallel.h"
#include "histsan/random.h"
#include "histsan/roundedness.h"
#include "histsan/sanitizer.h"
#include "histsan/status_macros.h"

namespace histsan::cli {
namespace {

namespace fs = std::filesystem;

constexpr char kAttackNote[] =
    "attack rates are lower-bound probes: an observed rate is evidence of "
    "weakness, a low rate is not a proof of privacy";

// Per-invocation state that ends up in the run manifest.
class Session {
 public:
  Session(std::vector<std::string> command, bool record_timing, std::ostream& out)
      : command_(std::move(command)),
        record_timing_(record_timing),
        start_(std::chrono::steady_clock::now()),
        out_(out) {}

  void set_seed(uint64_t seed) { seed_ = seed; }

  absl::StatusOr<std::string> ReadInput(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return InputError(absl::StrCat("cannot read '", path, "'"));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string contents = buffer.str();
    digests_[path] = Sha256Hex(contents);
    return contents;
  }

  absl::StatusOr<Json> ReadDocument(const std::string& path) {
    HISTSAN_ASSIGN_OR_RETURN(std::string text, ReadInput(path));
    absl::StatusOr<Json> doc = ParseDocument(text);
    if (!doc.ok()) {
      return InputError(absl::StrCat("'", path, "': ", std::string(doc.status().message())));
    }
    return doc;
  }

  // Embeds the manifest and writes the document to `path`, or to the output
  // stream when `path` is empty.
  absl::Status Emit(Json document, const std::string& path) {
    Json manifest = Json::object();
    manifest["command"] = command_;
    manifest["seed"] = seed_.has_value() ? Json(*seed_) : Json(nullptr);
    manifest["input_digests"] = digests_;
    manifest["tool_version"] = kToolVersion;
    if (record_timing_) {
      manifest["wall_clock_seconds"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
    document["manifest"] = std::move(manifest);
    const std::string text = DumpDocument(document);
    if (path.empty()) {
      out_ << text;
      return absl::OkStatus();
    }
    return WriteAtomically(path, text);
  }

 private:
  static absl::Status WriteAtomically(const std::string& path, const std::string& text) {
    const std::string temp = absl::StrCat(path, ".tmp.", static_cast<long>(::getpid()));
    {
      std::ofstream file(temp, std::ios::binary | std::ios::trunc);
      if (!file) return InputError(absl::StrCat("cannot write '", path, "'"));
      file << text;
      file.flush();
      if (!file) {
        std::error_code ignored;
        fs::remove(temp, ignored);
        return ResourceError(absl::StrCat("failed while writing '", path, "'"));
      }
    }
    std::error_code ec;
    fs::rename(temp, path, ec);
    if (ec) {
      fs::remove(temp, ec);
      return InputError(absl::StrCat("cannot move output into place at '", path, "'"));
    }
    return absl::OkStatus();
  }

  std::vector<std::string> command_;
  bool record_timing_;
  std::chrono::steady_clock::time_point start_;
  std::ostream& out_;
  std::optional<uint64_t> seed_;
  Json digests_ = Json::object();
};

Point Origin(size_t dim) { return Point(std::vector<double>(dim, 0.0)); }

// A distribution spec file, or one of the built-in unit shapes "cube",
// "ball" and "gaussian" (which need a dimension).
absl::StatusOr<DistributionSpec> LoadDistribution(Session& session, const std::string& name,
                                                  std::optional<size_t> dim) {
  if (!fs::exists(name)) {
    if (name == "cube" || name == "ball" || name == "gaussian") {
      if (!dim.has_value() || *dim == 0) {
        return InputError(absl::StrCat("built-in distribution '", name, "' needs --d"));
      }
      Shape shape;
      if (name == "cube") {
        shape = UniformCube{Origin(*dim), 1.0};
      } else if (name == "ball") {
        shape = UniformBall{Origin(*dim), 1.0};
      } else {
        shape = TruncatedGaussian{Origin(*dim), 0.3, DefaultTruncationRadius(0.3, *dim)};
      }
      return DistributionSpec::Create({{1.0, shape}});
    }
    return InputError(absl::StrCat("no such distribution file '", name, "'"));
  }
  HISTSAN_ASSIGN_OR_RETURN(Json doc, session.ReadDocument(name));
  HISTSAN_ASSIGN_OR_RETURN(DistributionSpec spec, DistributionSpecFromJson(doc, dim));
  if (dim.has_value() && spec.dim() != *dim) {
    return InputError(absl::StrCat("distribution '", name, "' has dimension ", spec.dim(),
                                   " but --d is ", *dim));
  }
  return spec;
}

absl::StatusOr<DatasetDocument> LoadDataset(Session& session, const std::string& path) {
  HISTSAN_ASSIGN_OR_RETURN(Json doc, session.ReadDocument(path));
  return DatasetFromJson(doc);
}

absl::StatusOr<SanitizedHistogram> LoadHistogram(Session& session, const std::string& path) {
  HISTSAN_ASSIGN_OR_RETURN(Json doc, session.ReadDocument(path));
  if (doc.is_object() && doc.contains("histograms")) {
    return InputError(absl::StrCat("'", path,
                                   "' holds one histogram per mixture component; "
                                   "this command takes a single histogram"));
  }
  return HistogramFromJson(doc);
}

absl::StatusOr<std::vector<double>> ParseCsv(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  for (absl::string_view piece : absl::StrSplit(text, ',', absl::SkipWhitespace())) {
    double v = 0.0;
    if (!absl::SimpleAtod(piece, &v)) {
      return InputError(absl::StrCat(flag, ": '", std::string(piece), "' is not a number"));
    }
    values.push_back(v);
  }
  if (values.empty()) return InputError(absl::StrCat(flag, " is empty"));
  return values;
}

Json CertificateToJson(const RoundnessCertificate& cert) {
  return Json{{"k", cert.k},
              {"radius", cert.radius},
              {"inner_radius", cert.inner_radius()},
              {"center", PointToJson(cert.center)}};
}

// ---------------------------------------------------------------------------
// Subcommands. Each one binds its flags, then runs with the session.

struct Command {
  CLI::App* app = nullptr;
  std::function<absl::Status(Session&)> run;
};

Command AddGenerate(CLI::App& root) {
  struct Flags {
    std::string dist, out;
    int64_t n = 0;
    std::optional<size_t> d;
    uint64_t seed = 0;
  };
  auto flags = std::make_shared<Flags>();
  CLI::App* app = root.add_subcommand("generate", "Sample a dataset from a distribution spec");
  app->add_option("--dist", flags->dist, "Spec file, or cube|ball|gaussian")->required();
  app->add_option("--n", flags->n, "Number of points")->required();
  app->add_option("--d", flags->d, "Dimension (broadcasts scalar centers)");
  app->add_option("--seed", flags->seed, "Seed");
  app->add_option("--out", flags->out, "Output path (default stdout)");
  return {app, [flags](Session& session) -> absl::Status {
            session.set_seed(flags->seed);
            HISTSAN_ASSIGN_OR_RETURN(DistributionSpec spec,
                                     LoadDistribution(session, flags->dist, flags->d));
            HISTSAN_ASSIGN_OR_RETURN(LabeledSample sample,
                                     SampleDataset(spec, flags->n, flags->seed));
            return session.Emit(DatasetToJson(sample.data, &sample.labels), flags->out);
          }};
}

Command AddSanitize(CLI::App& root) {
  struct Flags {
    std::string method, centers = "greedy", in, out, support;
    int t = 2;
    std::optional<int> max_depth;
    uint64_t seed = 0;
    std::optional<int64_t> override_m;
    int64_t centers_budget = int64_t{1} << 20;
    int64_t probe_samples = 100000;
    int64_t node_budget = kDefaultNodeBudget;
  };
  auto flags = std::make_shared<Flags>();
  CLI::App* app = root.add_subcommand("sanitize", "Build a sanitized histogram");
  app->add_option("--method", flags->method, "cube|grid|voronoi")->required();
  app->add_option("--centers", flags->centers, "greedy|uniform (voronoi)");
  app->add_option("--t", flags->t, "Privacy threshold t");
  app->add_option("--max-depth", flags->max_depth, "Depth limit (default 8, voronoi 3)");
  app->add_option("--seed", flags->seed, "Seed");
  app->add_option("--in", flags->in, "Dataset path")->required();
  app->add_option("--out", flags->out, "Output path (default stdout)");
  app->add_option("--support", flags->support,
                  "Voronoi support: spec file or cube|ball (default unit ball)");
  app->add_option("--override-m", flags->override_m, "Uniform centers per split");
  app->add_option("--centers-budget", flags->centers_budget, "Largest allowed center count");
  app->add_option("--probe-samples", flags->probe_samples, "Probes for greedy centers");
  app->add_option("--node-budget", flags->node_budget, "Largest allowed node count");
  return {app, [flags](Session& session) -> absl::Status {
            session.set_seed(flags->seed);
            HISTSAN_ASSIGN_OR_RETURN(SanitizerMethod method, ParseMethod(flags->method));
            HISTSAN_ASSIGN_OR_RETURN(DatasetDocument input, LoadDataset(session, flags->in));
            const Dataset& data = input.data;
            if (method == SanitizerMethod::kCube) {
              CubeOptions options{flags->t, flags->max_depth.value_or(8), flags->node_budget};
              HISTSAN_ASSIGN_OR_RETURN(SanitizedHistogram h, BuildRecursiveCube(data, options));
              HISTSAN_ASSIGN_OR_RETURN(Json doc, HistogramToJson(h));
              return session.Emit(std::move(doc), flags->out);
            }
            if (method == SanitizerMethod::kGrid) {
              GridOptions options;
              options.t = flags->t;
              options.max_depth = flags->max_depth.value_or(8);
              options.seed = flags->seed;
              options.node_budget = flags->node_budget;
              HISTSAN_ASSIGN_OR_RETURN(SanitizedHistogram h, BuildShiftedGrid(data, options));
              HISTSAN_ASSIGN_OR_RETURN(Json doc, HistogramToJson(h));
              return session.Emit(std::move(doc), flags->out);
            }
            VoronoiOptions options;
            options.t = flags->t;
            options.max_depth = flags->max_depth.value_or(3);
            HISTSAN_ASSIGN_OR_RETURN(options.centers, ParseCenterMethod(flags->centers));
            options.seed = flags->seed;
            options.centers_budget = flags->centers_budget;
            options.probe_samples = flags->probe_samples;
            options.override_m = flags->override_m;
            options.node_budget = flags->node_budget;
            if (flags->support.empty()) {
              HISTSAN_ASSIGN_OR_RETURN(RegionPtr ball, Region::Ball(Origin(data.dim()), 1.0));
              HISTSAN_ASSIGN_OR_RETURN(SanitizedHistogram h, BuildVoronoi(data, ball, options));
              HISTSAN_ASSIGN_OR_RETURN(Json doc, HistogramToJson(h));
              return session.Emit(std::move(doc), flags->out);
            }
            HISTSAN_ASSIGN_OR_RETURN(DistributionSpec spec,
                                     LoadDistribution(session, flags->support, data.dim()));
            if (spec.components().size() == 1) {
              HISTSAN_ASSIGN_OR_RETURN(RegionPtr support,
                                       SupportRegion(spec.components()[0].shape));
              HISTSAN_ASSIGN_OR_RETURN(SanitizedHistogram h, BuildVoronoi(data, support, options));
              HISTSAN_ASSIGN_OR_RETURN(Json doc, HistogramToJson(h));
              return session.Emit(std::move(doc), flags->out);
            }
            if (!input.labels.has_value()) {
              return InputError("a mixture support needs a dataset with component labels");
            }
            HISTSAN_ASSIGN_OR_RETURN(std::vector<SanitizedHistogram> parts,
                                     SanitizeMixture(data, *input.labels, spec, options));
            Json doc = Json::object();
            doc["schema_version"] = kSchemaVersion;
            doc["histograms"] = Json::array();
            for (const SanitizedHistogram& h : parts) {
              HISTSAN_ASSIGN_OR_RETURN(Json part, HistogramToJson(h));
              doc["histograms"].push_back(std::move(part));
            }
            return session.Emit(std::move(doc), flags->out);
          }};
}

Command AddCertify(CLI::App& root) {
  struct Flags {
    std::string in, out;
    int samples = kDefaultCertifySamples;
    uint64_t seed = 0;
  };
  auto flags = std::make_shared<Flags>();
  CLI::App* app = root.add_subcommand("certify", "Roundness certificates of every cell");
  app->add_option("--in", flags->in, "Histogram path")->required();
  app->add_option("--samples", flags->samples, "Boundary probe directions");
  app->add_option("--seed", flags->seed, "Seed");
  app->add_option("--out", flags->out, "Output path (default stdout)");
  return {app, [flags](Session& session) -> absl::Status {
            session.set_seed(flags->seed);
            HISTSAN_ASSIGN_OR_RETURN(SanitizedHistogram h, LoadHistogram(session, flags->in));
            const std::vector<NodeRef> nodes = EnumerateNodes(h);
            std::vector<absl::StatusOr<RoundnessCertificate>> certs(
                nodes.size(), absl::UnknownError("not computed"));
            const RandomStream stream = RandomStream(flags->seed).Fork(stream_tag::kCertify);
            ParallelFor(nodes.size(), [&](size_t i) {
              certs[i] = CertifyRoundness(*nodes[i].node->region, flags->samples,
                                          stream.Fork(nodes[i].id).key());
            });
            Json cells = Json::array();
            for (size_t i = 0; i < nodes.size(); ++i) {
              HISTSAN_RETURN_IF_ERROR(certs[i].status());
              Json cell = Json{{"id", nodes[i].id},
                               {"level", nodes[i].node->level},
                               {"leaf", nodes[i].node->is_leaf()},
                               {"count", nodes[i].node->count}};
              cell["certificate"] = CertificateToJson(*certs[i]);
              cells.push_back(std::move(cell));
            }
            Json doc = Json{{"schema_version", kSchemaVersion},
                            {"method", std::string(MethodName(h.method))},
                            {"samples", flags->samples},
                            {"cells", cells}};
            return session.Emit(std::move(doc), flags->out);
          }};
}

Command AddCheckPrivacy(CLI::App& root) {
  struct Flags {
    std::string in, out;
    PrivacyConditionOptions options;
  };
  auto flags = std::make_shared<Flags>();
  CLI::App* app = root.add_subcommand("check-privacy", "Volume-ratio privacy condition check");
  app->add_option("--in", flags->in, "Histogram path")->required();
  app->add_option("--c", flags->options.c, "Ball growth factor c > 1");
  app->add_option("--q-probes", flags->options.q_probes, "Query points per cell");
  app->add_option("--r-grid", flags->options.r_grid, "Radii per query point");
  app->add_option("--vol-samples", flags->options.volume_samples, "Samples per ratio");
  app->add_option("--certify-samples", flags->options.certify_samples, "Certificate probes");
  app->add_option("--epsilon", flags->options.epsilon, "List ratios at or above this value");
  app->add_option("--seed", flags->options.seed, "Seed");
  app->add_option("--out", flags->out, "Output path (default stdout)");
  return {app, [flags](Session& session) -> absl::Status {
            session.set_seed(flags->options.seed);
            HISTSAN_ASSIGN_OR_RETURN(SanitizedHistogram h, LoadHistogram(session, flags->in));
            HISTSAN_ASSIGN_OR_RETURN(PrivacyConditionReport report,
                                     CheckPrivacyCondition(h, flags->options));
            Json failures = Json::array();
            for (const PrivacyFailure& f : report.failures) {
              failures.push_back(Json{{"cell_id", f.cell_id},
                                      {"q", PointToJson(f.q)},
                                      {"r", f.r},
                                      {"ratio", f.ratio}});
            }
            Json doc = Json{{"schema_version", kSchemaVersion},
                            {"cells_checked", report.cells_checked},
                            {"probes_per_cell", report.probes_per_cell},
                            {"c", report.c},
                            {"epsilon_observed", report.epsilon_observed},
                            {"containment", report.containment},
                            {"ratios_recorded", report.ratios_recorded},
                            {"degenerate", report.degenerate},
                            {"failures", failures}};
            return session.Emit(std::move(doc), flags->out);
          }};
}

Command AddAttack(CLI::App& root) {
  struct Flags {
    std::string hist, data, strategy = "uniform-in-leaf", out;
    double c = 4.0;
    int t = 2;
    int64_t queries = 10000;
    std::optional<double> aux_frac;
    uint64_t seed = 0;
  };
  auto flags = std::make_shared<Flags>();
  CLI::App* app = root.add_subcommand("attack", "Isolation attack on a sanitized histogram");
  app->add_option("--hist", flags->hist, "Histogram path")->required();
  app->add_option("--data", flags->data, "Dataset the histogram was built from")->required();
  app->add_option("--c", flags->c, "Isolation factor c >= 1");
  app->add_option("--t", flags->t, "Isolation threshold t");
  app->add_option("--strategy", flags->strategy,
                  "uniform-in-leaf|leaf-center|aux-informed");
  app->add_option("--queries", flags->queries, "Number of candidate points");
  app->add_option("--aux-frac", flags->aux_frac, "Fraction of points known (aux-informed)");
  app->add_option("--seed", flags->seed, "Seed");
  app->add_option("--out", flags->out, "Output path (default stdout)");
  return {app, [flags](Session& session) -> absl::Status {
            session.set_seed(flags->seed);
            HISTSAN_ASSIGN_OR_RETURN(SanitizedHistogram h, LoadHistogram(session, flags->hist));
            HISTSAN_ASSIGN_OR_RETURN(DatasetDocument input, LoadDataset(session, flags->data));
            HISTSAN_ASSIGN_OR_RETURN(IsolationParams params,
                                     IsolationParams::Create(flags->c, flags->t));
            AttackOptions options;
            HISTSAN_ASSIGN_OR_RETURN(options.strategy, ParseStrategy(flags->strategy));
            options.queries = flags->queries;
            options.seed = flags->seed;
            if (flags->aux_frac.has_value()) {
              HISTSAN_ASSIGN_OR_RETURN(
                  std::vector<size_t> aux,
                  ChooseAuxSubset(input.data.size(), *flags->aux_frac,
                                  RandomStream(flags->seed).Fork(stream_tag::kAux).key()));
              options.aux_indices = std::move(aux);
            }
            HISTSAN_ASSIGN_OR_RETURN(IsolationReport report,
                                     Attack(h, input.data, params, options));
            Json hits = Json::array();
            for (const auto& [index, count] : report.per_point_hits) {
              hits.push_back(Json{{"index", index}, {"hits", count}});
            }
            Json doc = Json{{"schema_version", kSchemaVersion},
                            {"note", kAttackNote},
                            {"strategy", std::string(StrategyName(report.strategy))},
                            {"c", params.c()},
                            {"t", params.t()},
                            {"queries", report.queries},
                            {"successes", report.successes},
                            {"rate", report.rate},
                            {"per_point_hits", hits},
                            {"aux_subset_size", report.aux_subset_size}};
            return session.Emit(std::move(doc), flags->out);
          }};
}

Command AddMeasureDiameters(CLI::App& root) {
  struct Flags {
    std::string data, method = "grid", centers = "uniform", support, out;
    int t = 2, trials = 200;
    std::optional<int> max_depth;
    std::optional<int64_t> override_m;
    uint64_t seed = 0;
  };
  auto flags = std::make_shared<Flags>();
  CLI::App* app =
      root.add_subcommand("measure-diameters", "Mean containing-cell diameter per point");
  app->add_option("--data", flags->data, "Dataset path")->required();
  app->add_option("--method", flags->method, "grid|voronoi");
  app->add_option("--centers", flags->centers, "greedy|uniform (voronoi)");
  app->add_option("--support", flags->support, "Voronoi support (default unit ball)");
  app->add_option("--t", flags->t, "Privacy threshold t");
  app->add_option("--trials", flags->trials, "Independent rebuilds (at least 30)");
  app->add_option("--max-depth", flags->max_depth, "Depth limit (default 8, voronoi 3)");
  app->add_option("--override-m", flags->override_m, "Uniform centers per split");
  app->add_option("--seed", flags->seed, "Seed");
  app->add_option("--out", flags->out, "Output path (default stdout)");
  return {app, [flags](Session& session) -> absl::Status {
            session.set_seed(flags->seed);
            HISTSAN_ASSIGN_OR_RETURN(DatasetDocument input, LoadDataset(session, flags->data));
            DiameterBuilderConfig config;
            HISTSAN_ASSIGN_OR_RETURN(config.method, ParseMethod(flags->method));
            HISTSAN_ASSIGN_OR_RETURN(config.centers, ParseCenterMethod(flags->centers));
            config.override_m = flags->override_m;
            const bool voronoi = config.method == SanitizerMethod::kVoronoi;
            config.max_depth = flags->max_depth.value_or(voronoi ? 3 : 8);
            if (voronoi) {
              if (flags->support.empty()) {
                HISTSAN_ASSIGN_OR_RETURN(config.support,
                                         Region::Ball(Origin(input.data.dim()), 1.0));
              } else {
                HISTSAN_ASSIGN_OR_RETURN(
                    DistributionSpec spec,
                    LoadDistribution(session, flags->support, input.data.dim()));
                if (spec.components().size() != 1) {
                  return InputError("--support must have a single component");
                }
                HISTSAN_ASSIGN_OR_RETURN(config.support,
                                         SupportRegion(spec.components()[0].shape));
              }
            }
            HISTSAN_ASSIGN_OR_RETURN(
                DiameterStats stats,
                MeasureDiameters(config, input.data, flags->t, flags->trials, flags->seed));
            Json per_point = Json::array();
            for (const DiameterEntry& e : stats.per_point) {
              per_point.push_back(Json{{"index", e.index},
                                       {"t_radius", e.t_radius},
                                       {"mean_diameter", e.mean_diameter},
                                       {"bound", e.bound}});
            }
            Json doc = Json{{"schema_version", kSchemaVersion},
                            {"method", std::string(MethodName(config.method))},
                            {"trials", stats.trials},
                            {"t", stats.t},
                            {"bound_kind", stats.bound_kind}};
            if (stats.kappa.has_value()) doc["kappa"] = *stats.kappa;
            doc["per_point"] = std::move(per_point);
            return session.Emit(std::move(doc), flags->out);
          }};
}

Command AddCutProb(CLI::App& root) {
  struct Flags {
    std::string support, x, r_list, out;
    std::optional<size_t> d;
    CutOptions options;
  };
  auto flags = std::make_shared<Flags>();
  CLI::App* app = root.add_subcommand("cut-prob", "Probability that a random partition cuts B(x, r)");
  app->add_option("--support", flags->support, "Region: spec file or cube|ball")->required();
  app->add_option("--d", flags->d, "Dimension for built-in supports");
  app->add_option("--x", flags->x, "Comma-separated coordinates of x")->required();
  app->add_option("--r-list", flags->r_list, "Comma-separated radii")->required();
  app->add_option("--m", flags->options.m, "Uniform centers per trial");
  app->add_option("--trials", flags->options.trials, "Trials");
  app->add_option("--probes", flags->options.random_probes, "Random probes per trial");
  app->add_option("--seed", flags->options.seed, "Seed");
  app->add_option("--out", flags->out, "Output path (default stdout)");
  return {app, [flags](Session& session) -> absl::Status {
            session.set_seed(flags->options.seed);
            HISTSAN_ASSIGN_OR_RETURN(std::vector<double> x, ParseCsv(flags->x, "--x"));
            HISTSAN_ASSIGN_OR_RETURN(std::vector<double> radii, ParseCsv(flags->r_list, "--r-list"));
            HISTSAN_ASSIGN_OR_RETURN(
                DistributionSpec spec,
                LoadDistribution(session, flags->support, flags->d.value_or(x.size())));
            if (spec.components().size() != 1) {
              return InputError("--support must have a single component");
            }
            HISTSAN_ASSIGN_OR_RETURN(RegionPtr region, SupportRegion(spec.components()[0].shape));
            HISTSAN_ASSIGN_OR_RETURN(Point px, Point::Create(x));
            HISTSAN_ASSIGN_OR_RETURN(CutResult result,
                                     CutProbability(*region, px, radii, flags->options));
            Json points = Json::array();
            for (const CutPoint& p : result.points) {
              points.push_back(Json{{"r", p.r},
                                    {"probability", p.probability},
                                    {"std_error", p.std_error}});
            }
            Json doc = Json{{"schema_version", kSchemaVersion},
                            {"rho", result.rho},
                            {"m", flags->options.m},
                            {"trials", flags->options.trials},
                            {"random_probes", flags->options.random_probes},
                            {"points", points}};
            return session.Emit(std::move(doc), flags->out);
          }};
}

Command AddMstCompare(CLI::App& root) {
  struct Flags {
    std::string hist, data, out;
    uint64_t seed = 0;
  };
  auto flags = std::make_shared<Flags>();
  CLI::App* app = root.add_subcommand("mst-compare", "Euclidean MST versus histogram-distance MST");
  app->add_option("--hist", flags->hist, "Histogram path")->required();
  app->add_option("--data", flags->data, "Dataset path")->required();
  app->add_option("--seed", flags->seed, "Seed for certificates of non-box cells");
  app->add_option("--out", flags->out, "Output path (default stdout)");
  return {app, [flags](Session& session) -> absl::Status {
            session.set_seed(flags->seed);
            HISTSAN_ASSIGN_OR_RETURN(SanitizedHistogram h, LoadHistogram(session, flags->hist));
            HISTSAN_ASSIGN_OR_RETURN(DatasetDocument input, LoadDataset(session, flags->data));
            HISTSAN_ASSIGN_OR_RETURN(
                auto geometry, HistogramGeometry::Create(h, kDefaultCertifySamples, flags->seed));
            HISTSAN_ASSIGN_OR_RETURN(MstComparison mst, MstCompare(*geometry, input.data));
            Json doc = Json{{"schema_version", kSchemaVersion},
                            {"n", input.data.size()},
                            {"actual_cost", mst.actual_cost},
                            {"hist_cost", mst.hist_cost},
                            {"gap", mst.gap},
                            {"gap_bound", mst.gap_bound}};
            return session.Emit(std::move(doc), flags->out);
          }};
}

Command AddRepro(CLI::App& root) {
  struct Flags {
    std::string suite, out;
    uint64_t seed = 20260101;
  };
  auto flags = std::make_shared<Flags>();
  CLI::App* app = root.add_subcommand("repro", "Run a named experiment end to end");
  app->add_option("--suite", flags->suite, "Suite name")
      ->required()
      ->check(CLI::IsMember(SuiteNames()));
  app->add_option("--seed", flags->seed, "Master seed");
  app->add_option("--out", flags->out, "Output path (default stdout)");
  return {app, [flags](Session& session) -> absl::Status {
            session.set_seed(flags->seed);
            HISTSAN_ASSIGN_OR_RETURN(ExperimentResult result, RunSuite(flags->suite, flags->seed));
            Json doc = Json{{"schema_version", kSchemaVersion},
                            {"suite", result.name},
                            {"passed", result.passed},
                            {"details", result.details}};
            return session.Emit(std::move(doc), flags->out);
          }};
}

// The recorded command line leaves out --threads, which never changes
// output bytes.
std::vector<std::string> RecordedCommand(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--threads") {
      ++i;
      continue;
    }
    if (args[i].rfind("--threads=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kOutOfRange:
      return kExitInput;
    case absl::StatusCode::kResourceExhausted:
    case absl::StatusCode::kFailedPrecondition:
      return kExitResource;
    default:
      return kExitInternal;
  }
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sanitized spatial histograms with privacy and utility diagnostics", "histsan"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  bool record_timing = false;
  app.add_option("--threads", threads, "Worker threads, 0 = auto (never changes output)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--record-timing", record_timing, "Add wall-clock seconds to the manifest");
  app.set_version_flag("--version", kToolVersion);

  std::vector<Command> commands = {AddGenerate(app),        AddSanitize(app),
                                   AddCertify(app),         AddCheckPrivacy(app),
                                   AddAttack(app),          AddMeasureDiameters(app),
                                   AddCutProb(app),         AddMstCompare(app),
                                   AddRepro(app)};
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help or --version.
      if (dynamic_cast<const CLI::CallForVersion*>(&e) != nullptr) {
        out << e.what() << "\n";
      } else {
        out << app.help();
      }
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitInput;
  }

  SetNumThreads(threads);
  Session session(RecordedCommand(args), record_timing, out);
  for (Command& command : commands) {
    if (!command.app->parsed()) continue;
    absl::Status status;
    try {
      status = command.run(session);
    } catch (const std::exception& e) {
      status = absl::InternalError(absl::StrCat("unexpected exception: ", e.what()));
    }
    if (!status.ok()) {
      err << "error: " << status.message() << "\n";
      return ExitCodeFor(status);
    }
    return kExitOk;
  }
  err << "error: no subcommand given\n";
  return kExitInput;
}

}  // namespace histsan::cli
