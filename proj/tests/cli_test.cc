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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "histsan/json_io.h"
#include "test_util.h"

namespace histsan::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome RunTool(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("histsan_cli_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, GenerateIsByteIdenticalAcrossRunsAndThreadCounts) {
  const std::string out = Path("data.json");
  const std::vector<std::string> args = {"generate", "--dist", "gaussian", "--d", "3",
                                         "--n", "500", "--seed", "11", "--out", out};
  ASSERT_EQ(RunTool(args).code, kExitOk);
  const std::string first = ReadFile(out);
  ASSERT_FALSE(first.empty());

  std::vector<std::string> threaded = {"--threads", "3"};
  threaded.insert(threaded.end(), args.begin(), args.end());
  ASSERT_EQ(RunTool(threaded).code, kExitOk);
  EXPECT_EQ(ReadFile(out), first);
  ASSERT_EQ(RunTool(args).code, kExitOk);
  EXPECT_EQ(ReadFile(out), first);
}

TEST_F(CliTest, SanitizeIsIndependentOfThreadCount) {
  const std::string data = Path("data.json");
  ASSERT_EQ(RunTool({"generate", "--dist", "ball", "--d", "2", "--n", "300", "--seed", "2",
                     "--out", data})
                .code,
            kExitOk);
  const Outcome one = RunTool({"--threads", "1", "sanitize", "--method", "voronoi", "--in",
                               data, "--seed", "5"});
  const Outcome four = RunTool({"--threads", "4", "sanitize", "--method", "voronoi", "--in",
                                data, "--seed", "5"});
  ASSERT_EQ(one.code, kExitOk) << one.err;
  ASSERT_EQ(four.code, kExitOk) << four.err;
  EXPECT_EQ(one.out, four.out);
}

TEST_F(CliTest, ManifestCommandReproducesOutput) {
  const std::string data = Path("data.json");
  const std::string hist = Path("hist.json");
  ASSERT_EQ(RunTool({"generate", "--dist", "cube", "--d", "2", "--n", "200", "--seed", "4",
                     "--out", data})
                .code,
            kExitOk);
  ASSERT_EQ(RunTool({"--threads", "2", "sanitize", "--method", "grid", "--in", data, "--seed",
                     "9", "--out", hist})
                .code,
            kExitOk);
  const std::string first = ReadFile(hist);
  ASSERT_OK_AND_ASSIGN(Json doc, ParseDocument(first));
  const Json& manifest = doc.at("manifest");
  EXPECT_EQ(manifest.at("seed").get<uint64_t>(), 9u);
  EXPECT_EQ(manifest.at("tool_version").get<std::string>(), kToolVersion);
  EXPECT_FALSE(manifest.contains("wall_clock_seconds"));
  EXPECT_EQ(manifest.at("input_digests").at(data).get<std::string>().size(), 64u);

  const auto command = manifest.at("command").get<std::vector<std::string>>();
  for (const std::string& token : command) EXPECT_NE(token, "--threads");
  fs::remove(hist);
  ASSERT_EQ(RunTool(command).code, kExitOk);
  EXPECT_EQ(ReadFile(hist), first);
}

TEST_F(CliTest, RecordTimingAddsWallClock) {
  const Outcome result = RunTool({"--record-timing", "generate", "--dist", "ball", "--d", "2",
                                  "--n", "10"});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  ASSERT_OK_AND_ASSIGN(Json doc, ParseDocument(result.out));
  EXPECT_GE(doc.at("manifest").at("wall_clock_seconds").get<double>(), 0.0);
}

TEST_F(CliTest, OutOfBoxPointIsAnInputErrorNamingTheIndex) {
  const std::string data = Path("far.json");
  {
    std::ofstream file(data);
    file << R"({"schema_version":1,"d":2,"n":3,"points":[[0.1,0.2],[0.3,0.3],[0.2,1.5]]})";
  }
  const Outcome result = RunTool({"sanitize", "--method", "cube", "--in", data});
  EXPECT_EQ(result.code, kExitInput);
  EXPECT_NE(result.err.find("2"), std::string::npos) << result.err;
  EXPECT_TRUE(result.out.empty());
}

TEST_F(CliTest, UsageErrorsExitWithInputCode) {
  EXPECT_EQ(RunTool({"sanitize", "--method", "cube", "--in", "x", "--no-such-flag"}).code,
            kExitInput);
  EXPECT_EQ(RunTool({}).code, kExitInput);
  EXPECT_EQ(RunTool({"repro", "--suite", "no-such-suite"}).code, kExitInput);
  EXPECT_EQ(RunTool({"sanitize", "--method", "cube", "--in", Path("missing.json")}).code,
            kExitInput);
  EXPECT_EQ(RunTool({"sanitize", "--method", "hexagon", "--in", Path("missing.json")}).code,
            kExitInput);
}

TEST_F(CliTest, AuxFractionNeedsAuxStrategy) {
  const std::string data = Path("data.json");
  const std::string hist = Path("hist.json");
  ASSERT_EQ(RunTool({"generate", "--dist", "ball", "--d", "2", "--n", "100", "--out", data})
                .code,
            kExitOk);
  ASSERT_EQ(RunTool({"sanitize", "--method", "cube", "--in", data, "--out", hist}).code,
            kExitOk);
  EXPECT_EQ(RunTool({"attack", "--hist", hist, "--data", data, "--aux-frac", "0.5"}).code,
            kExitInput);
  const Outcome aux = RunTool({"attack", "--hist", hist, "--data", data, "--strategy",
                               "aux-informed", "--aux-frac", "0.5", "--queries", "500"});
  ASSERT_EQ(aux.code, kExitOk) << aux.err;
  ASSERT_OK_AND_ASSIGN(Json doc, ParseDocument(aux.out));
  EXPECT_EQ(doc.at("aux_subset_size").get<int64_t>(), 50);
  EXPECT_NE(doc.at("note").get<std::string>().find("lower-bound"), std::string::npos);
}

TEST_F(CliTest, ReproRunsANamedSuite) {
  const Outcome result = RunTool({"repro", "--suite", "distance-sandwich", "--seed", "3"});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  ASSERT_OK_AND_ASSIGN(Json doc, ParseDocument(result.out));
  EXPECT_EQ(doc.at("suite").get<std::string>(), "distance-sandwich");
  EXPECT_TRUE(doc.at("passed").get<bool>());
}

TEST(ExitCodeTest, MapsStatusCodes) {
  EXPECT_EQ(ExitCodeFor(absl::OkStatus()), kExitOk);
  EXPECT_EQ(ExitCodeFor(absl::InvalidArgumentError("x")), kExitInput);
  EXPECT_EQ(ExitCodeFor(absl::ResourceExhaustedError("x")), kExitResource);
  EXPECT_EQ(ExitCodeFor(absl::FailedPreconditionError("x")), kExitResource);
  EXPECT_EQ(ExitCodeFor(absl::InternalError("x")), kExitInternal);
}

}  // namespace
}  // namespace histsan::cli
