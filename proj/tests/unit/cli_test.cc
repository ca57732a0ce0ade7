// Copyright (c) 2026 The endpoint-rt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <sstream>

#include "commands.h"
#include "doctest.h"
#include "endpoint_rt/call_io.h"

namespace endpoint_rt {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out, err;
};

Run Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "endpoint_rt");
  std::ostringstream out, err;
  Run r;
  r.code = RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// A scratch directory removed on scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("endpoint_rt_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& sub) const { return (path / sub).string(); }
};

std::size_t DataLines(const std::string& csv) {
  std::size_t n = 0;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') ++n;
  return n - 1;  // header
}

TEST_SUITE("cli") {

TEST_CASE("help succeeds and usage errors exit 2") {
  CHECK(Cli({"--help"}).code == kExitOk);
  CHECK(Cli({}).code == kExitUsage);
  CHECK(Cli({"frobnicate"}).code == kExitUsage);
  CHECK(Cli({"simulate"}).code == kExitUsage);
}

TEST_CASE("simulate is deterministic") {
  TempDir t("det");
  REQUIRE(Cli({"simulate", "--out", t / "a", "--n-calls", "3", "--seed", "4"}).code == 0);
  REQUIRE(Cli({"simulate", "--out", t / "b", "--n-calls", "3", "--seed", "4"}).code == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(t / "a")) {
    ++files;
    CHECK(ReadFile(e.path()) == ReadFile(fs::path(t / "b") / e.path().filename()));
  }
  CHECK(files == 3);
}

TEST_CASE("bad configuration values exit 2") {
  TempDir t("bad");
  WriteFile(t / "cfg.json", R"({"gap_dur_ms": [2000, 100]})");
  CHECK(Cli({"simulate", "--config", t / "cfg.json", "--out", t / "c"}).code == kExitUsage);
  REQUIRE(Cli({"simulate", "--out", t / "c", "--n-calls", "1"}).code == 0);
  CHECK(Cli({"endpoint", "--calls", t / "c", "--mode", "TS", "--delta-ms", "210",
             "--out", t / "e"}).code == kExitUsage);
  CHECK(Cli({"endpoint", "--calls", t / "c", "--mode", "SOMETIMES", "--out", t / "e"}).code ==
        kExitUsage);
  CHECK(Cli({"endpoint", "--calls", t / "c", "--vad", "corrupted:0.7", "--out", t / "e"}).code ==
        kExitUsage);
  CHECK(Cli({"tradeoff", "--calls", t / "c", "--deltas", "200"}).code == kExitUsage);
  CHECK(Cli({"endpoint", "--calls", t / "missing", "--out", t / "e"}).code == kExitFailure);
}

TEST_CASE("oracle VAD with zero delay scores perfectly") {
  TempDir t("perfect");
  WriteFile(t / "cfg.json", R"({"n_turns": 4, "emission_delay": {"mean_ms": 0, "std_ms": 0, "clip_max_ms": 0}})");
  REQUIRE(Cli({"simulate", "--config", t / "cfg.json", "--out", t / "c", "--n-calls", "3"}).code == 0);
  REQUIRE(Cli({"endpoint", "--calls", t / "c", "--vad", "oracle", "--mode", "TS",
               "--out", t / "e"}).code == 0);
  const Run r = Cli({"evaluate", "--calls", t / "c", "--endpoints", t / "e", "--out", t / "r.csv"});
  REQUIRE(r.code == 0);
  const auto rows = ParseReportCsv(ReadFile(t / "r.csv"));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].report.precision == 1.0);
  CHECK(rows[0].report.recall == 1.0);
  CHECK(rows[0].report.wer == 0.0);
  CHECK(rows[0].report.mean_latency_ms == 200.0);

  fs::remove(EndpointsPath(t / "e", "call-0001"));
  CHECK(Cli({"evaluate", "--calls", t / "c", "--endpoints", t / "e"}).code == kExitFailure);
}

TEST_CASE("tradeoff writes one row per mode and delta") {
  TempDir t("tradeoff");
  REQUIRE(Cli({"simulate", "--out", t / "c", "--n-calls", "2"}).code == 0);
  const Run r = Cli({"tradeoff", "--calls", t / "c", "--vad", "corrupted:0.105",
                     "--modes", "BLANK,TS,EOW,TS_AND_EOW", "--deltas", "200,400,600,800",
                     "--out", t / "t.csv"});
  REQUIRE(r.code == 0);
  const std::string csv = ReadFile(t / "t.csv");
  CHECK(DataLines(csv) == 16);
  CHECK(ParseReportCsv(csv).size() == 16);
}

TEST_CASE("train-vad and det on well-separated features") {
  TempDir t("train");
  REQUIRE(Cli({"simulate", "--out", t / "c", "--n-calls", "4"}).code == 0);
  const Run tr = Cli({"train-vad", "--calls", t / "c", "--out", t / "m.bin",
                      "--features", "separability:4", "--epochs", "5", "--h1", "16", "--h2", "16"});
  REQUIRE(tr.code == 0);
  const auto at = tr.out.find("eer=");
  REQUIRE(at != std::string::npos);
  CHECK(std::stod(tr.out.substr(at + 4)) <= 0.05);

  const Run d = Cli({"det", "--calls", t / "c", "--model", t / "m.bin",
                     "--features", "separability:4", "--out", t / "det.csv"});
  REQUIRE(d.code == 0);
  CHECK(DataLines(ReadFile(t / "det.csv")) > 2);
  REQUIRE(Cli({"endpoint", "--calls", t / "c", "--vad", "model:" + (t / "m.bin"),
               "--out", t / "e"}).code == 0);
}

}  // TEST_SUITE

}  // namespace
}  // namespace endpoint_rt
