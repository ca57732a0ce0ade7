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
#include <limits>

#include "doctest.h"
#include "endpoint_rt/call_io.h"
#include "endpoint_rt/error.h"

namespace endpoint_rt {
namespace {

namespace fs = std::filesystem;

SimConfig Small(std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  c.n_turns = 2;
  c.teacher_flip_prob = 0.1;
  return c;
}

TEST_SUITE("call_io") {

TEST_CASE("text encoding round-trips awkward strings") {
  for (std::string s : {"", "plain", "a b", "x=y:z", "100%", "tab\there", "\xc3\xa9t\xc3\xa9"}) {
    const std::string e = EncodeText(s);
    CHECK(e.find(' ') == std::string::npos);
    CHECK_FALSE(e.empty());
    CHECK(DecodeText(e) == s);
  }
  CHECK(EncodeText("") == "%");
  CHECK_THROWS_AS(DecodeText("%4"), FormatError);
  CHECK_THROWS_AS(DecodeText("%zz"), FormatError);
}

TEST_CASE("doubles round-trip exactly") {
  for (double v : {0.0, -1.5, 0.1, 1e-300, 2.0 / 3.0, std::numeric_limits<double>::max()})
    CHECK(std::stod(FormatDouble(v)) == v);
}

TEST_CASE("call files round-trip") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CallRecord c = GenerateCall(Small(seed));
    c.call_id = "id with:odd=chars";
    for (auto& seg : c.segments) seg.call_id = c.call_id;
    CHECK(ParseCall(SerializeCall(c)) == c);
  }
  CallRecord empty;
  empty.call_id = "e";
  CHECK(ParseCall(SerializeCall(empty)) == empty);
}

TEST_CASE("endpoint and transcript files round-trip") {
  EndpointFile ef;
  ef.call_id = "c1";
  ef.config.mode = EndpointMode::kTsAndEow;
  ef.config.ts_threshold_ms = 400;
  ef.config.eow_min_silence_ms = 80;
  ef.stream_end_ms = 5000;
  ef.endpoints = {{600, EndpointTrigger::kTsAndEowImmediate, 200, 0},
                  {2300, EndpointTrigger::kDeferralTimeout, 1300, 600}};
  CHECK(ParseEndpoints(SerializeEndpoints(ef)) == ef);

  TranscriptFile tf;
  tf.call_id = "c1";
  tf.turns = {{0, {{"hello", true}, {"wor", false}}, 0, 600}, {1, {}, 600, 5000}};
  CHECK(ParseTranscript(SerializeTranscript(tf)) == tf);
}

TEST_CASE("report CSV round-trips its columns") {
  ReportRow row;
  row.mode = EndpointMode::kEow;
  row.delta_ms = 400;
  row.tolerance_ms = 200;
  row.report.precision = 0.125;
  row.report.recall = 2.0 / 3.0;
  row.report.f1 = F1Score(0.125, 2.0 / 3.0);
  row.report.wer = 0.01;
  row.report.substitutions = 3;
  row.report.mean_latency_ms = 250.5;
  row.report.median_latency_ms = 240;
  row.report.deferral_timeouts = 7;
  const std::vector<ReportRow> rows = {row, row};
  const std::string csv = SerializeReportCsv(rows);
  CHECK(csv.rfind("# format=1\n" + ReportCsvHeader(), 0) == 0);
  const auto back = ParseReportCsv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[1].mode == EndpointMode::kEow);
  CHECK(back[1].delta_ms == 400);
  CHECK(back[1].report.recall == row.report.recall);
  CHECK(back[1].report.substitutions == 3);
  CHECK(back[1].report.deferral_timeouts == 7);
}

TEST_CASE("malformed files are rejected with the line number") {
  const std::string good = SerializeCall(GenerateCall(Small(1)));
  CHECK_THROWS_AS(ParseCall(""), FormatError);
  CHECK_THROWS_AS(ParseCall("format=2 kind=call"), FormatError);
  CHECK_THROWS_AS(ParseCall(good.substr(0, good.size() / 2)), FormatError);
  std::string bad = good;
  bad.replace(bad.find("\nT "), 3, "\nQ ");
  try {
    ParseCall(bad);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line ") != std::string::npos);
  }
  CHECK_THROWS_AS(ParseEndpoints(SerializeCall(GenerateCall(Small(1)))), FormatError);
}

TEST_CASE("simulator JSON config") {
  const SimConfig c = ParseSimConfig(R"({"seed": 9, "n_turns": 4,
      "gap_dur_ms": [900, 1200], "emission_delay": {"mean_ms": 300, "std_ms": 100, "clip_max_ms": 1000}})");
  CHECK(c.seed == 9);
  CHECK(c.n_turns == 4);
  CHECK(c.gap_dur_ms.min == 900);
  CHECK(c.emission_delay.clip_max_ms == 1000.0);
  CHECK(c.word_dur_ms.max == SimConfig{}.word_dur_ms.max);
  CHECK_THROWS_AS(ParseSimConfig(R"({"n_turn": 4})"), ConfigError);
  CHECK_THROWS_AS(ParseSimConfig(R"({"gap_dur_ms": [1200, 900]})"), ConfigError);
  CHECK_THROWS_AS(ParseSimConfig("{"), ConfigError);
}

TEST_CASE("call directories load sorted by id") {
  const fs::path dir = fs::temp_directory_path() / "endpoint_rt_call_io_test";
  fs::remove_all(dir);
  for (const char* id : {"b", "a", "c"}) {
    SimConfig sc = Small(1);
    sc.call_id = id;
    const CallRecord c = GenerateCall(sc);
    WriteFile(CallPath(dir, c.call_id), SerializeCall(c));
  }
  const auto calls = ReadCallDir(dir);
  REQUIRE(calls.size() == 3);
  CHECK(calls[0].call_id == "a");
  CHECK(calls[2].call_id == "c");
  WriteFile(dir / "broken.call", "nonsense");
  CHECK_THROWS_AS(ReadCallDir(dir), FormatError);
  fs::remove_all(dir);
}

}  // TEST_SUITE

}  // namespace
}  // namespace endpoint_rt
