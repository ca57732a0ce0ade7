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

#include <cmath>

#include "doctest.h"
#include "endpoint_rt/endpointer.h"
#include "endpoint_rt/error.h"
#include "endpoint_rt/evaluator.h"
#include "endpoint_rt/simulator.h"

namespace endpoint_rt {
namespace {

SimConfig Small(std::uint64_t seed) {
  SimConfig c;
  c.seed = seed;
  c.n_turns = 3;
  return c;
}

std::string ConfigErrorField(const SimConfig& c) {
  try {
    CheckSimConfig(c);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

TEST_SUITE("simulator") {

TEST_CASE("generation is deterministic and well formed") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CallRecord a = GenerateCall(Small(seed));
    CHECK(a == GenerateCall(Small(seed)));
    CHECK(ValidateCall(a).empty());
    CHECK(a.segments.size() == 3);
    CHECK(a.segments.front().start_ms == 0);
    CHECK(a.frames.back().label == FrameLabel::kNonSpeech);
  }
  CHECK_FALSE(GenerateCall(Small(1)) == GenerateCall(Small(2)));
  CHECK(CallSeed(5, 0) != CallSeed(5, 1));
}

TEST_CASE("segment ends lie on the frame grid") {
  const CallRecord c = GenerateCall(Small(4));
  for (const auto& s : c.segments) {
    CHECK(s.start_ms % c.frame_ms == 0);
    CHECK(s.end_ms % c.frame_ms == 0);
  }
}

TEST_CASE("zero delay emits each word's EOW at its acoustic end") {
  SimConfig c = Small(9);
  c.emission_delay = {0.0, 0.0, 0.0};
  const CallRecord call = GenerateCall(c);
  for (const auto& s : call.segments) {
    const bool found = std::any_of(call.tokens.begin(), call.tokens.end(), [&](const TokenEvent& t) {
      return t.kind == TokenKind::kEow && t.emit_time_ms == s.end_ms;
    });
    CHECK(found);
  }
}

TEST_CASE("changing the delay leaves the acoustic structure unchanged") {
  SimConfig c = Small(12);
  const CallRecord a = GenerateCall(c);
  c.emission_delay.mean_ms = 400.0;
  const CallRecord b = GenerateCall(c);
  CHECK(a.segments == b.segments);
  CHECK(a.frames == b.frames);
}

TEST_CASE("teacher labels match truth without flips and differ with them") {
  SimConfig c = Small(3);
  const CallRecord clean = GenerateCall(c);
  for (const auto& f : clean.frames) CHECK(f.teacher_label == f.label);
  c.teacher_flip_prob = 0.3;
  const CallRecord noisy = GenerateCall(c);
  std::size_t flips = 0;
  for (const auto& f : noisy.frames) flips += f.teacher_label != f.label;
  const double rate = static_cast<double>(flips) / static_cast<double>(noisy.frames.size());
  CHECK(rate == doctest::Approx(0.3).epsilon(0.3));
}

TEST_CASE("corrupted VAD hits the target error rates") {
  SimConfig c;
  c.seed = 21;
  c.n_turns = 1000;
  const CallRecord call = GenerateCall(c);
  REQUIRE(call.frames.size() >= 100000);
  const auto clean = OracleVad(call);
  for (double eer : {0.0, 0.105, 0.182}) {
    const auto noisy = CorruptVad(clean, eer, 5);
    std::size_t fp = 0, fn = 0, ns = 0, sp = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
      if (clean[i].is_speech) {
        ++sp;
        fn += !noisy[i].is_speech;
      } else {
        ++ns;
        fp += noisy[i].is_speech;
      }
    }
    CHECK(std::abs(static_cast<double>(fp) / ns - eer) <= 0.01);
    CHECK(std::abs(static_cast<double>(fn) / sp - eer) <= 0.01);
  }
  CHECK_THROWS_AS(CorruptVad(clean, 0.5, 1), ConfigError);
}

TEST_CASE("oracle VAD replay gives one TS endpoint per turn, delta after its end") {
  SimConfig c = Small(31);
  c.n_turns = 2;
  const CallRecord call = GenerateCall(c);
  EndpointerConfig ec;
  ec.mode = EndpointMode::kTs;
  ec.ts_threshold_ms = 200;
  const auto eps = RunCall(ec, MergeStreams(OracleVad(call), call.tokens));
  REQUIRE(eps.size() == 2);
  for (std::size_t k = 0; k < 2; ++k)
    CHECK(std::abs(eps[k].time_ms - (call.segments[k].end_ms + 200)) <= 40);
}

TEST_CASE("invalid configs name the offending field") {
  SimConfig c;
  c.gap_dur_ms = {900, 800};
  CHECK(ConfigErrorField(c) == "gap_dur_ms");
  c = SimConfig{};
  c.n_turns = 0;
  CHECK(ConfigErrorField(c) == "n_turns");
  c = SimConfig{};
  c.pause_prob = 1.5;
  CHECK(ConfigErrorField(c) == "pause_prob");
  c = SimConfig{};
  c.subwords_per_word = {0, 2};
  CHECK(ConfigErrorField(c) == "subwords_per_word");
  c = SimConfig{};
  c.emission_delay.std_ms = -1;
  CHECK(ConfigErrorField(c) == "emission_delay");
  c = SimConfig{};
  c.call_id = "has space";
  CHECK(ConfigErrorField(c) == "call_id");
  CHECK(ConfigErrorField(SimConfig{}).empty());
}

TEST_CASE("emission delay hurts the blank-run detector") {
  EndpointerConfig ec;
  ec.mode = EndpointMode::kBlank;
  ec.blank_run_frames = 6;
  const EvalConfig eval{200, 200};
  auto errors = [&](double delay_ms) {
    std::vector<CallEval> evals;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SimConfig c = Small(seed);
      c.emission_delay = {delay_ms, delay_ms / 3, 1000.0};
      const CallRecord call = GenerateCall(c);
      const auto eps = RunCall(ec, MergeStreams({}, call.tokens));
      const auto turns = CommitTranscript(call.tokens, eps, call.stream_end_ms());
      evals.push_back(EvaluateCall(call, eps, turns, eval));
    }
    const EvalReport r = PoolCalls(evals);
    return r.false_alarms + r.misses;
  };
  CHECK(errors(300.0) > errors(0.0));
}

}  // TEST_SUITE

}  // namespace
}  // namespace endpoint_rt
