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

#include <map>
#include <random>

#include "doctest.h"
#include "endpoint_rt/endpointer.h"
#include "endpoint_rt/error.h"
#include "endpoint_rt/simulator.h"
#include "oracles.h"
#include "scenarios.h"

namespace endpoint_rt {
namespace {

using scenario::VadFromMask;

EndpointerConfig Cfg(EndpointMode mode, Millis delta = 200, Millis cap = 1000) {
  EndpointerConfig c;
  c.mode = mode;
  c.ts_threshold_ms = delta;
  c.deferral_cap_ms = cap;
  return c;
}

std::vector<Millis> Times(const std::vector<EndpointEvent>& eps) {
  std::vector<Millis> t;
  for (const auto& e : eps) t.push_back(e.time_ms);
  return t;
}

struct RandomCase {
  CallRecord call;
  std::vector<VadDecision> vad;
  std::vector<TimelineEvent> timeline;
};

RandomCase MakeRandomCase(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SimConfig cfg;
  cfg.seed = seed;
  cfg.n_turns = 2 + static_cast<int>(rng() % 3);
  cfg.emission_delay.mean_ms = static_cast<double>(rng() % 400);
  RandomCase rc;
  rc.call = GenerateCall(cfg);
  const double eer = static_cast<double>(rng() % 25) / 100.0;
  rc.vad = CorruptVad(OracleVad(rc.call), eer, seed + 1);
  rc.timeline = MergeStreams(rc.vad, rc.call.tokens);
  return rc;
}

// Maximal nonspeech runs as [start, end).
std::vector<std::pair<Millis, Millis>> Runs(const std::vector<VadDecision>& vad) {
  std::vector<std::pair<Millis, Millis>> runs;
  for (std::size_t i = 0; i < vad.size();) {
    if (vad[i].is_speech) { ++i; continue; }
    std::size_t j = i;
    while (j < vad.size() && !vad[j].is_speech) ++j;
    runs.emplace_back(vad[i].time_ms, vad[j - 1].time_ms + scenario::kFrame);
    i = j;
  }
  return runs;
}

TEST_SUITE("endpointer") {

TEST_CASE("config validation") {
  CHECK_NOTHROW(Endpointer(Cfg(EndpointMode::kTs, 200)));
  CHECK_THROWS_AS(Endpointer(Cfg(EndpointMode::kTs, 210)), ConfigError);
  CHECK_THROWS_AS(Endpointer(Cfg(EndpointMode::kTsAndEow, 400, 200)), ConfigError);
  EndpointerConfig b = Cfg(EndpointMode::kBlank);
  b.blank_run_frames = 6;
  CHECK_NOTHROW(Endpointer{b});
  b.blank_run_frames = 0;
  CHECK_THROWS_AS(Endpointer{b}, ConfigError);
  try {
    Endpointer(Cfg(EndpointMode::kTs, 210));
  } catch (const ConfigError& e) {
    CHECK(e.field() == "ts_threshold_ms");
  }
}

TEST_CASE("mode and trigger names round-trip") {
  for (auto m : {EndpointMode::kBlank, EndpointMode::kTs, EndpointMode::kEow, EndpointMode::kTsAndEow})
    CHECK(ParseEndpointMode(EndpointModeName(m)) == m);
  for (auto t : {EndpointTrigger::kBlankRun, EndpointTrigger::kTs, EndpointTrigger::kEow,
                 EndpointTrigger::kTsAndEowImmediate, EndpointTrigger::kTsAndEowDeferred,
                 EndpointTrigger::kDeferralTimeout})
    CHECK(ParseEndpointTrigger(EndpointTriggerName(t)) == t);
  CHECK_FALSE(ParseEndpointMode("ts"));
}

TEST_CASE("TS fires delta after the nonspeech run starts") {
  const auto tl = MergeStreams(VadFromMask("SSSSSSSSSS....."), {});
  const auto eps = RunCall(Cfg(EndpointMode::kTs), tl);
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].time_ms == 600);
  CHECK(eps[0].silence_start_ms == 400);
  CHECK(eps[0].trigger == EndpointTrigger::kTs);
}

TEST_CASE("TS ignores runs shorter than delta and re-arms on speech") {
  const auto tl = MergeStreams(VadFromMask("SS....SS.....S...S"), {});
  CHECK(Times(RunCall(Cfg(EndpointMode::kTs), tl)) == std::vector<Millis>{520});
  CHECK(RunCall(Cfg(EndpointMode::kTs), MergeStreams({}, {})).empty());
}

TEST_CASE("TS_AND_EOW case C1: EOW before t1 + delta") {
  const auto eps = RunCall(Cfg(EndpointMode::kTsAndEow), scenario::SyncCase(10, 480, 1400));
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].time_ms == 600);
  CHECK(eps[0].trigger == EndpointTrigger::kTsAndEowImmediate);
}

TEST_CASE("TS_AND_EOW case C2: EOW after t1 + delta defers to it") {
  const auto eps = RunCall(Cfg(EndpointMode::kTsAndEow), scenario::SyncCase(10, 930, 1400));
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].time_ms == 930);
  CHECK(eps[0].trigger == EndpointTrigger::kTsAndEowDeferred);
  CHECK(eps[0].deferred_by_ms == 330);
}

TEST_CASE("TS_AND_EOW times out at t1 + D without an EOW") {
  const auto eps = RunCall(Cfg(EndpointMode::kTsAndEow), scenario::SyncCase(10, 3000, 1400));
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].time_ms == 1400);
  CHECK(eps[0].trigger == EndpointTrigger::kDeferralTimeout);
}

TEST_CASE("EOW at exactly t1 + delta is case C1") {
  const auto eps = RunCall(Cfg(EndpointMode::kTsAndEow), scenario::SyncCase(10, 600, 1400));
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].trigger == EndpointTrigger::kTsAndEowImmediate);
  CHECK(eps[0].time_ms == 600);
}

TEST_CASE("speech during a deferral cancels it") {
  std::string mask = std::string(10, 'S') + std::string(8, '.') + "SSSS" + std::string(40, '.');
  const std::vector<TokenEvent> tokens = {{360, TokenKind::kSubword, "a", 0},
                                          {2000, TokenKind::kSubword, "b", 1}};
  const auto eps = RunCall(Cfg(EndpointMode::kTsAndEow), MergeStreams(VadFromMask(mask), tokens));
  // The first run defers, speech cancels it; the second run defers until its cap.
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].trigger == EndpointTrigger::kDeferralTimeout);
  CHECK(eps[0].silence_start_ms == 880);
}

TEST_CASE("a subword in the same millisecond as the deferred EOW keeps the wait open") {
  std::string mask = std::string(10, 'S') + std::string(40, '.');
  const std::vector<TokenEvent> tokens = {{360, TokenKind::kSubword, "a", 0},
                                          {900, TokenKind::kEow, "", 0},
                                          {900, TokenKind::kSubword, "b", 1},
                                          {1100, TokenKind::kEow, "", 1}};
  const auto eps = RunCall(Cfg(EndpointMode::kTsAndEow), MergeStreams(VadFromMask(mask), tokens));
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].time_ms == 1100);
  CHECK(eps[0].trigger == EndpointTrigger::kTsAndEowDeferred);
}

TEST_CASE("EOW rule fires at max(t1 + minimum silence, EOW time)") {
  EndpointerConfig c = Cfg(EndpointMode::kEow);
  c.eow_min_silence_ms = 40;
  auto eps = RunCall(c, scenario::SyncCase(10, 300, 800));
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].time_ms == 440);
  CHECK(eps[0].trigger == EndpointTrigger::kEow);
  eps = RunCall(c, scenario::SyncCase(10, 700, 800));
  REQUIRE(eps.size() == 1);
  CHECK(eps[0].time_ms == 700);
  CHECK(eps[0].deferred_by_ms == 260);
}

TEST_CASE("default EOW minimum silence is half of delta in whole frames") {
  EndpointerConfig c = Cfg(EndpointMode::kEow, 200);
  CHECK(c.eow_min_silence() == 120);
  c.ts_threshold_ms = 400;
  CHECK(c.eow_min_silence() == 200);
  c.eow_min_silence_ms = 40;
  CHECK(c.eow_min_silence() == 40);
}

TEST_CASE("an EOW closes at most one turn") {
  EndpointerConfig c = Cfg(EndpointMode::kEow);
  c.eow_min_silence_ms = 40;
  const std::vector<TokenEvent> tokens = {{40, TokenKind::kSubword, "a", 0},
                                          {80, TokenKind::kEow, "", 0}};
  const auto eps = RunCall(c, MergeStreams(VadFromMask("SSS...S...S..."), tokens));
  CHECK(eps.size() == 1);
}

TEST_CASE("blank-run failure modes") {
  EndpointerConfig c = Cfg(EndpointMode::kBlank);
  c.blank_run_frames = 6;
  auto run = [&](const scenario::BlankCase& bc) { return Times(RunCall(c, MergeStreams({}, bc.tokens))); };
  CHECK(run(scenario::FalseEndpointCase()) == std::vector<Millis>{480, 1080});
  CHECK(run(scenario::MissedEndpointCase()) == std::vector<Millis>{1360});
  CHECK(run(scenario::DelayedEndpointCase(0)) == std::vector<Millis>{640});
  CHECK(run(scenario::DelayedEndpointCase(4)) == std::vector<Millis>{800});
}

TEST_CASE("out-of-order input poisons the detector") {
  Endpointer ep(Cfg(EndpointMode::kTs));
  const auto vad = VadFromMask("SS");
  ep.Step({40, vad[1]});
  CHECK_THROWS_AS(ep.Step({0, vad[0]}), Error);
  CHECK(ep.state().poisoned);
  CHECK_THROWS_AS(ep.Step({80, vad[1]}), Error);
}

TEST_CASE("commit: a closed word, a fragment, and no endpoints") {
  const std::vector<TokenEvent> tokens = {{100, TokenKind::kSubword, "hel", 0},
                                          {140, TokenKind::kSubword, "lo", 0},
                                          {180, TokenKind::kEow, "", 0}};
  auto turns = CommitTranscript(tokens, std::vector<EndpointEvent>{{200, EndpointTrigger::kTs, 0, 0}}, 1000);
  REQUIRE(turns.size() == 1);
  CHECK(turns[0].words == std::vector<CommittedWord>{{"hello", true}});

  turns = CommitTranscript(tokens, std::vector<EndpointEvent>{{150, EndpointTrigger::kTs, 0, 0}}, 1000);
  // The EOW after the endpoint closes nothing, and an empty tail is no turn.
  REQUIRE(turns.size() == 1);
  CHECK(turns[0].words == std::vector<CommittedWord>{{"hello", false}});

  turns = CommitTranscript(tokens, std::vector<EndpointEvent>{{120, EndpointTrigger::kTs, 0, 0}}, 1000);
  REQUIRE(turns.size() == 2);
  CHECK(turns[0].words == std::vector<CommittedWord>{{"hel", false}});
  CHECK(turns[1].words == std::vector<CommittedWord>{{"lo", true}});
  CHECK(HypothesisWords(turns) == std::vector<std::string>{"hel", "lo"});

  turns = CommitTranscript(tokens, {}, 1000);
  REQUIRE(turns.size() == 1);
  CHECK(turns[0].start_ms == 0);
  CHECK(turns[0].end_ms == 1000);
}

TEST_CASE("commit: a token at the endpoint instant belongs to the closing turn") {
  const std::vector<TokenEvent> tokens = {{200, TokenKind::kSubword, "a", 0},
                                          {200, TokenKind::kEow, "", 0},
                                          {201, TokenKind::kSubword, "b", 1},
                                          {260, TokenKind::kEow, "", 1}};
  const auto turns =
      CommitTranscript(tokens, std::vector<EndpointEvent>{{200, EndpointTrigger::kTs, 0, 0}}, 400);
  REQUIRE(turns.size() == 2);
  CHECK(turns[0].words == std::vector<CommittedWord>{{"a", true}});
  CHECK(turns[1].words == std::vector<CommittedWord>{{"b", true}});
}

TEST_CASE("property: TS endpoints equal the offline run-length scan") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RandomCase rc = MakeRandomCase(seed);
    for (Millis delta : {40, 200, 400}) {
      const auto eps = RunCall(Cfg(EndpointMode::kTs, delta), rc.timeline);
      CHECK(Times(eps) == oracle::OfflineTsEndpoints(rc.vad, rc.call.frame_ms, delta));
    }
  }
}

TEST_CASE("property: BLANK endpoints equal the offline blank scan") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RandomCase rc = MakeRandomCase(seed);
    for (int n : {1, 3, 6}) {
      EndpointerConfig c = Cfg(EndpointMode::kBlank);
      c.blank_run_frames = n;
      CHECK(Times(RunCall(c, rc.timeline)) == oracle::OfflineBlankEndpoints(rc.call.tokens, n));
    }
  }
}

TEST_CASE("property: streaming equals batch, and runs are deterministic") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const RandomCase rc = MakeRandomCase(seed);
    for (auto mode : {EndpointMode::kBlank, EndpointMode::kTs, EndpointMode::kEow, EndpointMode::kTsAndEow}) {
      const EndpointerConfig c = Cfg(mode);
      const auto batch = RunCall(c, rc.timeline);
      Endpointer ep(c);
      std::vector<EndpointEvent> streamed;
      for (const auto& ev : rc.timeline)
        if (auto e = ep.Step(ev)) streamed.push_back(*e);
      CHECK(streamed == batch);
      CHECK(RunCall(c, rc.timeline) == batch);
    }
  }
}

TEST_CASE("property: at most one endpoint per nonspeech run") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RandomCase rc = MakeRandomCase(seed);
    const auto runs = Runs(rc.vad);
    for (auto mode : {EndpointMode::kTs, EndpointMode::kEow, EndpointMode::kTsAndEow}) {
      std::map<Millis, int> per_run;
      for (const auto& e : RunCall(Cfg(mode), rc.timeline)) {
        CHECK(e.time_ms >= e.silence_start_ms);
        auto it = std::find_if(runs.begin(), runs.end(),
                               [&](const auto& r) { return r.first == e.silence_start_ms; });
        REQUIRE(it != runs.end());
        CHECK(e.time_ms <= std::max(it->second, rc.call.stream_end_ms()));
        CHECK(++per_run[e.silence_start_ms] == 1);
      }
    }
  }
}

TEST_CASE("property: endpoint count is non-increasing in delta and N") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RandomCase rc = MakeRandomCase(seed);
    std::size_t prev = SIZE_MAX;
    for (Millis delta = 40; delta <= 800; delta += 40) {
      const std::size_t n = RunCall(Cfg(EndpointMode::kTs, delta), rc.timeline).size();
      CHECK(n <= prev);
      prev = n;
    }
    prev = SIZE_MAX;
    for (int frames = 1; frames <= 20; ++frames) {
      EndpointerConfig c = Cfg(EndpointMode::kBlank);
      c.blank_run_frames = frames;
      const std::size_t n = RunCall(c, rc.timeline).size();
      CHECK(n <= prev);
      prev = n;
    }
  }
}

TEST_CASE("property: EOW-gated endpoints never cut a word") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RandomCase rc = MakeRandomCase(seed);
    for (auto mode : {EndpointMode::kEow, EndpointMode::kTsAndEow}) {
      const auto eps = RunCall(Cfg(mode), rc.timeline);
      const auto turns = CommitTranscript(rc.call.tokens, eps, rc.call.stream_end_ms());
      for (std::size_t k = 0; k < eps.size(); ++k) {
        if (eps[k].trigger == EndpointTrigger::kDeferralTimeout) continue;
        CHECK(IsEowGated(eps[k].trigger));
        for (const auto& w : turns[k].words) CHECK(w.closed_by_eow);
      }
    }
  }
}

TEST_CASE("property: case C1 endpoints coincide with the TS endpoint of the run") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RandomCase rc = MakeRandomCase(seed);
    const auto ts = RunCall(Cfg(EndpointMode::kTs), rc.timeline);
    for (const auto& e : RunCall(Cfg(EndpointMode::kTsAndEow), rc.timeline)) {
      if (e.trigger != EndpointTrigger::kTsAndEowImmediate) continue;
      const bool match = std::any_of(ts.begin(), ts.end(), [&](const EndpointEvent& t) {
        return t.time_ms == e.time_ms && t.silence_start_ms == e.silence_start_ms;
      });
      CHECK(match);
    }
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace endpoint_rt
