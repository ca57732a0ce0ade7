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

#include "endpoint_rt/endpointer.h"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>

#include "endpoint_rt/error.h"

namespace endpoint_rt {

namespace {

struct ModeName {
  EndpointMode mode;
  std::string_view name;
};
constexpr ModeName kModes[] = {
    {EndpointMode::kBlank, "BLANK"},
    {EndpointMode::kTs, "TS"},
    {EndpointMode::kEow, "EOW"},
    {EndpointMode::kTsAndEow, "TS_AND_EOW"},
};

struct TriggerName {
  EndpointTrigger trigger;
  std::string_view name;
};
constexpr TriggerName kTriggers[] = {
    {EndpointTrigger::kBlankRun, "BLANK_RUN"},
    {EndpointTrigger::kTs, "TS"},
    {EndpointTrigger::kEow, "EOW"},
    {EndpointTrigger::kTsAndEowImmediate, "TS_AND_EOW_IMMEDIATE"},
    {EndpointTrigger::kTsAndEowDeferred, "TS_AND_EOW_DEFERRED"},
    {EndpointTrigger::kDeferralTimeout, "DEFERRAL_TIMEOUT"},
};

}  // namespace

std::string_view EndpointModeName(EndpointMode mode) {
  for (const auto& m : kModes)
    if (m.mode == mode) return m.name;
  return "?";
}

std::optional<EndpointMode> ParseEndpointMode(std::string_view name) {
  for (const auto& m : kModes)
    if (m.name == name) return m.mode;
  return std::nullopt;
}

std::string_view EndpointTriggerName(EndpointTrigger trigger) {
  for (const auto& t : kTriggers)
    if (t.trigger == trigger) return t.name;
  return "?";
}

std::optional<EndpointTrigger> ParseEndpointTrigger(std::string_view name) {
  for (const auto& t : kTriggers)
    if (t.name == name) return t.trigger;
  return std::nullopt;
}

bool IsEowGated(EndpointTrigger trigger) {
  return trigger == EndpointTrigger::kEow ||
         trigger == EndpointTrigger::kTsAndEowImmediate ||
         trigger == EndpointTrigger::kTsAndEowDeferred;
}

void CheckEndpointerConfig(const EndpointerConfig& cfg) {
  if (cfg.frame_ms <= 0) throw ConfigError("frame_ms", "must be positive");
  if (cfg.mode == EndpointMode::kBlank) {
    if (cfg.blank_run_frames <= 0)
      throw ConfigError("blank_run_frames", "must be positive");
    return;
  }
  if (cfg.ts_threshold_ms <= 0)
    throw ConfigError("ts_threshold_ms", "must be positive");
  if (cfg.ts_threshold_ms % cfg.frame_ms != 0)
    throw ConfigError("ts_threshold_ms", "must be a multiple of frame_ms (" +
                                             std::to_string(cfg.frame_ms) + ")");
  if (cfg.deferral_cap_ms < cfg.ts_threshold_ms)
    throw ConfigError("deferral_cap_ms", "must be >= ts_threshold_ms");
  if (cfg.eow_min_silence_ms < 0 || cfg.eow_min_silence_ms % cfg.frame_ms != 0)
    throw ConfigError("eow_min_silence_ms",
                      "must be a non-negative multiple of frame_ms");
}

Endpointer::Endpointer(const EndpointerConfig& cfg) : cfg_(cfg) {
  CheckEndpointerConfig(cfg_);
}

void Endpointer::Emit(const EndpointEvent& ev) {
  if (out_) throw std::logic_error("endpointer emitted twice in one step");
  out_ = ev;
}

std::optional<EndpointEvent> Endpointer::Step(const TimelineEvent& event) {
  if (state_.poisoned)
    throw Error("endpointer rejected input after an earlier ordering error");
  if (state_.last_event_ms && event.time_ms < *state_.last_event_ms) {
    state_.poisoned = true;
    throw Error("out-of-order event at " + std::to_string(event.time_ms) +
                " ms after " + std::to_string(*state_.last_event_ms) + " ms");
  }
  state_.last_event_ms = event.time_ms;
  out_.reset();

  if (cfg_.mode == EndpointMode::kBlank) {
    StepBlank(event);
  } else if (event.is_end()) {
    Flush(event.time_ms);
  } else {
    Advance(event.time_ms);
    if (const VadDecision* v = event.vad()) OnVad(*v);
    if (const TokenEvent* t = event.token()) OnToken(*t, event.time_ms);
    Schedule();
  }
  return std::exchange(out_, std::nullopt);
}

void Endpointer::StepBlank(const TimelineEvent& event) {
  const TokenEvent* tok = event.token();
  if (!tok) return;
  EndpointerState& s = state_;
  if (!tok->is_blank()) {
    s.consecutive_blank_frames = 0;
    s.last_nonblank_kind = tok->kind;
    s.armed = true;
    return;
  }
  if (s.consecutive_blank_frames == 0) s.blank_run_start_ms = event.time_ms;
  ++s.consecutive_blank_frames;
  if (s.armed && s.consecutive_blank_frames >= cfg_.blank_run_frames) {
    Emit({event.time_ms, EndpointTrigger::kBlankRun, s.blank_run_start_ms, 0});
    s.armed = false;
  }
}

// Settles whatever came due strictly before `now`.
void Endpointer::Advance(Millis now) {
  if (state_.due && state_.due->time_ms < now) ResolveDue();
  if (!state_.pending_deferral) return;
  const PendingDeferral& p = *state_.pending_deferral;
  if (p.eow_ms && *p.eow_ms < now) {
    ResolveDeferral(*p.eow_ms);
  } else if (p.deadline_ms < now) {
    ResolveDeferral(p.deadline_ms);
  }
}

void Endpointer::OnVad(const VadDecision& vad) {
  EndpointerState& s = state_;
  if (vad.is_speech) {
    s.pending_deferral.reset();
    if (s.due && vad.time_ms < s.due->time_ms) s.due.reset();
    s.current_nonspeech_run_start.reset();
    s.armed = true;
    return;
  }
  if (!s.current_nonspeech_run_start) {
    s.current_nonspeech_run_start = vad.time_ms;
    ++s.run_id;
  }
  s.nonspeech_run_end_ms = vad.time_ms + cfg_.frame_ms;
}

void Endpointer::OnToken(const TokenEvent& token, Millis now) {
  EndpointerState& s = state_;
  if (token.is_blank()) return;
  s.last_nonblank_kind = token.kind;
  if (token.kind == TokenKind::kSubword) {
    s.eow_unconsumed = false;
    // A word opened in the same millisecond as the closing EOW: keep waiting.
    if (s.pending_deferral) s.pending_deferral->eow_ms.reset();
    return;
  }
  s.eow_unconsumed = true;
  s.last_eow_ms = now;
  if (s.pending_deferral) s.pending_deferral->eow_ms = now;
}

void Endpointer::Schedule() {
  EndpointerState& s = state_;
  if (!s.armed || s.due || s.pending_deferral || !s.current_nonspeech_run_start)
    return;
  const Millis t1 = *s.current_nonspeech_run_start;
  const Millis run = s.nonspeech_run_end_ms - t1;
  if (cfg_.mode == EndpointMode::kEow) {
    const Millis min_silence = cfg_.eow_min_silence();
    if (run >= min_silence && s.eow_unconsumed)
      s.due = DueEndpoint{std::max(t1 + min_silence, s.last_eow_ms), t1, s.run_id};
  } else if (run >= cfg_.ts_threshold_ms) {
    s.due = DueEndpoint{t1 + cfg_.ts_threshold_ms, t1, s.run_id};
  }
}

void Endpointer::ResolveDue() {
  EndpointerState& s = state_;
  const DueEndpoint due = *s.due;
  s.due.reset();
  const bool run_open =
      s.current_nonspeech_run_start.has_value() && s.run_id == due.run_id;
  // Disarm for the rest of the run; if speech already ended it, speech has
  // re-armed us.
  auto fired = [&] { s.armed = !run_open; };

  switch (cfg_.mode) {
    case EndpointMode::kTs:
      Emit({due.time_ms, EndpointTrigger::kTs, due.silence_start_ms, 0});
      fired();
      break;
    case EndpointMode::kEow:
      if (s.eow_unconsumed) {
        s.eow_unconsumed = false;
        Emit({due.time_ms, EndpointTrigger::kEow, due.silence_start_ms,
              due.time_ms - (due.silence_start_ms + cfg_.eow_min_silence())});
        fired();
      }
      break;
    case EndpointMode::kTsAndEow:
      if (s.eow_unconsumed) {
        s.eow_unconsumed = false;
        Emit({due.time_ms, EndpointTrigger::kTsAndEowImmediate,
              due.silence_start_ms, 0});
        fired();
      } else if (run_open) {
        s.pending_deferral = PendingDeferral{
            due.silence_start_ms + cfg_.deferral_cap_ms, due.time_ms,
            due.silence_start_ms, std::nullopt};
        s.armed = false;
      }
      break;
    case EndpointMode::kBlank:
      break;
  }
}

void Endpointer::ResolveDeferral(Millis at) {
  EndpointerState& s = state_;
  const PendingDeferral p = *s.pending_deferral;
  s.pending_deferral.reset();
  if (p.eow_ms) {
    s.eow_unconsumed = false;
    Emit({*p.eow_ms, EndpointTrigger::kTsAndEowDeferred, p.silence_start_ms,
          *p.eow_ms - p.ts_time_ms});
  } else if (s.last_nonblank_kind == TokenKind::kSubword) {
    // Nothing to close unless a word is still open.
    Emit({at, EndpointTrigger::kDeferralTimeout, p.silence_start_ms,
          at - p.ts_time_ms});
  }
}

void Endpointer::Flush(Millis end) {
  if (state_.due) ResolveDue();
  if (state_.pending_deferral) {
    const PendingDeferral& p = *state_.pending_deferral;
    ResolveDeferral(p.eow_ms ? *p.eow_ms
                             : std::max(p.ts_time_ms, std::min(p.deadline_ms, end)));
  }
}

std::vector<EndpointEvent> RunCall(const EndpointerConfig& cfg,
                                   std::span<const TimelineEvent> timeline) {
  Endpointer ep(cfg);
  std::vector<EndpointEvent> out;
  for (const TimelineEvent& ev : timeline)
    if (auto e = ep.Step(ev)) out.push_back(*e);
  return out;
}

namespace {

constexpr std::int64_t kNoWordIndex = std::numeric_limits<std::int64_t>::min();

// Tokens without a word index are taken to continue the open word.
bool SameWord(std::int64_t open, const std::optional<std::int64_t>& tok) {
  return open == kNoWordIndex || !tok || open == *tok;
}

}  // namespace

std::vector<TurnTranscript> CommitTranscript(
    std::span<const TokenEvent> tokens,
    std::span<const EndpointEvent> endpoints, Millis stream_end_ms) {
  std::vector<TurnTranscript> turns;
  TurnTranscript turn;
  bool word_open = false;
  std::int64_t open_index = kNoWordIndex;

  auto close_word = [&](bool by_eow) {
    if (word_open) turn.words.back().closed_by_eow = by_eow;
    word_open = false;
    open_index = kNoWordIndex;
  };
  auto finish_turn = [&](Millis end) {
    // A word still open here is a fragment; its remaining subwords start over.
    word_open = false;
    turn.end_ms = end;
    turns.push_back(std::move(turn));
    turn = TurnTranscript{};
    turn.turn_index = static_cast<std::int64_t>(turns.size());
    turn.start_ms = end;
  };

  std::size_t next_ep = 0;
  for (const TokenEvent& tok : tokens) {
    while (next_ep < endpoints.size() &&
           tok.emit_time_ms > endpoints[next_ep].time_ms) {
      finish_turn(endpoints[next_ep].time_ms);
      ++next_ep;
    }
    if (tok.is_blank()) continue;
    if (tok.kind == TokenKind::kSubword) {
      const bool same_word = word_open && SameWord(open_index, tok.word_index);
      if (!same_word) {
        close_word(false);
        turn.words.push_back({"", false});
        word_open = true;
        open_index = tok.word_index.value_or(kNoWordIndex);
      }
      turn.words.back().text += tok.text;
    } else if (word_open) {
      close_word(SameWord(open_index, tok.word_index));
    }
  }
  for (; next_ep < endpoints.size(); ++next_ep)
    finish_turn(endpoints[next_ep].time_ms);
  if (endpoints.empty() || !turn.words.empty()) finish_turn(stream_end_ms);
  return turns;
}

std::vector<std::string> HypothesisWords(
    std::span<const TurnTranscript> turns) {
  std::vector<std::string> out;
  for (const TurnTranscript& t : turns)
    for (const CommittedWord& w : t.words) out.push_back(w.text);
  return out;
}

}  // namespace endpoint_rt
