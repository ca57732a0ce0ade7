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

#include "endpoint_rt/stream.h"

#include <algorithm>
#include <map>
#include <set>

#include "endpoint_rt/error.h"

namespace endpoint_rt {

std::string_view TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kBlank:
      return "BLANK";
    case TokenKind::kSubword:
      return "SUBWORD";
    case TokenKind::kEow:
      return "EOW";
  }
  return "?";
}

std::optional<TokenKind> ParseTokenKind(std::string_view name) {
  if (name == "BLANK") return TokenKind::kBlank;
  if (name == "SUBWORD") return TokenKind::kSubword;
  if (name == "EOW") return TokenKind::kEow;
  return std::nullopt;
}

Millis CallRecord::stream_end_ms() const {
  if (frames.empty()) return 0;
  return frames.back().time_ms + frame_ms;
}

std::size_t CallRecord::feature_dim() const {
  return frames.empty() ? 0 : frames.front().features.size();
}

std::vector<TimelineEvent> MergeStreams(const std::vector<VadDecision>& vad,
                                        const std::vector<TokenEvent>& tokens) {
  for (std::size_t i = 1; i < vad.size(); ++i) {
    if (vad[i].time_ms < vad[i - 1].time_ms) throw StreamOrderError("vad", i);
  }
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (tokens[i].emit_time_ms < tokens[i - 1].emit_time_ms)
      throw StreamOrderError("tokens", i);
  }

  std::vector<TimelineEvent> out;
  out.reserve(vad.size() + tokens.size() + 1);
  std::size_t v = 0, t = 0;
  while (v < vad.size() || t < tokens.size()) {
    // VAD wins ties.
    bool take_vad = t == tokens.size() ||
                    (v < vad.size() && vad[v].time_ms <= tokens[t].emit_time_ms);
    if (take_vad) {
      out.push_back({vad[v].time_ms, vad[v]});
      ++v;
    } else {
      out.push_back({tokens[t].emit_time_ms, tokens[t]});
      ++t;
    }
  }
  Millis end = out.empty() ? 0 : out.back().time_ms;
  out.push_back({end, EndOfStream{}});
  return out;
}

std::vector<Violation> ValidateCall(const CallRecord& call) {
  std::vector<Violation> report;
  auto add = [&report](std::string field, std::size_t index, std::string msg) {
    report.push_back({std::move(field), index, std::move(msg)});
  };

  if (call.frame_ms <= 0) add("frame_ms", 0, "frame period must be positive");

  const std::size_t dim = call.feature_dim();
  for (std::size_t i = 0; i < call.frames.size(); ++i) {
    const FrameRecord& f = call.frames[i];
    if (f.index < 0) add("frames", i, "negative frame index");
    if (f.time_ms != f.index * call.frame_ms)
      add("frames", i, "time_ms != index * frame_ms");
    if (f.features.size() != dim) add("frames", i, "feature dimension differs");
    if (i > 0 && f.index <= call.frames[i - 1].index)
      add("frames", i, "frame indices not increasing");
  }

  const Millis end = call.stream_end_ms();
  std::map<std::int64_t, std::size_t> eow_position;
  std::set<std::int64_t> flagged_words;
  for (std::size_t i = 0; i < call.tokens.size(); ++i) {
    const TokenEvent& tok = call.tokens[i];
    if (i > 0 && tok.emit_time_ms < call.tokens[i - 1].emit_time_ms)
      add("tokens", i, "emit times decrease");
    if (tok.emit_time_ms < 0 || tok.emit_time_ms > end)
      add("tokens", i, "emit time outside the call");
    if (tok.kind == TokenKind::kBlank && !tok.text.empty())
      add("tokens", i, "blank token carries text");
    if (!tok.word_index) continue;
    const std::int64_t w = *tok.word_index;
    if (tok.kind == TokenKind::kEow) {
      eow_position.emplace(w, i);
    } else if (tok.kind == TokenKind::kSubword) {
      auto it = eow_position.find(w);
      if (it != eow_position.end() && flagged_words.insert(w).second)
        add("tokens", it->second,
            "token order: EOW of word " + std::to_string(w) +
                " precedes its subwords");
    }
  }

  for (std::size_t i = 0; i < call.segments.size(); ++i) {
    const ReferenceSegment& s = call.segments[i];
    if (s.call_id != call.call_id) add("segments", i, "call_id mismatch");
    if (s.start_ms >= s.end_ms) add("segments", i, "start_ms >= end_ms");
    if (s.start_ms < 0 || s.end_ms > end)
      add("segments", i, "segment outside the call");
    if (i > 0) {
      const ReferenceSegment& prev = call.segments[i - 1];
      if (s.start_ms < prev.start_ms)
        add("segments", i, "segments not sorted");
      else if (s.start_ms < prev.end_ms)
        add("segments", i, "overlap with previous segment");
    }
  }
  return report;
}

}  // namespace endpoint_rt
