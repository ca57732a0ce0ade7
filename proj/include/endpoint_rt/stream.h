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

// Event-stream domain types shared by every stage of the pipeline, and the
// time-ordered merge that hands the endpointer a single timeline.
//
// All timestamps are integer milliseconds. VAD decisions are stamped with the
// start of their frame; a decision at time t describes [t, t + frame_ms).

#ifndef ENDPOINT_RT_STREAM_H_
#define ENDPOINT_RT_STREAM_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace endpoint_rt {

using Millis = std::int64_t;

inline constexpr Millis kDefaultFrameMs = 40;

enum class FrameLabel : std::uint8_t { kNonSpeech = 0, kSpeech = 1 };

enum class TokenKind : std::uint8_t { kBlank, kSubword, kEow };

std::string_view TokenKindName(TokenKind kind);
std::optional<TokenKind> ParseTokenKind(std::string_view name);

struct FrameRecord {
  std::int64_t index = 0;
  Millis time_ms = 0;  // index * frame_ms
  std::vector<double> features;
  std::optional<FrameLabel> label;          // ground truth
  std::optional<FrameLabel> teacher_label;  // noisy teacher, if simulated

  bool operator==(const FrameRecord&) const = default;
};

struct TokenEvent {
  Millis emit_time_ms = 0;
  TokenKind kind = TokenKind::kBlank;
  std::string text;  // empty for blanks
  // Word this token belongs to; an EOW carries the index of the word it closes.
  std::optional<std::int64_t> word_index;

  bool is_blank() const { return kind == TokenKind::kBlank; }
  bool operator==(const TokenEvent&) const = default;
};

struct VadDecision {
  std::int64_t frame_index = 0;
  Millis time_ms = 0;
  double posterior = 0.0;  // P(speech)
  bool is_speech = false;

  bool operator==(const VadDecision&) const = default;
};

struct EndOfStream {
  bool operator==(const EndOfStream&) const = default;
};

struct TimelineEvent {
  Millis time_ms = 0;
  std::variant<VadDecision, TokenEvent, EndOfStream> payload;

  const VadDecision* vad() const { return std::get_if<VadDecision>(&payload); }
  const TokenEvent* token() const { return std::get_if<TokenEvent>(&payload); }
  bool is_end() const { return std::holds_alternative<EndOfStream>(payload); }
  bool operator==(const TimelineEvent&) const = default;
};

struct ReferenceSegment {
  std::string call_id;
  Millis start_ms = 0;
  Millis end_ms = 0;
  std::vector<std::string> words;

  bool operator==(const ReferenceSegment&) const = default;
};

struct CallRecord {
  std::string call_id;
  Millis frame_ms = kDefaultFrameMs;
  std::vector<FrameRecord> frames;
  std::vector<TokenEvent> tokens;
  std::vector<ReferenceSegment> segments;

  // End of the last frame, or 0 for an empty call.
  Millis stream_end_ms() const;
  std::size_t feature_dim() const;
  bool operator==(const CallRecord&) const = default;
};

// Merges the two streams into one timeline ordered by time. At equal times a
// VadDecision precedes a TokenEvent, so a token emitted at a frame boundary is
// judged after that frame's VAD state is known. The timeline always ends with
// one EndOfStream stamped at the latest event time (0 when both are empty).
//
// Throws StreamOrderError naming the first inversion if either input is not
// sorted.
std::vector<TimelineEvent> MergeStreams(const std::vector<VadDecision>& vad,
                                        const std::vector<TokenEvent>& tokens);

struct Violation {
  std::string field;  // e.g. "segments", "tokens", "frames"
  std::size_t index = 0;
  std::string message;
};

// Checks every per-stream invariant of a call. Violations are data; an empty
// report means the call is well formed.
std::vector<Violation> ValidateCall(const CallRecord& call);

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_STREAM_H_
