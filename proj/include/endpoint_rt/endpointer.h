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

// Streaming endpoint detector over a merged VAD + ASR-token timeline.
//
// Modes:
//   BLANK       N consecutive blank tokens end the turn (transducer baseline).
//   TS          delta ms of contiguous VAD nonspeech end the turn, at t1+delta
//               where t1 is the start of the nonspeech run.
//   EOW         inside a nonspeech run of at least `eow_min_silence_ms`, an
//               end-of-word token as the latest non-blank ends the turn at
//               max(t1 + eow_min_silence_ms, EOW time).
//   TS_AND_EOW  the TS condition at t1+delta ends the turn immediately if the
//               latest non-blank is an EOW; otherwise the endpoint waits for
//               the next EOW (ending the turn at its emit time) until
//               t1 + deferral_cap_ms, when it times out.
//
// A condition that becomes true at instant T is settled only once the stream
// has moved past T (or ends), so tokens stamped at or before T are taken into
// account. After an endpoint the detector is disarmed until the next speech
// frame (VAD modes) or non-blank token (BLANK). In the EOW-gated modes an EOW
// closes at most one turn, and a timeout fires only if a word is still open.

#ifndef ENDPOINT_RT_ENDPOINTER_H_
#define ENDPOINT_RT_ENDPOINTER_H_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "endpoint_rt/stream.h"

namespace endpoint_rt {

enum class EndpointMode { kBlank, kTs, kEow, kTsAndEow };

enum class EndpointTrigger {
  kBlankRun,
  kTs,
  kEow,
  kTsAndEowImmediate,
  kTsAndEowDeferred,
  kDeferralTimeout,
};

std::string_view EndpointModeName(EndpointMode mode);
std::optional<EndpointMode> ParseEndpointMode(std::string_view name);
std::string_view EndpointTriggerName(EndpointTrigger trigger);
std::optional<EndpointTrigger> ParseEndpointTrigger(std::string_view name);

// True for triggers that only fire once the latest word is closed by an EOW.
bool IsEowGated(EndpointTrigger trigger);

struct EndpointerConfig {
  EndpointMode mode = EndpointMode::kTs;
  Millis ts_threshold_ms = 200;  // delta
  int blank_run_frames = 6;      // N
  Millis deferral_cap_ms = 1000;  // D, measured from t1
  Millis frame_ms = kDefaultFrameMs;
  // Minimum nonspeech before the EOW rule may fire. 0 selects half of delta
  // rounded up to whole frames; a single frame lets every flipped VAD frame
  // after a word end close the turn.
  Millis eow_min_silence_ms = 0;

  Millis eow_min_silence() const {
    if (eow_min_silence_ms > 0) return eow_min_silence_ms;
    const Millis half = (ts_threshold_ms + 1) / 2;
    return std::max<Millis>(1, (half + frame_ms - 1) / frame_ms) * frame_ms;
  }

  bool operator==(const EndpointerConfig&) const = default;
};

// Throws ConfigError naming the field.
void CheckEndpointerConfig(const EndpointerConfig& cfg);

struct EndpointEvent {
  Millis time_ms = 0;
  EndpointTrigger trigger = EndpointTrigger::kTs;
  Millis silence_start_ms = 0;  // t1 of the run (first blank in BLANK mode)
  Millis deferred_by_ms = 0;

  bool operator==(const EndpointEvent&) const = default;
};

struct PendingDeferral {
  Millis deadline_ms = 0;
  Millis ts_time_ms = 0;  // t1 + delta
  Millis silence_start_ms = 0;
  std::optional<Millis> eow_ms;  // closing EOW seen, waiting to be settled
};

// A condition met at `time_ms`, waiting for the stream to pass that instant.
struct DueEndpoint {
  Millis time_ms = 0;
  Millis silence_start_ms = 0;
  std::uint64_t run_id = 0;
};

struct EndpointerState {
  int consecutive_blank_frames = 0;
  Millis blank_run_start_ms = 0;
  std::optional<Millis> current_nonspeech_run_start;
  Millis nonspeech_run_end_ms = 0;
  std::uint64_t run_id = 0;
  std::optional<TokenKind> last_nonblank_kind;
  bool eow_unconsumed = false;  // latest non-blank is an EOW no turn used yet
  Millis last_eow_ms = 0;
  std::optional<DueEndpoint> due;
  std::optional<PendingDeferral> pending_deferral;
  bool armed = true;
  std::optional<Millis> last_event_ms;
  bool poisoned = false;
};

class Endpointer {
 public:
  // Throws ConfigError.
  explicit Endpointer(const EndpointerConfig& cfg);

  // Feeds one event in merge order. Throws Error on an out-of-order event,
  // after which the detector is poisoned and rejects every further call.
  std::optional<EndpointEvent> Step(const TimelineEvent& event);

  const EndpointerConfig& config() const { return cfg_; }
  const EndpointerState& state() const { return state_; }

 private:
  void StepBlank(const TimelineEvent& event);
  void Advance(Millis now);
  void OnVad(const VadDecision& vad);
  void OnToken(const TokenEvent& token, Millis now);
  void Schedule();
  void ResolveDue();
  void ResolveDeferral(Millis at);
  void Flush(Millis end);
  void Emit(const EndpointEvent& ev);

  EndpointerConfig cfg_;
  EndpointerState state_;
  std::optional<EndpointEvent> out_;
};

// Folds Step over the timeline.
std::vector<EndpointEvent> RunCall(const EndpointerConfig& cfg,
                                   std::span<const TimelineEvent> timeline);

struct CommittedWord {
  std::string text;
  bool closed_by_eow = false;  // false: fragment cut by an endpoint
  bool operator==(const CommittedWord&) const = default;
};

struct TurnTranscript {
  std::int64_t turn_index = 0;
  std::vector<CommittedWord> words;
  Millis start_ms = 0;
  Millis end_ms = 0;
  bool operator==(const TurnTranscript&) const = default;
};

// Splits the token stream into turns at the endpoint times. A token belongs
// to the first turn whose endpoint is at or after its emit time. Subwords of
// one word are concatenated; a word cut by an endpoint becomes an unclosed
// fragment, and its remaining subwords start a new word in the next turn. An
// EOW with no subwords in its turn contributes nothing. Tokens after the last
// endpoint form a final turn ending at `stream_end_ms`.
std::vector<TurnTranscript> CommitTranscript(
    std::span<const TokenEvent> tokens,
    std::span<const EndpointEvent> endpoints, Millis stream_end_ms);

// The call-level hypothesis: every committed word, fragments included.
std::vector<std::string> HypothesisWords(
    std::span<const TurnTranscript> turns);

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_ENDPOINTER_H_
