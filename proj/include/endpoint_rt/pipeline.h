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

// Glue shared by the command-line tool and the acceptance suite: choosing a
// VAD stream for a call, then endpointing, committing and scoring it.

#ifndef ENDPOINT_RT_PIPELINE_H_
#define ENDPOINT_RT_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "endpoint_rt/checkpoint.h"
#include "endpoint_rt/endpointer.h"
#include "endpoint_rt/evaluator.h"
#include "endpoint_rt/stream.h"

namespace endpoint_rt {

// "oracle", "corrupted:<eer>" or "model:<path>".
struct VadSource {
  enum class Kind { kOracle, kCorrupted, kModel };
  Kind kind = Kind::kOracle;
  double eer = 0.0;
  std::string model_path;
};

// Throws ConfigError("vad", ...) on malformed text.
VadSource ParseVadSource(std::string_view text);

// Stable 64-bit FNV-1a of the call id, so per-call randomness does not depend
// on which other calls are processed alongside.
std::uint64_t CallIdHash(std::string_view call_id);

// `model` is required for Kind::kModel and ignored otherwise. Corruption is
// seeded from (seed, call id).
std::vector<VadDecision> DecideVad(const CallRecord& call, const VadSource& src,
                                   const Checkpoint* model, std::uint64_t seed);

struct CallOutcome {
  std::vector<EndpointEvent> endpoints;
  std::vector<TurnTranscript> turns;
  CallEval eval;
};

CallOutcome ProcessCall(const CallRecord& call,
                        const std::vector<VadDecision>& vad,
                        const EndpointerConfig& cfg, const EvalConfig& eval_cfg);

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_PIPELINE_H_
