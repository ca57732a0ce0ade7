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

#include "endpoint_rt/pipeline.h"

#include <charconv>

#include "endpoint_rt/error.h"
#include "endpoint_rt/simulator.h"
#include "endpoint_rt/vad_net.h"

namespace endpoint_rt {

VadSource ParseVadSource(std::string_view text) {
  VadSource src;
  if (text == "oracle") return src;
  if (text.starts_with("corrupted:")) {
    const std::string_view num = text.substr(10);
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), src.eer);
    if (ec != std::errc() || ptr != num.data() + num.size() ||
        !(src.eer >= 0.0 && src.eer < 0.5))
      throw ConfigError("vad", "corrupted:<eer> needs an eer in [0, 0.5)");
    src.kind = VadSource::Kind::kCorrupted;
    return src;
  }
  if (text.starts_with("model:") && text.size() > 6) {
    src.kind = VadSource::Kind::kModel;
    src.model_path = std::string(text.substr(6));
    return src;
  }
  throw ConfigError("vad", "expected oracle, corrupted:<eer> or model:<path>, got '" +
                               std::string(text) + "'");
}

std::uint64_t CallIdHash(std::string_view call_id) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : call_id) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<VadDecision> DecideVad(const CallRecord& call, const VadSource& src,
                                   const Checkpoint* model, std::uint64_t seed) {
  switch (src.kind) {
    case VadSource::Kind::kOracle:
      return OracleVad(call);
    case VadSource::Kind::kCorrupted:
      return CorruptVad(OracleVad(call), src.eer,
                        CallSeed(seed, CallIdHash(call.call_id)));
    case VadSource::Kind::kModel:
      if (model == nullptr) throw Error("model VAD requested without a model");
      return ClassifyFrames(model->model, call.frames, model->threshold);
  }
  return {};
}

CallOutcome ProcessCall(const CallRecord& call,
                        const std::vector<VadDecision>& vad,
                        const EndpointerConfig& cfg, const EvalConfig& eval_cfg) {
  if (cfg.frame_ms != call.frame_ms)
    throw ConfigError("frame_ms", "endpointer uses " + std::to_string(cfg.frame_ms) +
                                      " ms but call '" + call.call_id + "' has " +
                                      std::to_string(call.frame_ms) + " ms frames");
  CallOutcome out;
  out.endpoints = RunCall(cfg, MergeStreams(vad, call.tokens));
  out.turns = CommitTranscript(call.tokens, out.endpoints, call.stream_end_ms());
  out.eval = EvaluateCall(call, out.endpoints, out.turns, eval_cfg);
  return out;
}

}  // namespace endpoint_rt
