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

// Synthetic two-party call generator with ground truth.
//
// A call alternates speaker turns and gaps, starting with a turn at t = 0 and
// ending with a gap. A turn is a run of words with occasional short pauses;
// every duration is a whole number of frames so segment ends sit on the frame
// grid. Each word of k subwords produces k SUBWORD tokens and one EOW. A
// token's ideal emit time is the acoustic end of its unit (the EOW shares the
// word end); the actual time adds a clipped Gaussian delay and is then made
// non-decreasing over the stream. Frames with no non-blank emission get one
// BLANK token at the frame start.
//
// Features are isotropic unit Gaussians whose class means sit
// feature_separability apart along the all-ones direction, so the Bayes
// error of a frame classifier is Phi(-separability / 2): 2.51 gives an EER
// near 0.105, 1.82 near 0.182.
//
// Structure, delays, features and teacher labels draw from independent
// streams derived from the seed, so changing one knob leaves the others'
// samples unchanged.

#ifndef ENDPOINT_RT_SIMULATOR_H_
#define ENDPOINT_RT_SIMULATOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "endpoint_rt/stream.h"

namespace endpoint_rt {

struct MsRange {
  Millis min = 0;
  Millis max = 0;
};

struct IntRange {
  int min = 0;
  int max = 0;
};

struct EmissionDelay {
  double mean_ms = 150.0;
  double std_ms = 50.0;
  double clip_max_ms = 600.0;
};

struct SimConfig {
  std::uint64_t seed = 0;
  std::string call_id = "call";
  int n_turns = 10;
  MsRange turn_dur_ms{1500, 4000};
  MsRange gap_dur_ms{800, 2000};
  MsRange word_dur_ms{200, 600};
  IntRange subwords_per_word{1, 3};
  // Intra-turn pauses between words, shorter than the usual trailing-silence
  // thresholds.
  MsRange pause_dur_ms{40, 160};
  double pause_prob = 0.2;
  EmissionDelay emission_delay;
  double feature_separability = 2.51;
  int feature_dim = 16;
  double teacher_flip_prob = 0.0;
  Millis frame_ms = kDefaultFrameMs;
};

// Throws ConfigError naming the first invalid field.
void CheckSimConfig(const SimConfig& cfg);

CallRecord GenerateCall(const SimConfig& cfg);

// Seed for call `index` of a batch generated from `base_seed`.
std::uint64_t CallSeed(std::uint64_t base_seed, std::uint64_t index);

// Replaces every frame's features with fresh draws at `separability`, keyed
// by the true labels. Throws DataError on unlabeled frames.
void ResampleFeatures(CallRecord& call, double separability, int feature_dim,
                      std::uint64_t seed);

// Perfect VAD: is_speech = ground-truth label, posterior 0 or 1.
std::vector<VadDecision> OracleVad(const CallRecord& call);

// Flips each decision independently with probability target_eer, so both
// error rates are target_eer in expectation. target_eer must be in [0, 0.5).
std::vector<VadDecision> CorruptVad(std::span<const VadDecision> decisions,
                                    double target_eer, std::uint64_t seed);

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_SIMULATOR_H_
