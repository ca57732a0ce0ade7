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

#include "endpoint_rt/simulator.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string_view>

#include "endpoint_rt/error.h"

namespace endpoint_rt {

namespace {

constexpr std::array<std::string_view, 20> kSyllables = {
    "ba", "de", "ki", "lo", "mu", "na", "po", "re", "si", "tu",
    "va", "we", "xo", "ya", "zu", "ga", "hi", "jo", "ke", "fa"};

// Stream tags for the independent generators derived from one seed.
enum Stream : std::uint64_t {
  kStructure = 0,
  kDelay = 1,
  kFeatures = 2,
  kTeacher = 3,
};

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::mt19937_64 MakeRng(std::uint64_t seed, Stream stream) {
  return std::mt19937_64(SplitMix64(seed ^ SplitMix64(stream + 1)));
}

void CheckRange(const MsRange& r, const char* field, bool allow_zero) {
  if (r.min > r.max)
    throw ConfigError(field, "min (" + std::to_string(r.min) + ") > max (" +
                                 std::to_string(r.max) + ")");
  if (r.min < 0 || (!allow_zero && r.min == 0))
    throw ConfigError(field, allow_zero ? "must be non-negative" : "must be positive");
}

// Uniform draw in [min, max] rounded to whole frames, at least one frame.
Millis DrawFrames(std::mt19937_64& rng, const MsRange& r, Millis frame_ms) {
  std::uniform_int_distribution<Millis> dist(r.min, r.max);
  Millis v = dist(rng);
  Millis frames = std::max<Millis>(1, (v + frame_ms / 2) / frame_ms);
  return frames * frame_ms;
}

struct PlannedToken {
  Millis ideal_ms;
  TokenKind kind;
  std::string text;
  std::int64_t word_index;
};

void FillFeatures(std::vector<double>& out, FrameLabel label, int dim,
                  double separability, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  const double offset = 0.5 * separability / std::sqrt(static_cast<double>(dim));
  const double mean = label == FrameLabel::kSpeech ? offset : -offset;
  out.resize(static_cast<std::size_t>(dim));
  for (double& v : out) v = mean + noise(rng);
}

}  // namespace

void CheckSimConfig(const SimConfig& cfg) {
  if (cfg.frame_ms <= 0) throw ConfigError("frame_ms", "must be positive");
  if (cfg.n_turns <= 0) throw ConfigError("n_turns", "must be positive");
  if (cfg.call_id.empty() ||
      cfg.call_id.find_first_of(" \t\r\n") != std::string::npos)
    throw ConfigError("call_id", "must be non-empty without whitespace");
  CheckRange(cfg.turn_dur_ms, "turn_dur_ms", false);
  CheckRange(cfg.gap_dur_ms, "gap_dur_ms", false);
  CheckRange(cfg.word_dur_ms, "word_dur_ms", false);
  CheckRange(cfg.pause_dur_ms, "pause_dur_ms", false);
  if (cfg.subwords_per_word.min < 1)
    throw ConfigError("subwords_per_word", "min must be at least 1");
  if (cfg.subwords_per_word.min > cfg.subwords_per_word.max)
    throw ConfigError("subwords_per_word", "min > max");
  if (!(cfg.pause_prob >= 0.0 && cfg.pause_prob <= 1.0))
    throw ConfigError("pause_prob", "must be in [0, 1]");
  const EmissionDelay& d = cfg.emission_delay;
  if (!(d.mean_ms >= 0.0) || !(d.std_ms >= 0.0) || !(d.clip_max_ms >= 0.0))
    throw ConfigError("emission_delay", "mean, std and clip_max must be >= 0");
  if (!(cfg.feature_separability >= 0.0) ||
      !std::isfinite(cfg.feature_separability))
    throw ConfigError("feature_separability", "must be a non-negative number");
  if (cfg.feature_dim <= 0) throw ConfigError("feature_dim", "must be positive");
  if (!(cfg.teacher_flip_prob >= 0.0 && cfg.teacher_flip_prob < 1.0))
    throw ConfigError("teacher_flip_prob", "must be in [0, 1)");
}

std::uint64_t CallSeed(std::uint64_t base_seed, std::uint64_t index) {
  return SplitMix64(base_seed + SplitMix64(index));
}

CallRecord GenerateCall(const SimConfig& cfg) {
  CheckSimConfig(cfg);
  const Millis F = cfg.frame_ms;
  std::mt19937_64 rng = MakeRng(cfg.seed, kStructure);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> n_sub(cfg.subwords_per_word.min,
                                           cfg.subwords_per_word.max);
  std::uniform_int_distribution<std::size_t> syllable(0, kSyllables.size() - 1);

  CallRecord call;
  call.call_id = cfg.call_id;
  call.frame_ms = F;

  // Speech intervals (words) and the planned non-blank tokens.
  std::vector<std::pair<Millis, Millis>> speech;
  std::vector<PlannedToken> planned;
  std::int64_t word_index = 0;
  Millis t = 0;
  for (int turn = 0; turn < cfg.n_turns; ++turn) {
    ReferenceSegment seg;
    seg.call_id = cfg.call_id;
    seg.start_ms = t;
    const Millis target = DrawFrames(rng, cfg.turn_dur_ms, F);
    while (true) {
      const Millis dur = DrawFrames(rng, cfg.word_dur_ms, F);
      const int k = std::min<int>(n_sub(rng), static_cast<int>(dur));
      // k - 1 distinct interior cut points.
      std::vector<Millis> cuts;
      if (k > 1) {
        std::uniform_int_distribution<Millis> cut(1, dur - 1);
        while (static_cast<int>(cuts.size()) < k - 1) {
          Millis c = cut(rng);
          if (std::find(cuts.begin(), cuts.end(), c) == cuts.end())
            cuts.push_back(c);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      cuts.push_back(dur);

      std::string word;
      for (Millis c : cuts) {
        std::string piece(kSyllables[syllable(rng)]);
        word += piece;
        planned.push_back({t + c, TokenKind::kSubword, piece, word_index});
      }
      planned.push_back({t + dur, TokenKind::kEow, "", word_index});
      seg.words.push_back(word);
      speech.emplace_back(t, t + dur);
      t += dur;
      ++word_index;
      if (t - seg.start_ms >= target) break;
      if (unit(rng) < cfg.pause_prob) t += DrawFrames(rng, cfg.pause_dur_ms, F);
    }
    seg.end_ms = t;
    call.segments.push_back(std::move(seg));
    t += DrawFrames(rng, cfg.gap_dur_ms, F);
  }

  // Emission delays, then the monotone repair.
  std::mt19937_64 delay_rng = MakeRng(cfg.seed, kDelay);
  std::normal_distribution<double> delay(
      cfg.emission_delay.mean_ms,
      cfg.emission_delay.std_ms > 0.0 ? cfg.emission_delay.std_ms : 1.0);
  std::vector<TokenEvent> nonblank;
  nonblank.reserve(planned.size());
  Millis last = 0;
  for (PlannedToken& p : planned) {
    double d = cfg.emission_delay.std_ms > 0.0 ? delay(delay_rng)
                                               : cfg.emission_delay.mean_ms;
    d = std::clamp(d, 0.0, cfg.emission_delay.clip_max_ms);
    last = std::max(last, p.ideal_ms + static_cast<Millis>(std::llround(d)));
    nonblank.push_back({last, p.kind, std::move(p.text), p.word_index});
  }

  Millis end = std::max(t, last + 1);
  const Millis n_frames = (end + F - 1) / F;

  // Frame labels from the word intervals.
  std::vector<FrameLabel> labels(static_cast<std::size_t>(n_frames),
                                 FrameLabel::kNonSpeech);
  for (auto [a, b] : speech)
    for (Millis f = a / F; f < b / F; ++f)
      labels[static_cast<std::size_t>(f)] = FrameLabel::kSpeech;

  std::mt19937_64 feat_rng = MakeRng(cfg.seed, kFeatures);
  std::mt19937_64 teacher_rng = MakeRng(cfg.seed, kTeacher);
  call.frames.reserve(labels.size());
  for (Millis f = 0; f < n_frames; ++f) {
    FrameRecord rec;
    rec.index = f;
    rec.time_ms = f * F;
    rec.label = labels[static_cast<std::size_t>(f)];
    FillFeatures(rec.features, *rec.label, cfg.feature_dim,
                 cfg.feature_separability, feat_rng);
    FrameLabel teacher = *rec.label;
    if (unit(teacher_rng) < cfg.teacher_flip_prob)
      teacher = teacher == FrameLabel::kSpeech ? FrameLabel::kNonSpeech
                                               : FrameLabel::kSpeech;
    rec.teacher_label = teacher;
    call.frames.push_back(std::move(rec));
  }

  // Interleave one BLANK per frame that has no non-blank emission.
  call.tokens.reserve(nonblank.size() + labels.size());
  std::size_t nb = 0;
  for (Millis f = 0; f < n_frames; ++f) {
    const Millis lo = f * F, hi = lo + F;
    if (nb < nonblank.size() && nonblank[nb].emit_time_ms < hi) {
      while (nb < nonblank.size() && nonblank[nb].emit_time_ms < hi)
        call.tokens.push_back(std::move(nonblank[nb++]));
    } else {
      call.tokens.push_back({lo, TokenKind::kBlank, "", std::nullopt});
    }
  }
  return call;
}

void ResampleFeatures(CallRecord& call, double separability, int feature_dim,
                      std::uint64_t seed) {
  if (feature_dim <= 0) throw ConfigError("feature_dim", "must be positive");
  std::mt19937_64 rng = MakeRng(seed, kFeatures);
  for (std::size_t i = 0; i < call.frames.size(); ++i) {
    FrameRecord& f = call.frames[i];
    if (!f.label) throw DataError("frame " + std::to_string(i) + " has no label");
    FillFeatures(f.features, *f.label, feature_dim, separability, rng);
  }
}

std::vector<VadDecision> OracleVad(const CallRecord& call) {
  std::vector<VadDecision> out;
  out.reserve(call.frames.size());
  for (std::size_t i = 0; i < call.frames.size(); ++i) {
    const FrameRecord& f = call.frames[i];
    if (!f.label) throw DataError("frame " + std::to_string(i) + " has no label");
    const bool speech = *f.label == FrameLabel::kSpeech;
    out.push_back({f.index, f.time_ms, speech ? 1.0 : 0.0, speech});
  }
  return out;
}

std::vector<VadDecision> CorruptVad(std::span<const VadDecision> decisions,
                                    double target_eer, std::uint64_t seed) {
  if (!(target_eer >= 0.0 && target_eer < 0.5))
    throw ConfigError("target_eer", "must be in [0, 0.5)");
  std::mt19937_64 rng(SplitMix64(seed));
  std::bernoulli_distribution flip(target_eer);
  std::vector<VadDecision> out(decisions.begin(), decisions.end());
  for (VadDecision& d : out) {
    if (!flip(rng)) continue;
    d.is_speech = !d.is_speech;
    d.posterior = d.is_speech ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace endpoint_rt
