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

// Scoring for endpoint detection: tolerance-window event alignment,
// precision/recall/F1, call-level WER and endpoint latency.

#ifndef ENDPOINT_RT_EVALUATOR_H_
#define ENDPOINT_RT_EVALUATOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "endpoint_rt/endpointer.h"
#include "endpoint_rt/stream.h"

namespace endpoint_rt {

struct EvalConfig {
  Millis tolerance_ms = 200;
  Millis ts_threshold_ms = 200;  // delta of the system under evaluation
};

void CheckEvalConfig(const EvalConfig& cfg);

struct MatchedPair {
  std::size_t ref_index = 0;
  std::size_t hyp_index = 0;
  Millis latency_ms = 0;  // hyp time - reference end
  bool operator==(const MatchedPair&) const = default;
};

struct Matching {
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> unmatched_refs;
  std::vector<std::size_t> unmatched_hyps;
};

// Hypothesis h can match reference r iff
//   r - tolerance <= h <= r + delta + tolerance.
// References are visited in order; each takes the earliest unmatched
// hypothesis inside its window. Because every window has the same width this
// greedy pass also maximizes the number of hits. Both inputs must be sorted.
Matching AlignEvents(std::span<const Millis> ref_ends,
                     std::span<const Millis> hyp_times, const EvalConfig& cfg);
Matching AlignEvents(std::span<const Millis> ref_ends,
                     std::span<const EndpointEvent> hyps, const EvalConfig& cfg);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_defined = true;  // false when there were no hypotheses
  bool recall_defined = true;     // false when there were no references
};

// 2PR / (P + R), or 0 when P + R == 0. Works on fractions or percentages.
double F1Score(double precision, double recall);

Prf PrfFromCounts(std::size_t hits, std::size_t false_alarms,
                  std::size_t misses);
Prf PrecisionRecallF1(const Matching& matching);

struct WerResult {
  double wer = 0.0;  // +inf when the reference is empty but hyp is not
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_words = 0;
  bool defined = true;

  std::size_t errors() const { return substitutions + deletions + insertions; }
};

// Unit-cost Levenshtein alignment. On the backtrace, ties prefer a
// substitution (or match) over a deletion, and a deletion over an insertion.
WerResult ComputeWer(std::span<const std::string> ref,
                     std::span<const std::string> hyp);

struct LatencyStats {
  double mean_ms = 0.0;
  double median_ms = 0.0;
  bool defined = false;  // false with no matched pairs
};

LatencyStats ComputeLatencyStats(std::span<const Millis> latencies);
LatencyStats ComputeLatencyStats(const Matching& matching);

// Raw counts for one call, kept so that calls can be pooled.
struct CallEval {
  std::string call_id;
  std::size_t hits = 0;
  std::size_t false_alarms = 0;
  std::size_t misses = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_words = 0;
  std::size_t deferral_timeouts = 0;
  std::vector<Millis> latencies;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double wer = 0.0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  double mean_latency_ms = 0.0;
  double median_latency_ms = 0.0;
  std::size_t deferral_timeouts = 0;

  std::size_t hits = 0;
  std::size_t false_alarms = 0;
  std::size_t misses = 0;
  std::size_t ref_words = 0;
  bool latency_defined = false;
  bool wer_defined = true;
};

// Reference events are the segment ends; the reference transcript is the
// segments' words in order; the hypothesis is HypothesisWords(turns).
CallEval EvaluateCall(const CallRecord& call,
                      std::span<const EndpointEvent> endpoints,
                      std::span<const TurnTranscript> turns,
                      const EvalConfig& cfg);

// Micro-average: counts are summed over calls before any ratio is taken.
EvalReport PoolCalls(std::span<const CallEval> calls);

struct TradeoffRow {
  Millis delta_ms = 0;
  double mean_latency_ms = 0.0;
  double wer = 0.0;
  double f1 = 0.0;
};

// Rows sorted by delta. Throws DataError on a duplicate delta or fewer than
// two deltas.
std::vector<TradeoffRow> Tradeoff(
    std::span<const std::pair<Millis, EvalReport>> reports);

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_EVALUATOR_H_
