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

#include "endpoint_rt/evaluator.h"

#include <algorithm>
#include <limits>
#include <set>

#include "endpoint_rt/error.h"

namespace endpoint_rt {

void CheckEvalConfig(const EvalConfig& cfg) {
  if (cfg.tolerance_ms <= 0) throw ConfigError("tolerance_ms", "must be positive");
  if (cfg.ts_threshold_ms <= 0)
    throw ConfigError("ts_threshold_ms", "must be positive");
}

Matching AlignEvents(std::span<const Millis> ref_ends,
                     std::span<const Millis> hyp_times, const EvalConfig& cfg) {
  Matching m;
  std::vector<bool> used(hyp_times.size(), false);
  std::size_t first_free = 0;  // hyps before this are used or too early
  for (std::size_t r = 0; r < ref_ends.size(); ++r) {
    const Millis lo = ref_ends[r] - cfg.tolerance_ms;
    const Millis hi = ref_ends[r] + cfg.ts_threshold_ms + cfg.tolerance_ms;
    while (first_free < hyp_times.size() &&
           (used[first_free] || hyp_times[first_free] < lo))
      ++first_free;
    std::size_t h = first_free;
    while (h < hyp_times.size() && used[h]) ++h;
    if (h < hyp_times.size() && hyp_times[h] <= hi) {
      used[h] = true;
      m.pairs.push_back({r, h, hyp_times[h] - ref_ends[r]});
    } else {
      m.unmatched_refs.push_back(r);
    }
  }
  for (std::size_t h = 0; h < hyp_times.size(); ++h)
    if (!used[h]) m.unmatched_hyps.push_back(h);
  return m;
}

Matching AlignEvents(std::span<const Millis> ref_ends,
                     std::span<const EndpointEvent> hyps, const EvalConfig& cfg) {
  std::vector<Millis> times;
  times.reserve(hyps.size());
  for (const EndpointEvent& e : hyps) times.push_back(e.time_ms);
  return AlignEvents(ref_ends, times, cfg);
}

double F1Score(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Prf PrfFromCounts(std::size_t hits, std::size_t false_alarms,
                  std::size_t misses) {
  Prf out;
  const std::size_t n_hyp = hits + false_alarms;
  const std::size_t n_ref = hits + misses;
  out.precision_defined = n_hyp > 0;
  out.recall_defined = n_ref > 0;
  out.precision = n_hyp ? static_cast<double>(hits) / n_hyp : 0.0;
  out.recall = n_ref ? static_cast<double>(hits) / n_ref : 0.0;
  out.f1 = F1Score(out.precision, out.recall);
  return out;
}

Prf PrecisionRecallF1(const Matching& m) {
  return PrfFromCounts(m.pairs.size(), m.unmatched_hyps.size(),
                       m.unmatched_refs.size());
}

WerResult ComputeWer(std::span<const std::string> ref,
                     std::span<const std::string> hyp) {
  const std::size_t m = ref.size(), n = hyp.size();
  // cost[i][j]: edit distance between ref[0..i) and hyp[0..j)
  std::vector<std::size_t> cost((m + 1) * (n + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return cost[i * (n + 1) + j];
  };
  for (std::size_t i = 0; i <= m; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= n; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  WerResult res;
  res.ref_words = m;
  std::size_t i = m, j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        if (!same) ++res.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++res.deletions;
      --i;
    } else {
      ++res.insertions;
      --j;
    }
  }

  if (m == 0) {
    res.defined = n == 0;
    res.wer = n == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    res.wer = static_cast<double>(res.errors()) / static_cast<double>(m);
  }
  return res;
}

LatencyStats ComputeLatencyStats(std::span<const Millis> latencies) {
  LatencyStats s;
  if (latencies.empty()) return s;
  s.defined = true;
  double sum = 0.0;
  for (Millis l : latencies) sum += static_cast<double>(l);
  s.mean_ms = sum / static_cast<double>(latencies.size());
  std::vector<Millis> sorted(latencies.begin(), latencies.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median_ms = sorted.size() % 2
                    ? static_cast<double>(sorted[mid])
                    : 0.5 * static_cast<double>(sorted[mid - 1] + sorted[mid]);
  return s;
}

LatencyStats ComputeLatencyStats(const Matching& matching) {
  std::vector<Millis> lat;
  lat.reserve(matching.pairs.size());
  for (const MatchedPair& p : matching.pairs) lat.push_back(p.latency_ms);
  return ComputeLatencyStats(lat);
}

CallEval EvaluateCall(const CallRecord& call,
                      std::span<const EndpointEvent> endpoints,
                      std::span<const TurnTranscript> turns,
                      const EvalConfig& cfg) {
  CheckEvalConfig(cfg);
  std::vector<Millis> ref_ends;
  std::vector<std::string> ref_words;
  for (const ReferenceSegment& s : call.segments) {
    ref_ends.push_back(s.end_ms);
    ref_words.insert(ref_words.end(), s.words.begin(), s.words.end());
  }
  const Matching m = AlignEvents(ref_ends, endpoints, cfg);
  const std::vector<std::string> hyp = HypothesisWords(turns);
  const WerResult w = ComputeWer(ref_words, hyp);

  CallEval e;
  e.call_id = call.call_id;
  e.hits = m.pairs.size();
  e.false_alarms = m.unmatched_hyps.size();
  e.misses = m.unmatched_refs.size();
  e.substitutions = w.substitutions;
  e.deletions = w.deletions;
  e.insertions = w.insertions;
  e.ref_words = w.ref_words;
  for (const MatchedPair& p : m.pairs) e.latencies.push_back(p.latency_ms);
  e.deferral_timeouts = static_cast<std::size_t>(std::count_if(
      endpoints.begin(), endpoints.end(), [](const EndpointEvent& ev) {
        return ev.trigger == EndpointTrigger::kDeferralTimeout;
      }));
  return e;
}

EvalReport PoolCalls(std::span<const CallEval> calls) {
  EvalReport r;
  std::vector<Millis> latencies;
  for (const CallEval& c : calls) {
    r.hits += c.hits;
    r.false_alarms += c.false_alarms;
    r.misses += c.misses;
    r.substitutions += c.substitutions;
    r.deletions += c.deletions;
    r.insertions += c.insertions;
    r.ref_words += c.ref_words;
    r.deferral_timeouts += c.deferral_timeouts;
    latencies.insert(latencies.end(), c.latencies.begin(), c.latencies.end());
  }
  const Prf prf = PrfFromCounts(r.hits, r.false_alarms, r.misses);
  r.precision = prf.precision;
  r.recall = prf.recall;
  r.f1 = prf.f1;
  const std::size_t errors = r.substitutions + r.deletions + r.insertions;
  if (r.ref_words > 0) {
    r.wer = static_cast<double>(errors) / static_cast<double>(r.ref_words);
  } else {
    r.wer_defined = errors == 0;
    r.wer = errors == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  const LatencyStats lat = ComputeLatencyStats(latencies);
  r.latency_defined = lat.defined;
  r.mean_latency_ms = lat.mean_ms;
  r.median_latency_ms = lat.median_ms;
  return r;
}

std::vector<TradeoffRow> Tradeoff(
    std::span<const std::pair<Millis, EvalReport>> reports) {
  std::set<Millis> seen;
  std::vector<TradeoffRow> rows;
  for (const auto& [delta, report] : reports) {
    if (!seen.insert(delta).second)
      throw DataError("duplicate delta " + std::to_string(delta) +
                      " in trade-off input");
    rows.push_back({delta, report.mean_latency_ms, report.wer, report.f1});
  }
  if (rows.size() < 2)
    throw DataError("trade-off needs at least two distinct delta values");
  std::sort(rows.begin(), rows.end(),
            [](const TradeoffRow& a, const TradeoffRow& b) {
              return a.delta_ms < b.delta_ms;
            });
  return rows;
}

}  // namespace endpoint_rt
