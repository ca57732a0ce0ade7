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

#include "endpoint_rt/det.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "endpoint_rt/error.h"

namespace endpoint_rt {

DetCurve ComputeDetCurve(std::span<const double> posteriors,
                         std::span<const FrameLabel> labels) {
  if (posteriors.size() != labels.size())
    throw DataError("posteriors and labels differ in length");
  std::vector<std::size_t> order(posteriors.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return posteriors[a] < posteriors[b];
  });
  const auto n_speech = static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), FrameLabel::kSpeech));
  const std::size_t n_non = labels.size() - n_speech;
  if (n_speech == 0 || n_non == 0)
    throw DataError("DET needs both speech and nonspeech frames");
  for (double p : posteriors)
    if (std::isnan(p)) throw DataError("posterior is NaN");

  const double ns = static_cast<double>(n_speech);
  const double nn = static_cast<double>(n_non);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  DetCurve curve;
  const double lo = posteriors[order.front()];
  const double hi = posteriors[order.back()];
  curve.points.push_back({std::nextafter(lo, -kInf), 1.0, 0.0});

  // Walk distinct scores upward; `below_*` count frames strictly below the
  // current threshold.
  std::size_t below_speech = 0, below_non = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = posteriors[order[i]];
    curve.points.push_back({s, (nn - static_cast<double>(below_non)) / nn,
                            static_cast<double>(below_speech) / ns});
    for (; i < order.size() && posteriors[order[i]] == s; ++i) {
      if (labels[order[i]] == FrameLabel::kSpeech)
        ++below_speech;
      else
        ++below_non;
    }
  }
  curve.points.push_back({std::nextafter(hi, kInf), 0.0, 1.0});
  return curve;
}

OperatingPoint EqualErrorRate(const DetCurve& curve) {
  const auto& pts = curve.points;
  if (pts.empty()) throw DataError("empty DET curve");
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i].threshold > pts[i - 1].threshold) ||
        pts[i].fpr > pts[i - 1].fpr || pts[i].fnr < pts[i - 1].fnr)
      throw DataError("DET curve is not monotone in threshold");
  }

  auto at = [](const DetPoint& p) {
    return OperatingPoint{p.threshold, 0.5 * (p.fpr + p.fnr), p.fpr, p.fnr};
  };

  std::size_t best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = pts[i].fpr - pts[i].fnr;
    if (d == 0.0) return at(pts[i]);
    if (i + 1 < pts.size()) {
      const double next = pts[i + 1].fpr - pts[i + 1].fnr;
      if (d > 0.0 && next < 0.0) {
        const double t = d / (d - next);
        const DetPoint& a = pts[i];
        const DetPoint& b = pts[i + 1];
        const double fpr = a.fpr + t * (b.fpr - a.fpr);
        const double fnr = a.fnr + t * (b.fnr - a.fnr);
        return {a.threshold + t * (b.threshold - a.threshold),
                0.5 * (fpr + fnr), fpr, fnr};
      }
    }
    if (std::abs(d) < std::abs(pts[best].fpr - pts[best].fnr)) best = i;
  }
  return at(pts[best]);
}

}  // namespace endpoint_rt
