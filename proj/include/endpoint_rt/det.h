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

#ifndef ENDPOINT_RT_DET_H_
#define ENDPOINT_RT_DET_H_

#include <span>
#include <vector>

#include "endpoint_rt/stream.h"

namespace endpoint_rt {

// A frame is called speech when posterior >= threshold.
//   fpr: fraction of nonspeech frames called speech
//   fnr: fraction of speech frames called nonspeech
struct DetPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
};

struct DetCurve {
  std::vector<DetPoint> points;  // ascending threshold
};

struct OperatingPoint {
  double threshold = 0.0;
  double eer = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
};

// One point per distinct score, plus a sentinel just below the lowest score
// (everything speech) and one just above the highest (nothing speech).
// Throws DataError on length mismatch or when a class is absent.
DetCurve ComputeDetCurve(std::span<const double> posteriors,
                         std::span<const FrameLabel> labels);

// Point minimizing |fpr - fnr|. Where fpr - fnr changes sign between two
// adjacent points the crossing is linearly interpolated, threshold included.
// eer = (fpr + fnr) / 2 at the returned point.
OperatingPoint EqualErrorRate(const DetCurve& curve);

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_DET_H_
