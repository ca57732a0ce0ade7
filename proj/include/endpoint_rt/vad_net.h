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

// Frame-level speech/nonspeech classifier: a feed-forward network with two
// rectified hidden layers and a logistic output, trained with binary
// cross-entropy by plain mini-batch gradient descent.

#ifndef ENDPOINT_RT_VAD_NET_H_
#define ENDPOINT_RT_VAD_NET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "endpoint_rt/stream.h"

namespace endpoint_rt {

inline constexpr std::size_t kDefaultFeatureDim = 16;
inline constexpr std::size_t kDefaultHiddenDim = 64;

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;     // out

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(weights).subspan(r * in, in);
  }
  std::span<double> row(std::size_t r) {
    return std::span<double>(weights).subspan(r * in, in);
  }
  bool operator==(const DenseLayer&) const = default;
};

struct MlpModel {
  // d_in -> h1 -> h2 -> 1
  std::array<DenseLayer, 3> layers;

  std::size_t input_dim() const { return layers[0].in; }
  std::array<std::size_t, 4> dims() const {
    return {layers[0].in, layers[0].out, layers[1].out, layers[2].out};
  }
  bool operator==(const MlpModel&) const = default;
};

// A zero-valued model with the given shape.
MlpModel ZeroModel(std::size_t d_in, std::size_t h1, std::size_t h2);

// Throws DataError unless the layer dims chain to a single output and every
// parameter is finite.
void CheckModel(const MlpModel& model);

// He-style init: weights ~ N(0, 2 / fan_in), biases zero. Deterministic in
// `seed`.
MlpModel InitModel(std::size_t d_in, std::size_t h1, std::size_t h2,
                   std::uint64_t seed);

// Posterior probability of speech, strictly inside (0, 1).
double Forward(const MlpModel& model, std::span<const double> features);

// Pre-sigmoid output.
double ForwardLogit(const MlpModel& model, std::span<const double> features);

enum class LabelColumn { kTruth, kTeacher };

// Frames flattened into a row-major matrix with 0/1 targets.
struct TrainingSet {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<double> targets;

  std::size_t size() const { return targets.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim, dim);
  }
};

// Throws DataError if any frame lacks the requested label or dims differ.
TrainingSet MakeTrainingSet(std::span<const FrameRecord> frames,
                            LabelColumn column = LabelColumn::kTruth);

// Mean binary cross-entropy over `rows` plus 0.5 * l2 * |W|^2 (weights only).
// If `grad` is non-null it is overwritten with the gradient of that objective.
double LossAndGradient(const MlpModel& model, const TrainingSet& data,
                       std::span<const std::size_t> rows, double l2,
                       MlpModel* grad);

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 20;
  int batch_size = 32;
  std::uint64_t seed = 1;
  double l2 = 0.0;
};

void CheckTrainConfig(const TrainConfig& cfg);

struct TrainResult {
  MlpModel model;
  // One entry per epoch: the objective averaged over that epoch's examples,
  // each batch evaluated before its update.
  std::vector<double> loss_history;
};

// Throws DataError when the data has only one class.
TrainResult Train(MlpModel model, const TrainingSet& data,
                  const TrainConfig& cfg);
TrainResult Train(MlpModel model, std::span<const FrameRecord> frames,
                  const TrainConfig& cfg,
                  LabelColumn column = LabelColumn::kTruth);

std::vector<double> Posteriors(const MlpModel& model,
                               std::span<const FrameRecord> frames);

// One decision per frame, is_speech = posterior >= threshold.
std::vector<VadDecision> ClassifyFrames(const MlpModel& model,
                                        std::span<const FrameRecord> frames,
                                        double threshold);

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_VAD_NET_H_
