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

#include "endpoint_rt/vad_net.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "endpoint_rt/error.h"
#include "endpoint_rt/simd/dense_kernels.h"

namespace endpoint_rt {

namespace {

// Keeps the posterior strictly inside (0, 1) once the logistic saturates.
constexpr double kPosteriorFloor = 1e-15;

DenseLayer ZeroLayer(std::size_t in, std::size_t out) {
  DenseLayer layer;
  layer.in = in;
  layer.out = out;
  layer.weights.assign(in * out, 0.0);
  layer.bias.assign(out, 0.0);
  return layer;
}

double Logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z)
double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

// out = W x + b, then optional rectification. Returns nothing; `out` must have
// layer.out entries.
void Affine(const DenseLayer& layer, std::span<const double> x,
            std::span<double> out, bool relu) {
  const auto& k = simd::ActiveKernels();
  for (std::size_t r = 0; r < layer.out; ++r) {
    double v = layer.bias[r] + k.dot(layer.weights.data() + r * layer.in,
                                     x.data(), layer.in);
    out[r] = relu && v < 0.0 ? 0.0 : v;
  }
}

// Activations of one forward pass, kept for backprop.
struct Activations {
  std::vector<double> h1, h2;  // post-ReLU
  double logit = 0.0;

  explicit Activations(const MlpModel& m)
      : h1(m.layers[0].out), h2(m.layers[1].out) {}
};

void RunForward(const MlpModel& m, std::span<const double> x, Activations& a) {
  Affine(m.layers[0], x, a.h1, true);
  Affine(m.layers[1], a.h1, a.h2, true);
  double z = 0.0;
  Affine(m.layers[2], a.h2, std::span<double>(&z, 1), false);
  a.logit = z;
}

void CheckInput(const MlpModel& m, std::span<const double> x) {
  if (x.size() != m.input_dim())
    throw DataError("feature length " + std::to_string(x.size()) +
                    " != model input dim " + std::to_string(m.input_dim()));
}

}  // namespace

MlpModel ZeroModel(std::size_t d_in, std::size_t h1, std::size_t h2) {
  MlpModel m;
  m.layers[0] = ZeroLayer(d_in, h1);
  m.layers[1] = ZeroLayer(h1, h2);
  m.layers[2] = ZeroLayer(h2, 1);
  return m;
}

void CheckModel(const MlpModel& model) {
  const auto& L = model.layers;
  if (L[0].in == 0 || L[0].out == 0 || L[1].out == 0)
    throw DataError("model dims must be positive");
  if (L[1].in != L[0].out || L[2].in != L[1].out || L[2].out != 1)
    throw DataError("model layer dims do not chain to a single output");
  for (const DenseLayer& layer : L) {
    if (layer.weights.size() != layer.in * layer.out ||
        layer.bias.size() != layer.out)
      throw DataError("model parameter array has the wrong size");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
        !std::all_of(layer.bias.begin(), layer.bias.end(), finite))
      throw DataError("model has a non-finite parameter");
  }
}

MlpModel InitModel(std::size_t d_in, std::size_t h1, std::size_t h2,
                   std::uint64_t seed) {
  if (d_in == 0 || h1 == 0 || h2 == 0)
    throw ConfigError("dims", "layer widths must be positive");
  MlpModel m = ZeroModel(d_in, h1, h2);
  std::mt19937_64 rng(seed);
  for (DenseLayer& layer : m.layers) {
    std::normal_distribution<double> dist(
        0.0, std::sqrt(2.0 / static_cast<double>(layer.in)));
    for (double& w : layer.weights) w = dist(rng);
  }
  return m;
}

double ForwardLogit(const MlpModel& model, std::span<const double> features) {
  CheckInput(model, features);
  Activations a(model);
  RunForward(model, features, a);
  return a.logit;
}

double Forward(const MlpModel& model, std::span<const double> features) {
  double p = Logistic(ForwardLogit(model, features));
  return std::clamp(p, kPosteriorFloor, 1.0 - kPosteriorFloor);
}

TrainingSet MakeTrainingSet(std::span<const FrameRecord> frames,
                            LabelColumn column) {
  TrainingSet set;
  set.dim = frames.empty() ? 0 : frames.front().features.size();
  set.features.reserve(frames.size() * set.dim);
  set.targets.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const FrameRecord& f = frames[i];
    const auto& label =
        column == LabelColumn::kTruth ? f.label : f.teacher_label;
    if (!label)
      throw DataError("frame " + std::to_string(i) + " has no " +
                      (column == LabelColumn::kTruth ? "label" : "teacher label"));
    if (f.features.size() != set.dim)
      throw DataError("frame " + std::to_string(i) +
                      " has a different feature dimension");
    set.features.insert(set.features.end(), f.features.begin(),
                        f.features.end());
    set.targets.push_back(*label == FrameLabel::kSpeech ? 1.0 : 0.0);
  }
  return set;
}

double LossAndGradient(const MlpModel& model, const TrainingSet& data,
                       std::span<const std::size_t> rows, double l2,
                       MlpModel* grad) {
  if (data.dim != model.input_dim())
    throw DataError("training set dim does not match model input dim");
  const auto& k = simd::ActiveKernels();
  const auto& L = model.layers;
  const std::size_t h1 = L[0].out, h2 = L[1].out;

  if (grad) *grad = ZeroModel(L[0].in, h1, h2);
  Activations a(model);
  std::vector<double> d2(h2), d1(h1);
  const double scale = rows.empty() ? 0.0 : 1.0 / static_cast<double>(rows.size());

  double loss = 0.0;
  for (std::size_t r : rows) {
    auto x = data.row(r);
    const double y = data.targets[r];
    RunForward(model, x, a);
    loss += Softplus(a.logit) - y * a.logit;
    if (!grad) continue;

    auto& G = grad->layers;
    const double dz = (Logistic(a.logit) - y) * scale;
    k.axpy(dz, a.h2.data(), G[2].weights.data(), h2);
    G[2].bias[0] += dz;

    // Back through layer 2: d2 = dz * w3, masked by ReLU.
    for (std::size_t j = 0; j < h2; ++j)
      d2[j] = a.h2[j] > 0.0 ? dz * L[2].weights[j] : 0.0;

    std::fill(d1.begin(), d1.end(), 0.0);
    for (std::size_t j = 0; j < h2; ++j) {
      if (d2[j] == 0.0) continue;
      k.axpy(d2[j], a.h1.data(), G[1].weights.data() + j * h1, h1);
      G[1].bias[j] += d2[j];
      k.axpy(d2[j], L[1].weights.data() + j * h1, d1.data(), h1);
    }

    for (std::size_t j = 0; j < h1; ++j) {
      if (a.h1[j] <= 0.0 || d1[j] == 0.0) continue;
      k.axpy(d1[j], x.data(), G[0].weights.data() + j * L[0].in, L[0].in);
      G[0].bias[j] += d1[j];
    }
  }
  loss *= scale;

  if (l2 > 0.0) {
    double sq = 0.0;
    for (std::size_t l = 0; l < L.size(); ++l) {
      const auto& w = L[l].weights;
      sq += k.dot(w.data(), w.data(), w.size());
      if (grad) k.axpy(l2, w.data(), grad->layers[l].weights.data(), w.size());
    }
    loss += 0.5 * l2 * sq;
  }
  return loss;
}

void CheckTrainConfig(const TrainConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate))
    throw ConfigError("learning_rate", "must be a non-negative finite number");
  if (cfg.epochs <= 0) throw ConfigError("epochs", "must be positive");
  if (cfg.batch_size <= 0) throw ConfigError("batch_size", "must be positive");
  if (!(cfg.l2 >= 0.0)) throw ConfigError("l2", "must be non-negative");
}

TrainResult Train(MlpModel model, const TrainingSet& data,
                  const TrainConfig& cfg) {
  CheckTrainConfig(cfg);
  CheckModel(model);
  if (data.dim != model.input_dim())
    throw DataError("training set dim does not match model input dim");
  const auto speech = std::count(data.targets.begin(), data.targets.end(), 1.0);
  if (speech == 0 || speech == static_cast<long>(data.size()))
    throw DataError("training data must contain both speech and nonspeech");

  const auto& k = simd::ActiveKernels();
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  TrainResult result;
  MlpModel grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double weighted = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += batch) {
      std::size_t n = std::min(batch, order.size() - begin);
      std::span<const std::size_t> rows(order.data() + begin, n);
      weighted += LossAndGradient(model, data, rows, cfg.l2, &grad) *
                  static_cast<double>(n);
      if (cfg.learning_rate == 0.0) continue;
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& p = model.layers[l];
        const auto& g = grad.layers[l];
        k.axpy(-cfg.learning_rate, g.weights.data(), p.weights.data(),
               p.weights.size());
        k.axpy(-cfg.learning_rate, g.bias.data(), p.bias.data(), p.bias.size());
      }
    }
    result.loss_history.push_back(weighted / static_cast<double>(data.size()));
  }
  result.model = std::move(model);
  return result;
}

TrainResult Train(MlpModel model, std::span<const FrameRecord> frames,
                  const TrainConfig& cfg, LabelColumn column) {
  return Train(std::move(model), MakeTrainingSet(frames, column), cfg);
}

std::vector<double> Posteriors(const MlpModel& model,
                               std::span<const FrameRecord> frames) {
  std::vector<double> out;
  out.reserve(frames.size());
  for (const FrameRecord& f : frames) out.push_back(Forward(model, f.features));
  return out;
}

std::vector<VadDecision> ClassifyFrames(const MlpModel& model,
                                        std::span<const FrameRecord> frames,
                                        double threshold) {
  std::vector<VadDecision> out;
  out.reserve(frames.size());
  for (const FrameRecord& f : frames) {
    double p = Forward(model, f.features);
    out.push_back({f.index, f.time_ms, p, p >= threshold});
  }
  return out;
}

}  // namespace endpoint_rt
