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

#include "commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "endpoint_rt/call_io.h"
#include "endpoint_rt/checkpoint.h"
#include "endpoint_rt/det.h"
#include "endpoint_rt/endpointer.h"
#include "endpoint_rt/error.h"
#include "endpoint_rt/evaluator.h"
#include "endpoint_rt/pipeline.h"
#include "endpoint_rt/simulator.h"
#include "endpoint_rt/vad_net.h"

namespace endpoint_rt {

namespace {

namespace fs = std::filesystem;

struct SimulateArgs {
  std::string config;
  std::string out;
  int n_calls = 1;
  std::optional<std::uint64_t> seed;
  std::optional<Millis> frame_ms;
};

struct FeatureArgs {
  std::string features = "file";  // file | separability:<s>
  std::optional<int> feature_dim;
  std::uint64_t seed = 1;
};

struct TrainArgs {
  std::string calls;
  std::string out;
  std::string labels = "truth";
  FeatureArgs feat;
  std::size_t h1 = 64;
  std::size_t h2 = 64;
  TrainConfig train;
  double holdout = 0.2;
};

struct DetArgs {
  std::string calls;
  std::string model;
  std::string out;
  FeatureArgs feat;
};

struct EndpointArgs {
  std::string calls;
  std::string vad = "oracle";
  std::string mode = "TS";
  Millis delta_ms = 200;
  int blank_frames = 6;
  Millis deferral_cap_ms = 1000;
  Millis eow_min_silence_ms = 0;
  std::optional<Millis> frame_ms;
  std::uint64_t seed = 1;
  std::string out;
};

struct EvaluateArgs {
  std::string calls;
  std::string endpoints;
  Millis tolerance_ms = 200;
  std::optional<Millis> delta_ms;
  std::string out;
  std::string detail;
};

struct TradeoffArgs {
  std::string calls;
  std::string vad = "oracle";
  std::vector<std::string> modes = {"BLANK", "TS", "EOW", "TS_AND_EOW"};
  std::vector<Millis> deltas = {200, 400, 600, 800};
  std::optional<int> blank_frames;
  Millis deferral_cap_ms = 1000;
  Millis eow_min_silence_ms = 0;
  Millis tolerance_ms = 200;
  std::uint64_t seed = 1;
  std::string out;
};

EndpointMode ModeOrThrow(std::string_view name) {
  const auto mode = ParseEndpointMode(name);
  if (!mode)
    throw ConfigError("mode", "unknown mode '" + std::string(name) +
                                  "' (BLANK, TS, EOW, TS_AND_EOW)");
  return *mode;
}

std::vector<CallRecord> LoadCalls(const std::string& dir) {
  std::vector<CallRecord> calls = ReadCallDir(dir);
  if (calls.empty()) throw Error("no .call files in '" + dir + "'");
  for (const CallRecord& c : calls) {
    const std::vector<Violation> v = ValidateCall(c);
    if (!v.empty())
      throw DataError("call '" + c.call_id + "': " + v.front().field + "[" +
                      std::to_string(v.front().index) + "]: " + v.front().message);
  }
  return calls;
}

Millis CommonFrameMs(const std::vector<CallRecord>& calls) {
  const Millis f = calls.front().frame_ms;
  for (const CallRecord& c : calls)
    if (c.frame_ms != f)
      throw DataError("calls mix frame sizes (" + std::to_string(f) + " and " +
                      std::to_string(c.frame_ms) + " ms)");
  return f;
}

void ApplyFeatures(std::vector<CallRecord>& calls, const FeatureArgs& a) {
  if (a.features == "file") return;
  constexpr std::string_view kPrefix = "separability:";
  if (!a.features.starts_with(kPrefix))
    throw ConfigError("features", "expected file or separability:<s>");
  double s = 0.0;
  try {
    std::size_t used = 0;
    s = std::stod(a.features.substr(kPrefix.size()), &used);
    if (used != a.features.size() - kPrefix.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw ConfigError("features", "bad separability in '" + a.features + "'");
  }
  if (!(s >= 0.0) || !std::isfinite(s))
    throw ConfigError("features", "separability must be a non-negative number");
  for (CallRecord& c : calls) {
    const int dim = a.feature_dim.value_or(
        c.feature_dim() > 0 ? static_cast<int>(c.feature_dim()) : 16);
    ResampleFeatures(c, s, dim, CallSeed(a.seed, CallIdHash(c.call_id)));
  }
}

std::vector<FrameRecord> ConcatFrames(const std::vector<CallRecord>& calls,
                                      const std::vector<std::size_t>& which) {
  std::vector<FrameRecord> out;
  for (std::size_t i : which)
    out.insert(out.end(), calls[i].frames.begin(), calls[i].frames.end());
  return out;
}

std::vector<FrameLabel> TruthLabels(const std::vector<FrameRecord>& frames) {
  std::vector<FrameLabel> labels;
  labels.reserve(frames.size());
  for (const FrameRecord& f : frames) {
    if (!f.label) throw DataError("frame " + std::to_string(f.index) + " has no label");
    labels.push_back(*f.label);
  }
  return labels;
}

void Emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    WriteFile(path, text);
  }
}

int CmdSimulate(const SimulateArgs& a, std::ostream& out) {
  SimConfig cfg = a.config.empty() ? SimConfig{} : ParseSimConfig(ReadFile(a.config));
  if (a.seed) cfg.seed = *a.seed;
  if (a.frame_ms) cfg.frame_ms = *a.frame_ms;
  if (a.n_calls <= 0) throw ConfigError("n_calls", "must be positive");
  CheckSimConfig(cfg);
  const std::string prefix = cfg.call_id;
  const int width = std::max<int>(4, static_cast<int>(std::to_string(a.n_calls - 1).size()));
  for (int i = 0; i < a.n_calls; ++i) {
    SimConfig c = cfg;
    std::string index = std::to_string(i);
    c.call_id = prefix + "-" + std::string(width - index.size(), '0') + index;
    c.seed = CallSeed(cfg.seed, static_cast<std::uint64_t>(i));
    const CallRecord call = GenerateCall(c);
    WriteFile(CallPath(a.out, call.call_id), SerializeCall(call));
    spdlog::debug("wrote {} ({} frames, {} tokens)", call.call_id,
                  call.frames.size(), call.tokens.size());
  }
  out << "wrote " << a.n_calls << " calls to " << a.out << "\n";
  return kExitOk;
}

int CmdTrainVad(const TrainArgs& a, std::ostream& out) {
  LabelColumn column;
  if (a.labels == "truth") {
    column = LabelColumn::kTruth;
  } else if (a.labels == "teacher") {
    column = LabelColumn::kTeacher;
  } else {
    throw ConfigError("labels", "expected truth or teacher");
  }
  if (!(a.holdout >= 0.0 && a.holdout < 1.0))
    throw ConfigError("holdout", "must be in [0, 1)");
  if (a.h1 == 0 || a.h2 == 0) throw ConfigError("hidden", "widths must be positive");
  CheckTrainConfig(a.train);

  std::vector<CallRecord> calls = LoadCalls(a.calls);
  ApplyFeatures(calls, a.feat);

  // Held-out split by call, after a seeded shuffle.
  std::vector<std::size_t> order(calls.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(a.train.seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t n_hold = static_cast<std::size_t>(std::llround(a.holdout * calls.size()));
  if (a.holdout > 0.0) n_hold = std::max<std::size_t>(n_hold, 1);
  if (n_hold >= calls.size())
    throw DataError("held-out fraction leaves no training calls");
  std::vector<std::size_t> held(order.begin(), order.begin() + n_hold);
  std::vector<std::size_t> train(order.begin() + n_hold, order.end());
  std::sort(held.begin(), held.end());
  std::sort(train.begin(), train.end());
  if (held.empty()) held = train;  // no split requested: report on training data

  const std::vector<FrameRecord> train_frames = ConcatFrames(calls, train);
  if (train_frames.empty()) throw DataError("no training frames");
  const MlpModel init =
      InitModel(train_frames.front().features.size(), a.h1, a.h2, a.train.seed);
  const TrainResult result = Train(init, train_frames, a.train, column);

  const std::vector<FrameRecord> eval_frames = ConcatFrames(calls, held);
  const std::vector<double> post = Posteriors(result.model, eval_frames);
  const OperatingPoint op = EqualErrorRate(ComputeDetCurve(post, TruthLabels(eval_frames)));

  SaveCheckpoint({result.model, op.threshold}, a.out);
  out << "train_calls=" << train.size() << " heldout_calls=" << n_hold
      << " train_frames=" << train_frames.size()
      << " heldout_frames=" << eval_frames.size() << "\n";
  out << "final_loss=" << FormatDouble(result.loss_history.back()) << "\n";
  out << "eer=" << FormatDouble(op.eer) << " threshold=" << FormatDouble(op.threshold)
      << " fpr=" << FormatDouble(op.fpr) << " fnr=" << FormatDouble(op.fnr) << "\n";
  return kExitOk;
}

int CmdDet(const DetArgs& a, std::ostream& out) {
  std::vector<CallRecord> calls = LoadCalls(a.calls);
  ApplyFeatures(calls, a.feat);
  const Checkpoint ckpt = LoadCheckpoint(a.model);
  std::vector<std::size_t> all(calls.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const std::vector<FrameRecord> frames = ConcatFrames(calls, all);
  const DetCurve curve =
      ComputeDetCurve(Posteriors(ckpt.model, frames), TruthLabels(frames));
  const OperatingPoint op = EqualErrorRate(curve);
  if (!a.out.empty()) {
    std::string csv = "# format=" + std::to_string(kFormatVersion) + "\nthreshold,fpr,fnr\n";
    for (const DetPoint& p : curve.points)
      csv += FormatDouble(p.threshold) + "," + FormatDouble(p.fpr) + "," +
             FormatDouble(p.fnr) + "\n";
    WriteFile(a.out, csv);
  }
  out << "points=" << curve.points.size() << " eer=" << FormatDouble(op.eer)
      << " threshold=" << FormatDouble(op.threshold)
      << " checkpoint_threshold=" << FormatDouble(ckpt.threshold) << "\n";
  return kExitOk;
}

std::unique_ptr<Checkpoint> LoadModelFor(const VadSource& src) {
  if (src.kind != VadSource::Kind::kModel) return nullptr;
  return std::make_unique<Checkpoint>(LoadCheckpoint(src.model_path));
}

int CmdEndpoint(const EndpointArgs& a, std::ostream& out) {
  EndpointerConfig cfg;
  cfg.mode = ModeOrThrow(a.mode);
  cfg.ts_threshold_ms = a.delta_ms;
  cfg.blank_run_frames = a.blank_frames;
  cfg.deferral_cap_ms = a.deferral_cap_ms;
  cfg.eow_min_silence_ms = a.eow_min_silence_ms;
  const VadSource src = ParseVadSource(a.vad);
  std::vector<CallRecord> calls = LoadCalls(a.calls);
  cfg.frame_ms = a.frame_ms.value_or(CommonFrameMs(calls));
  CheckEndpointerConfig(cfg);
  const std::unique_ptr<Checkpoint> model = LoadModelFor(src);

  std::map<EndpointTrigger, std::size_t> by_trigger;
  std::size_t total = 0;
  for (const CallRecord& call : calls) {
    const CallOutcome o = ProcessCall(call, DecideVad(call, src, model.get(), a.seed),
                                      cfg, EvalConfig{200, cfg.ts_threshold_ms});
    WriteFile(EndpointsPath(a.out, call.call_id),
              SerializeEndpoints({call.call_id, cfg, call.stream_end_ms(), o.endpoints}));
    WriteFile(TranscriptPath(a.out, call.call_id),
              SerializeTranscript({call.call_id, o.turns}));
    for (const EndpointEvent& e : o.endpoints) ++by_trigger[e.trigger];
    total += o.endpoints.size();
  }
  out << "calls=" << calls.size() << " endpoints=" << total;
  for (const auto& [trigger, n] : by_trigger)
    out << " " << EndpointTriggerName(trigger) << "=" << n;
  out << "\n";
  return kExitOk;
}

int CmdEvaluate(const EvaluateArgs& a, std::ostream& out) {
  const std::vector<CallRecord> calls = LoadCalls(a.calls);
  std::optional<EndpointerConfig> seen;
  std::vector<CallEval> evals;
  std::string detail =
      "call_id,hits,false_alarms,misses,S,D,I,ref_words,deferral_timeouts\n";
  for (const CallRecord& call : calls) {
    const fs::path ep_path = EndpointsPath(a.endpoints, call.call_id);
    const fs::path tr_path = TranscriptPath(a.endpoints, call.call_id);
    if (!fs::exists(ep_path) || !fs::exists(tr_path))
      throw Error("missing endpoint or transcript file for call '" + call.call_id + "'");
    const EndpointFile ep = ParseEndpoints(ReadFile(ep_path));
    const TranscriptFile tr = ParseTranscript(ReadFile(tr_path));
    if (ep.call_id != call.call_id || tr.call_id != call.call_id)
      throw DataError("call id mismatch for '" + call.call_id + "'");
    if (seen && (seen->mode != ep.config.mode ||
                 seen->ts_threshold_ms != ep.config.ts_threshold_ms))
      throw DataError("endpoint files mix configurations");
    seen = ep.config;
    EvalConfig ec{a.tolerance_ms, a.delta_ms.value_or(ep.config.ts_threshold_ms)};
    CheckEvalConfig(ec);
    const CallEval e = EvaluateCall(call, ep.endpoints, tr.turns, ec);
    detail += EncodeText(e.call_id) + "," + std::to_string(e.hits) + "," +
              std::to_string(e.false_alarms) + "," + std::to_string(e.misses) + "," +
              std::to_string(e.substitutions) + "," + std::to_string(e.deletions) + "," +
              std::to_string(e.insertions) + "," + std::to_string(e.ref_words) + "," +
              std::to_string(e.deferral_timeouts) + "\n";
    evals.push_back(e);
  }
  const ReportRow row{seen->mode, a.delta_ms.value_or(seen->ts_threshold_ms),
                      a.tolerance_ms, PoolCalls(evals)};
  Emit(a.out, SerializeReportCsv(std::span<const ReportRow>(&row, 1)), out);
  if (!a.detail.empty()) Emit(a.detail, detail, out);
  return kExitOk;
}

int CmdTradeoff(const TradeoffArgs& a, std::ostream& out) {
  std::set<Millis> distinct(a.deltas.begin(), a.deltas.end());
  if (distinct.size() != a.deltas.size())
    throw ConfigError("deltas", "duplicate delta value");
  if (distinct.size() < 2) throw ConfigError("deltas", "needs at least two values");
  std::vector<EndpointMode> modes;
  for (const std::string& m : a.modes) modes.push_back(ModeOrThrow(m));
  const VadSource src = ParseVadSource(a.vad);
  const std::vector<CallRecord> calls = LoadCalls(a.calls);
  const Millis frame_ms = CommonFrameMs(calls);
  const std::unique_ptr<Checkpoint> model = LoadModelFor(src);

  // Validate every configuration before doing any work.
  std::vector<EndpointerConfig> configs;
  for (EndpointMode mode : modes) {
    for (Millis delta : a.deltas) {
      EndpointerConfig cfg;
      cfg.mode = mode;
      cfg.ts_threshold_ms = delta;
      cfg.frame_ms = frame_ms;
      cfg.blank_run_frames =
          a.blank_frames.value_or(static_cast<int>(delta / frame_ms));
      cfg.deferral_cap_ms = a.deferral_cap_ms;
      cfg.eow_min_silence_ms = a.eow_min_silence_ms;
      CheckEndpointerConfig(cfg);
      configs.push_back(cfg);
    }
  }

  std::vector<std::vector<VadDecision>> vad;
  vad.reserve(calls.size());
  for (const CallRecord& call : calls)
    vad.push_back(DecideVad(call, src, model.get(), a.seed));

  std::vector<ReportRow> rows;
  for (const EndpointerConfig& cfg : configs) {
    const EvalConfig ec{a.tolerance_ms, cfg.ts_threshold_ms};
    std::vector<CallEval> evals;
    for (std::size_t i = 0; i < calls.size(); ++i)
      evals.push_back(ProcessCall(calls[i], vad[i], cfg, ec).eval);
    rows.push_back({cfg.mode, cfg.ts_threshold_ms, a.tolerance_ms, PoolCalls(evals)});
    spdlog::info("{} delta={} wer={} f1={}", EndpointModeName(cfg.mode),
                 cfg.ts_threshold_ms, rows.back().report.wer, rows.back().report.f1);
  }
  Emit(a.out, SerializeReportCsv(rows), out);
  return kExitOk;
}

void AddFeatureOptions(CLI::App* cmd, FeatureArgs* f) {
  cmd->add_option("--features", f->features,
                  "Feature source: file or separability:<s>")->capture_default_str();
  cmd->add_option("--feature-dim", f->feature_dim,
                  "Dimension of resampled features (default: the calls')");
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Streaming speech endpointing toolkit", "endpoint_rt"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Generate synthetic calls");
  simulate->add_option("--config", sim.config, "JSON simulator config");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--n-calls", sim.n_calls, "Number of calls")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Base seed (overrides the config)");
  simulate->add_option("--frame-ms", sim.frame_ms, "Frame length in ms");

  TrainArgs tr;
  CLI::App* train = app.add_subcommand("train-vad", "Train the frame VAD network");
  train->add_option("--calls", tr.calls, "Call directory")->required();
  train->add_option("--out", tr.out, "Checkpoint path")->required();
  train->add_option("--labels", tr.labels, "truth or teacher")->capture_default_str();
  AddFeatureOptions(train, &tr.feat);
  train->add_option("--h1", tr.h1, "First hidden width")->capture_default_str();
  train->add_option("--h2", tr.h2, "Second hidden width")->capture_default_str();
  train->add_option("--epochs", tr.train.epochs)->capture_default_str();
  train->add_option("--lr", tr.train.learning_rate)->capture_default_str();
  train->add_option("--batch-size", tr.train.batch_size)->capture_default_str();
  train->add_option("--l2", tr.train.l2)->capture_default_str();
  train->add_option("--seed", tr.train.seed)->capture_default_str();
  train->add_option("--holdout", tr.holdout, "Held-out fraction of calls")
      ->capture_default_str();

  DetArgs det;
  CLI::App* detc = app.add_subcommand("det", "DET curve and EER of a trained VAD");
  detc->add_option("--calls", det.calls, "Call directory")->required();
  detc->add_option("--model", det.model, "Checkpoint path")->required();
  detc->add_option("--out", det.out, "DET curve CSV");
  AddFeatureOptions(detc, &det.feat);
  detc->add_option("--seed", det.feat.seed, "Seed for resampled features")
      ->capture_default_str();

  EndpointArgs ep;
  CLI::App* endpoint = app.add_subcommand("endpoint", "Run the endpointer over calls");
  endpoint->add_option("--calls", ep.calls, "Call directory")->required();
  endpoint->add_option("--vad", ep.vad, "oracle, corrupted:<eer> or model:<path>")
      ->capture_default_str();
  endpoint->add_option("--mode", ep.mode, "BLANK, TS, EOW or TS_AND_EOW")
      ->capture_default_str();
  endpoint->add_option("--delta-ms", ep.delta_ms, "Trailing silence threshold")
      ->capture_default_str();
  endpoint->add_option("--blank-frames", ep.blank_frames, "Blank run length N")
      ->capture_default_str();
  endpoint->add_option("--deferral-cap-ms", ep.deferral_cap_ms, "Deferral cap D")
      ->capture_default_str();
  endpoint->add_option("--eow-min-silence-ms", ep.eow_min_silence_ms,
                       "EOW rule minimum silence (0: half of delta)")
      ->capture_default_str();
  endpoint->add_option("--frame-ms", ep.frame_ms, "Frame length (default: the calls')");
  endpoint->add_option("--seed", ep.seed, "Seed for corrupted VAD")->capture_default_str();
  endpoint->add_option("--out", ep.out, "Output directory")->required();

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score endpoints and transcripts");
  evaluate->add_option("--calls", ev.calls, "Call directory")->required();
  evaluate->add_option("--endpoints", ev.endpoints, "Endpoint directory")->required();
  evaluate->add_option("--tolerance-ms", ev.tolerance_ms)->capture_default_str();
  evaluate->add_option("--delta-ms", ev.delta_ms,
                       "Delta for the matching window (default: from the files)");
  evaluate->add_option("--out", ev.out, "Report CSV (default: stdout)");
  evaluate->add_option("--detail", ev.detail, "Per-call CSV");

  TradeoffArgs to;
  CLI::App* tradeoff = app.add_subcommand("tradeoff", "Sweep modes and deltas");
  tradeoff->add_option("--calls", to.calls, "Call directory")->required();
  tradeoff->add_option("--vad", to.vad)->capture_default_str();
  tradeoff->add_option("--modes", to.modes)->delimiter(',')->capture_default_str();
  tradeoff->add_option("--deltas", to.deltas)->delimiter(',')->capture_default_str();
  tradeoff->add_option("--blank-frames", to.blank_frames,
                       "Blank run length (default: delta / frame)");
  tradeoff->add_option("--deferral-cap-ms", to.deferral_cap_ms)->capture_default_str();
  tradeoff->add_option("--eow-min-silence-ms", to.eow_min_silence_ms)
      ->capture_default_str();
  tradeoff->add_option("--tolerance-ms", to.tolerance_ms)->capture_default_str();
  tradeoff->add_option("--seed", to.seed)->capture_default_str();
  tradeoff->add_option("--out", to.out, "Report CSV (default: stdout)");

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (simulate->parsed()) return CmdSimulate(sim, out);
    if (train->parsed()) return CmdTrainVad(tr, out);
    if (detc->parsed()) return CmdDet(det, out);
    if (endpoint->parsed()) return CmdEndpoint(ep, out);
    if (evaluate->parsed()) return CmdEvaluate(ev, out);
    if (tradeoff->parsed()) return CmdTradeoff(to, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace endpoint_rt
