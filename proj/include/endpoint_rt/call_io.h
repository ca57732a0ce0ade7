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

// Line-oriented text formats. Every file opens with a header line of
// space-separated key=value fields, the first being format=1. Fields within
// a record are separated by single spaces. Free text (token text, words,
// call ids) is percent-encoded: bytes outside '!'..'~' and the characters
// '%', ':' and '=' become %XX, and the empty string is written as a lone '%'.
// Reals use the shortest representation that parses back to the same double.
//
// Call file (<call_id>.call):
//   format=1 kind=call call_id=<id> frame_ms=<ms> feature_dim=<d>
//       frames=<n> tokens=<n> segments=<n>
//   F <index> <label> <teacher_label> <x_1> ... <x_d>     label: S | N | -
//   T <emit_time_ms> <BLANK|SUBWORD|EOW> <text> <word_index|->
//   S <start_ms> <end_ms> <word> ...
//
// Endpoint file (<call_id>.endpoints):
//   format=1 kind=endpoints call_id=<id> mode=<mode> delta_ms=<ms>
//       blank_frames=<n> deferral_cap_ms=<ms> eow_min_silence_ms=<ms>
//       frame_ms=<ms> stream_end_ms=<ms> count=<n>
//   E <time_ms> <trigger> <silence_start_ms> <deferred_by_ms>
//
// Transcript file (<call_id>.transcript):
//   format=1 kind=transcript call_id=<id> turns=<n>
//   U <turn_index> <start_ms> <end_ms> <n_words> <word>:<closed 0|1> ...
//
// Report CSV: a "# format=1" line, then the header
//   mode,delta_ms,tolerance_ms,precision,recall,f1,wer,S,D,I,
//   mean_latency_ms,median_latency_ms,deferral_timeouts
// and one row per (mode, delta).

#ifndef ENDPOINT_RT_CALL_IO_H_
#define ENDPOINT_RT_CALL_IO_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "endpoint_rt/endpointer.h"
#include "endpoint_rt/evaluator.h"
#include "endpoint_rt/simulator.h"
#include "endpoint_rt/stream.h"

namespace endpoint_rt {

inline constexpr int kFormatVersion = 1;

std::string EncodeText(std::string_view text);
// Throws FormatError on a malformed escape.
std::string DecodeText(std::string_view encoded);

// Shortest round-trip decimal form.
std::string FormatDouble(double v);

std::string SerializeCall(const CallRecord& call);
CallRecord ParseCall(std::string_view text);

struct EndpointFile {
  std::string call_id;
  EndpointerConfig config;
  Millis stream_end_ms = 0;
  std::vector<EndpointEvent> endpoints;
  bool operator==(const EndpointFile&) const = default;
};

std::string SerializeEndpoints(const EndpointFile& file);
EndpointFile ParseEndpoints(std::string_view text);

struct TranscriptFile {
  std::string call_id;
  std::vector<TurnTranscript> turns;
  bool operator==(const TranscriptFile&) const = default;
};

std::string SerializeTranscript(const TranscriptFile& file);
TranscriptFile ParseTranscript(std::string_view text);

struct ReportRow {
  EndpointMode mode = EndpointMode::kTs;
  Millis delta_ms = 0;
  Millis tolerance_ms = 0;
  EvalReport report;
};

std::string ReportCsvHeader();
std::string SerializeReportCsv(std::span<const ReportRow> rows);
// Restores the CSV columns; fields outside the CSV are left at defaults.
std::vector<ReportRow> ParseReportCsv(std::string_view text);

// JSON simulator config. Every key is optional and overrides the default;
// ranges are [min, max] arrays and emission_delay is an object with mean_ms,
// std_ms and clip_max_ms. Throws ConfigError naming the field on a bad key,
// type or value.
SimConfig ParseSimConfig(std::string_view json_text);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

std::filesystem::path CallPath(const std::filesystem::path& dir,
                               std::string_view call_id);
std::filesystem::path EndpointsPath(const std::filesystem::path& dir,
                                    std::string_view call_id);
std::filesystem::path TranscriptPath(const std::filesystem::path& dir,
                                     std::string_view call_id);

// Every *.call file under `dir`, sorted by call id.
std::vector<CallRecord> ReadCallDir(const std::filesystem::path& dir);

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_CALL_IO_H_
