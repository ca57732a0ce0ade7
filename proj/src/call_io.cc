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

#include "endpoint_rt/call_io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "endpoint_rt/error.h"
#include "json.hpp"

namespace endpoint_rt {

namespace {

namespace fs = std::filesystem;

constexpr char kHex[] = "0123456789ABCDEF";

bool NeedsEscape(unsigned char c) {
  return c <= 0x20 || c >= 0x7f || c == '%' || c == ':' || c == '=';
}

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::vector<std::string_view> SplitFields(std::string_view line, char sep = ' ') {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

// Walks a text file line by line, dropping a trailing '\r' and empty lines.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool Next(std::string_view* line) {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view l = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++number_;
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      if (l.empty()) continue;
      *line = l;
      return true;
    }
    return false;
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw FormatError("line " + std::to_string(number_) + ": " + what);
  }

  std::size_t number() const { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

template <typename T>
T ParseNumber(const LineReader& in, std::string_view s, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    in.Fail(std::string("bad ") + what + " '" + std::string(s) + "'");
  return v;
}

double ParseReal(const LineReader& in, std::string_view s, const char* what) {
  // from_chars does not accept a leading '+'; neither does the writer emit it.
  return ParseNumber<double>(in, s, what);
}

using Header = std::map<std::string, std::string, std::less<>>;

Header ParseHeader(LineReader& in, std::string_view kind) {
  std::string_view line;
  if (!in.Next(&line)) throw FormatError("empty file");
  Header h;
  for (std::string_view f : SplitFields(line)) {
    const std::size_t eq = f.find('=');
    if (eq == std::string_view::npos || eq == 0)
      in.Fail("header field '" + std::string(f) + "' is not key=value");
    h.emplace(std::string(f.substr(0, eq)), std::string(f.substr(eq + 1)));
  }
  auto format = h.find("format");
  if (format == h.end()) in.Fail("header lacks format=");
  if (format->second != std::to_string(kFormatVersion))
    in.Fail("unsupported format version '" + format->second + "'");
  auto k = h.find("kind");
  if (k == h.end() || k->second != kind)
    in.Fail("expected kind=" + std::string(kind));
  return h;
}

const std::string& Require(const LineReader& in, const Header& h,
                           std::string_view key) {
  auto it = h.find(key);
  if (it == h.end()) in.Fail("header lacks " + std::string(key) + "=");
  return it->second;
}

template <typename T>
T RequireNumber(const LineReader& in, const Header& h, std::string_view key) {
  return ParseNumber<T>(in, Require(in, h, key), std::string(key).c_str());
}

char LabelChar(const std::optional<FrameLabel>& l) {
  if (!l) return '-';
  return *l == FrameLabel::kSpeech ? 'S' : 'N';
}

std::optional<FrameLabel> ParseLabel(const LineReader& in, std::string_view s) {
  if (s == "S") return FrameLabel::kSpeech;
  if (s == "N") return FrameLabel::kNonSpeech;
  if (s == "-") return std::nullopt;
  in.Fail("bad frame label '" + std::string(s) + "'");
}

void CheckCount(const LineReader& in, std::size_t got, std::size_t want,
                const char* what) {
  if (got != want)
    in.Fail(std::string("header promises ") + std::to_string(want) + " " +
            what + ", found " + std::to_string(got));
}

}  // namespace

std::string EncodeText(std::string_view text) {
  if (text.empty()) return "%";
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (NeedsEscape(c)) {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xf];
    } else {
      out += ch;
    }
  }
  return out;
}

std::string DecodeText(std::string_view encoded) {
  if (encoded == "%") return "";
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] != '%') {
      out += encoded[i];
      continue;
    }
    if (i + 2 >= encoded.size())
      throw FormatError("truncated escape in '" + std::string(encoded) + "'");
    const int hi = HexValue(encoded[i + 1]), lo = HexValue(encoded[i + 2]);
    if (hi < 0 || lo < 0)
      throw FormatError("bad escape in '" + std::string(encoded) + "'");
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string SerializeCall(const CallRecord& call) {
  const std::size_t dim = call.feature_dim();
  std::string out;
  out += "format=" + std::to_string(kFormatVersion) +
         " kind=call call_id=" + EncodeText(call.call_id) +
         " frame_ms=" + std::to_string(call.frame_ms) +
         " feature_dim=" + std::to_string(dim) +
         " frames=" + std::to_string(call.frames.size()) +
         " tokens=" + std::to_string(call.tokens.size()) +
         " segments=" + std::to_string(call.segments.size()) + "\n";
  for (const FrameRecord& f : call.frames) {
    if (f.features.size() != dim)
      throw DataError("frame " + std::to_string(f.index) +
                      " has a different feature dimension");
    out += "F " + std::to_string(f.index) + ' ' + LabelChar(f.label) + ' ' +
           LabelChar(f.teacher_label);
    for (double x : f.features) out += ' ' + FormatDouble(x);
    out += '\n';
  }
  for (const TokenEvent& t : call.tokens) {
    out += "T " + std::to_string(t.emit_time_ms) + ' ' +
           std::string(TokenKindName(t.kind)) + ' ' + EncodeText(t.text) + ' ' +
           (t.word_index ? std::to_string(*t.word_index) : "-") + '\n';
  }
  for (const ReferenceSegment& s : call.segments) {
    out += "S " + std::to_string(s.start_ms) + ' ' + std::to_string(s.end_ms);
    for (const std::string& w : s.words) out += ' ' + EncodeText(w);
    out += '\n';
  }
  return out;
}

CallRecord ParseCall(std::string_view text) {
  LineReader in(text);
  const Header h = ParseHeader(in, "call");
  CallRecord call;
  call.call_id = DecodeText(Require(in, h, "call_id"));
  call.frame_ms = RequireNumber<Millis>(in, h, "frame_ms");
  if (call.frame_ms <= 0) in.Fail("frame_ms must be positive");
  const auto dim = RequireNumber<std::size_t>(in, h, "feature_dim");
  const auto n_frames = RequireNumber<std::size_t>(in, h, "frames");
  const auto n_tokens = RequireNumber<std::size_t>(in, h, "tokens");
  const auto n_segments = RequireNumber<std::size_t>(in, h, "segments");

  std::string_view line;
  while (in.Next(&line)) {
    const std::vector<std::string_view> f = SplitFields(line);
    if (f[0] == "F") {
      if (f.size() != 4 + dim)
        in.Fail("frame record needs " + std::to_string(4 + dim) + " fields");
      FrameRecord rec;
      rec.index = ParseNumber<std::int64_t>(in, f[1], "frame index");
      rec.time_ms = rec.index * call.frame_ms;
      rec.label = ParseLabel(in, f[2]);
      rec.teacher_label = ParseLabel(in, f[3]);
      rec.features.reserve(dim);
      for (std::size_t i = 0; i < dim; ++i)
        rec.features.push_back(ParseReal(in, f[4 + i], "feature"));
      call.frames.push_back(std::move(rec));
    } else if (f[0] == "T") {
      if (f.size() != 5) in.Fail("token record needs 5 fields");
      TokenEvent t;
      t.emit_time_ms = ParseNumber<Millis>(in, f[1], "emit time");
      const auto kind = ParseTokenKind(f[2]);
      if (!kind) in.Fail("bad token kind '" + std::string(f[2]) + "'");
      t.kind = *kind;
      t.text = DecodeText(f[3]);
      if (f[4] != "-")
        t.word_index = ParseNumber<std::int64_t>(in, f[4], "word index");
      call.tokens.push_back(std::move(t));
    } else if (f[0] == "S") {
      if (f.size() < 3) in.Fail("segment record needs start and end");
      ReferenceSegment s;
      s.call_id = call.call_id;
      s.start_ms = ParseNumber<Millis>(in, f[1], "segment start");
      s.end_ms = ParseNumber<Millis>(in, f[2], "segment end");
      for (std::size_t i = 3; i < f.size(); ++i) s.words.push_back(DecodeText(f[i]));
      call.segments.push_back(std::move(s));
    } else {
      in.Fail("unknown record type '" + std::string(f[0]) + "'");
    }
  }
  CheckCount(in, call.frames.size(), n_frames, "frames");
  CheckCount(in, call.tokens.size(), n_tokens, "tokens");
  CheckCount(in, call.segments.size(), n_segments, "segments");
  return call;
}

std::string SerializeEndpoints(const EndpointFile& file) {
  const EndpointerConfig& c = file.config;
  std::string out = "format=" + std::to_string(kFormatVersion) +
                    " kind=endpoints call_id=" + EncodeText(file.call_id) +
                    " mode=" + std::string(EndpointModeName(c.mode)) +
                    " delta_ms=" + std::to_string(c.ts_threshold_ms) +
                    " blank_frames=" + std::to_string(c.blank_run_frames) +
                    " deferral_cap_ms=" + std::to_string(c.deferral_cap_ms) +
                    " eow_min_silence_ms=" + std::to_string(c.eow_min_silence_ms) +
                    " frame_ms=" + std::to_string(c.frame_ms) +
                    " stream_end_ms=" + std::to_string(file.stream_end_ms) +
                    " count=" + std::to_string(file.endpoints.size()) + "\n";
  for (const EndpointEvent& e : file.endpoints) {
    out += "E " + std::to_string(e.time_ms) + ' ' +
           std::string(EndpointTriggerName(e.trigger)) + ' ' +
           std::to_string(e.silence_start_ms) + ' ' +
           std::to_string(e.deferred_by_ms) + '\n';
  }
  return out;
}

EndpointFile ParseEndpoints(std::string_view text) {
  LineReader in(text);
  const Header h = ParseHeader(in, "endpoints");
  EndpointFile file;
  file.call_id = DecodeText(Require(in, h, "call_id"));
  const auto mode = ParseEndpointMode(Require(in, h, "mode"));
  if (!mode) in.Fail("bad mode '" + Require(in, h, "mode") + "'");
  file.config.mode = *mode;
  file.config.ts_threshold_ms = RequireNumber<Millis>(in, h, "delta_ms");
  file.config.blank_run_frames = RequireNumber<int>(in, h, "blank_frames");
  file.config.deferral_cap_ms = RequireNumber<Millis>(in, h, "deferral_cap_ms");
  file.config.eow_min_silence_ms =
      RequireNumber<Millis>(in, h, "eow_min_silence_ms");
  file.config.frame_ms = RequireNumber<Millis>(in, h, "frame_ms");
  file.stream_end_ms = RequireNumber<Millis>(in, h, "stream_end_ms");
  const auto count = RequireNumber<std::size_t>(in, h, "count");

  std::string_view line;
  while (in.Next(&line)) {
    const std::vector<std::string_view> f = SplitFields(line);
    if (f[0] != "E" || f.size() != 5) in.Fail("expected 'E time trigger t1 deferred'");
    EndpointEvent e;
    e.time_ms = ParseNumber<Millis>(in, f[1], "endpoint time");
    const auto trig = ParseEndpointTrigger(f[2]);
    if (!trig) in.Fail("bad trigger '" + std::string(f[2]) + "'");
    e.trigger = *trig;
    e.silence_start_ms = ParseNumber<Millis>(in, f[3], "silence start");
    e.deferred_by_ms = ParseNumber<Millis>(in, f[4], "deferral");
    file.endpoints.push_back(e);
  }
  CheckCount(in, file.endpoints.size(), count, "endpoints");
  return file;
}

std::string SerializeTranscript(const TranscriptFile& file) {
  std::string out = "format=" + std::to_string(kFormatVersion) +
                    " kind=transcript call_id=" + EncodeText(file.call_id) +
                    " turns=" + std::to_string(file.turns.size()) + "\n";
  for (const TurnTranscript& t : file.turns) {
    out += "U " + std::to_string(t.turn_index) + ' ' + std::to_string(t.start_ms) +
           ' ' + std::to_string(t.end_ms) + ' ' + std::to_string(t.words.size());
    for (const CommittedWord& w : t.words)
      out += ' ' + EncodeText(w.text) + (w.closed_by_eow ? ":1" : ":0");
    out += '\n';
  }
  return out;
}

TranscriptFile ParseTranscript(std::string_view text) {
  LineReader in(text);
  const Header h = ParseHeader(in, "transcript");
  TranscriptFile file;
  file.call_id = DecodeText(Require(in, h, "call_id"));
  const auto count = RequireNumber<std::size_t>(in, h, "turns");
  std::string_view line;
  while (in.Next(&line)) {
    const std::vector<std::string_view> f = SplitFields(line);
    if (f[0] != "U" || f.size() < 5) in.Fail("expected 'U turn start end n words...'");
    TurnTranscript t;
    t.turn_index = ParseNumber<std::int64_t>(in, f[1], "turn index");
    t.start_ms = ParseNumber<Millis>(in, f[2], "turn start");
    t.end_ms = ParseNumber<Millis>(in, f[3], "turn end");
    const auto n = ParseNumber<std::size_t>(in, f[4], "word count");
    if (f.size() != 5 + n) in.Fail("word count does not match the record");
    for (std::size_t i = 0; i < n; ++i) {
      const std::string_view w = f[5 + i];
      const std::size_t colon = w.rfind(':');
      if (colon == std::string_view::npos) in.Fail("word lacks ':closed'");
      const std::string_view flag = w.substr(colon + 1);
      if (flag != "0" && flag != "1") in.Fail("bad closed flag '" + std::string(flag) + "'");
      t.words.push_back({DecodeText(w.substr(0, colon)), flag == "1"});
    }
    file.turns.push_back(std::move(t));
  }
  CheckCount(in, file.turns.size(), count, "turns");
  return file;
}

std::string ReportCsvHeader() {
  return "mode,delta_ms,tolerance_ms,precision,recall,f1,wer,S,D,I,"
         "mean_latency_ms,median_latency_ms,deferral_timeouts";
}

std::string SerializeReportCsv(std::span<const ReportRow> rows) {
  std::string out = "# format=" + std::to_string(kFormatVersion) + "\n" +
                    ReportCsvHeader() + "\n";
  for (const ReportRow& r : rows) {
    const EvalReport& e = r.report;
    out += std::string(EndpointModeName(r.mode)) + ',' + std::to_string(r.delta_ms) +
           ',' + std::to_string(r.tolerance_ms) + ',' + FormatDouble(e.precision) +
           ',' + FormatDouble(e.recall) + ',' + FormatDouble(e.f1) + ',' +
           FormatDouble(e.wer) + ',' + std::to_string(e.substitutions) + ',' +
           std::to_string(e.deletions) + ',' + std::to_string(e.insertions) + ',' +
           FormatDouble(e.mean_latency_ms) + ',' +
           FormatDouble(e.median_latency_ms) + ',' +
           std::to_string(e.deferral_timeouts) + '\n';
  }
  return out;
}

std::vector<ReportRow> ParseReportCsv(std::string_view text) {
  LineReader in(text);
  std::string_view line;
  if (!in.Next(&line) || line != "# format=" + std::to_string(kFormatVersion))
    in.Fail("expected '# format=1'");
  if (!in.Next(&line) || line != ReportCsvHeader()) in.Fail("unexpected CSV header");
  std::vector<ReportRow> rows;
  while (in.Next(&line)) {
    const std::vector<std::string_view> f = SplitFields(line, ',');
    if (f.size() != 13) in.Fail("CSV row needs 13 columns");
    ReportRow r;
    const auto mode = ParseEndpointMode(f[0]);
    if (!mode) in.Fail("bad mode '" + std::string(f[0]) + "'");
    r.mode = *mode;
    r.delta_ms = ParseNumber<Millis>(in, f[1], "delta_ms");
    r.tolerance_ms = ParseNumber<Millis>(in, f[2], "tolerance_ms");
    EvalReport& e = r.report;
    e.precision = ParseReal(in, f[3], "precision");
    e.recall = ParseReal(in, f[4], "recall");
    e.f1 = ParseReal(in, f[5], "f1");
    e.wer = ParseReal(in, f[6], "wer");
    e.substitutions = ParseNumber<std::size_t>(in, f[7], "S");
    e.deletions = ParseNumber<std::size_t>(in, f[8], "D");
    e.insertions = ParseNumber<std::size_t>(in, f[9], "I");
    e.mean_latency_ms = ParseReal(in, f[10], "mean_latency_ms");
    e.median_latency_ms = ParseReal(in, f[11], "median_latency_ms");
    e.deferral_timeouts = ParseNumber<std::size_t>(in, f[12], "deferral_timeouts");
    rows.push_back(r);
  }
  return rows;
}

SimConfig ParseSimConfig(std::string_view json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config", "must be a JSON object");

  SimConfig cfg;
  auto number = [](const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "must be a number");
    return v.get<double>();
  };
  auto integer = [](const json& v, const std::string& field) -> std::int64_t {
    if (!v.is_number_integer()) throw ConfigError(field, "must be an integer");
    return v.get<std::int64_t>();
  };
  auto range = [&](const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 2)
      throw ConfigError(field, "must be a [min, max] array");
    return std::pair{integer(v[0], field), integer(v[1], field)};
  };

  for (const auto& [key, v] : j.items()) {
    if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw ConfigError(key, "must be a non-negative integer");
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "call_id") {
      if (!v.is_string()) throw ConfigError(key, "must be a string");
      cfg.call_id = v.get<std::string>();
    } else if (key == "n_turns") {
      cfg.n_turns = static_cast<int>(integer(v, key));
    } else if (key == "turn_dur_ms") {
      auto [a, b] = range(v, key);
      cfg.turn_dur_ms = {a, b};
    } else if (key == "gap_dur_ms") {
      auto [a, b] = range(v, key);
      cfg.gap_dur_ms = {a, b};
    } else if (key == "word_dur_ms") {
      auto [a, b] = range(v, key);
      cfg.word_dur_ms = {a, b};
    } else if (key == "pause_dur_ms") {
      auto [a, b] = range(v, key);
      cfg.pause_dur_ms = {a, b};
    } else if (key == "subwords_per_word") {
      auto [a, b] = range(v, key);
      cfg.subwords_per_word = {static_cast<int>(a), static_cast<int>(b)};
    } else if (key == "pause_prob") {
      cfg.pause_prob = number(v, key);
    } else if (key == "emission_delay") {
      if (!v.is_object()) throw ConfigError(key, "must be an object");
      for (const auto& [k2, v2] : v.items()) {
        const std::string field = key + "." + k2;
        if (k2 == "mean_ms") {
          cfg.emission_delay.mean_ms = number(v2, field);
        } else if (k2 == "std_ms") {
          cfg.emission_delay.std_ms = number(v2, field);
        } else if (k2 == "clip_max_ms") {
          cfg.emission_delay.clip_max_ms = number(v2, field);
        } else {
          throw ConfigError(field, "unknown key");
        }
      }
    } else if (key == "feature_separability") {
      cfg.feature_separability = number(v, key);
    } else if (key == "feature_dim") {
      cfg.feature_dim = static_cast<int>(integer(v, key));
    } else if (key == "teacher_flip_prob") {
      cfg.teacher_flip_prob = number(v, key);
    } else if (key == "frame_ms") {
      cfg.frame_ms = integer(v, key);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  CheckSimConfig(cfg);
  return cfg;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

fs::path CallPath(const fs::path& dir, std::string_view call_id) {
  return dir / (EncodeText(call_id) + ".call");
}

fs::path EndpointsPath(const fs::path& dir, std::string_view call_id) {
  return dir / (EncodeText(call_id) + ".endpoints");
}

fs::path TranscriptPath(const fs::path& dir, std::string_view call_id) {
  return dir / (EncodeText(call_id) + ".transcript");
}

std::vector<CallRecord> ReadCallDir(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw Error("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".call")
      paths.push_back(entry.path());
  std::vector<CallRecord> calls;
  calls.reserve(paths.size());
  for (const fs::path& p : paths) {
    try {
      calls.push_back(ParseCall(ReadFile(p)));
    } catch (const FormatError& e) {
      throw FormatError(p.filename().string() + ": " + e.what());
    }
  }
  std::sort(calls.begin(), calls.end(),
            [](const CallRecord& a, const CallRecord& b) {
              return a.call_id < b.call_id;
            });
  return calls;
}

}  // namespace endpoint_rt
