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

#include "endpoint_rt/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "endpoint_rt/error.h"

namespace endpoint_rt {

namespace {

constexpr char kMagic[8] = {'E', 'P', 'R', 'T', 'M', 'L', 'P', '\0'};

template <typename U>
void PutLe(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutF64(std::string& out, double v) {
  PutLe(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename U>
  U Le() {
    Need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  double F64() { return std::bit_cast<double>(Le<std::uint64_t>()); }
  void Raw(char* dst, std::size_t n) {
    Need(n);
    std::memcpy(dst, bytes_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("checkpoint truncated");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  CheckModel(ckpt.model);
  std::string out(kMagic, sizeof(kMagic));
  PutLe<std::uint32_t>(out, kCheckpointFormat);
  PutLe<std::uint32_t>(out, 4);
  for (std::size_t d : ckpt.model.dims()) PutLe<std::uint64_t>(out, d);
  PutF64(out, ckpt.threshold);
  for (const DenseLayer& layer : ckpt.model.layers) {
    for (double w : layer.weights) PutF64(out, w);
    for (double b : layer.bias) PutF64(out, b);
  }
  return out;
}

Checkpoint ParseCheckpoint(const std::string& bytes) {
  Reader in(bytes);
  char magic[sizeof(kMagic)];
  in.Raw(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("not a model checkpoint (bad magic)");
  if (auto v = in.Le<std::uint32_t>(); v != kCheckpointFormat)
    throw FormatError("unsupported checkpoint format " + std::to_string(v));
  if (in.Le<std::uint32_t>() != 4)
    throw FormatError("checkpoint must describe a 4-dim network");
  std::uint64_t dims[4];
  for (auto& d : dims) {
    d = in.Le<std::uint64_t>();
    if (d == 0 || d > (1u << 24)) throw FormatError("implausible layer width");
  }
  if (dims[3] != 1) throw FormatError("output layer must have width 1");

  Checkpoint ckpt;
  ckpt.threshold = in.F64();
  ckpt.model = ZeroModel(dims[0], dims[1], dims[2]);
  for (DenseLayer& layer : ckpt.model.layers) {
    for (double& w : layer.weights) w = in.F64();
    for (double& b : layer.bias) b = in.F64();
  }
  if (!in.done()) throw FormatError("trailing bytes after checkpoint");
  try {
    CheckModel(ckpt.model);
  } catch (const DataError& e) {
    throw FormatError(std::string("invalid checkpoint: ") + e.what());
  }
  return ckpt;
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::string bytes = SerializeCheckpoint(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return ParseCheckpoint(bytes);
}

}  // namespace endpoint_rt
