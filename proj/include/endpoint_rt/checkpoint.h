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

// Binary model checkpoint. All integers and floats are little-endian.
//
//   offset  size       field
//   0       8          magic "EPRTMLP\0"
//   8       4          u32 format version (= 1)
//   12      4          u32 number of dims (= 4)
//   16      8 * 4      u64 dims: d_in, h1, h2, 1
//   48      8          f64 operating threshold (speech iff posterior >= it)
//   56      ...        for each of the 3 layers:
//                        f64 weights[out * in], row-major (row = output unit)
//                        f64 bias[out]

#ifndef ENDPOINT_RT_CHECKPOINT_H_
#define ENDPOINT_RT_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "endpoint_rt/vad_net.h"

namespace endpoint_rt {

inline constexpr std::uint32_t kCheckpointFormat = 1;

struct Checkpoint {
  MlpModel model;
  double threshold = 0.5;
  bool operator==(const Checkpoint&) const = default;
};

std::string SerializeCheckpoint(const Checkpoint& ckpt);
// Throws FormatError on any mismatch.
Checkpoint ParseCheckpoint(const std::string& bytes);

void SaveCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace endpoint_rt

#endif  // ENDPOINT_RT_CHECKPOINT_H_
