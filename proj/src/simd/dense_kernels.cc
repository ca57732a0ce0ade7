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

#include "endpoint_rt/simd/dense_kernels.h"

#include <cstdlib>
#include <string>

#include <spdlog/spdlog.h>

namespace endpoint_rt::simd {

namespace {

double DotScalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void AxpyScalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

constexpr DenseKernels kScalar{Isa::kScalar, &DotScalar, &AxpyScalar};

bool CpuHasAvx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const DenseKernels& Resolve() {
  const char* env = std::getenv("ENDPOINT_RT_SIMD");
  std::string want = env ? env : "auto";
  if (want == "scalar") return kScalar;
  if (want == "avx2" || want == "neon") {
    Isa isa = want == "avx2" ? Isa::kAvx2 : Isa::kNeon;
    if (IsaAvailable(isa)) return KernelsFor(isa);
    spdlog::warn("ENDPOINT_RT_SIMD={} not available here; using scalar", want);
    return kScalar;
  }
  if (want != "auto")
    spdlog::warn("unknown ENDPOINT_RT_SIMD value '{}'; using auto", want);
  if (IsaAvailable(Isa::kAvx2)) return *Avx2Kernels();
  if (IsaAvailable(Isa::kNeon)) return *NeonKernels();
  return kScalar;
}

}  // namespace

std::string_view IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "?";
}

const DenseKernels& ScalarKernels() { return kScalar; }

bool IsaAvailable(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return Avx2Kernels() != nullptr && CpuHasAvx2();
    case Isa::kNeon:
      // Advanced SIMD is mandatory on aarch64.
      return NeonKernels() != nullptr;
  }
  return false;
}

const DenseKernels& KernelsFor(Isa isa) {
  if (!IsaAvailable(isa)) return kScalar;
  switch (isa) {
    case Isa::kAvx2:
      return *Avx2Kernels();
    case Isa::kNeon:
      return *NeonKernels();
    default:
      return kScalar;
  }
}

const DenseKernels& ActiveKernels() {
  static const DenseKernels& active = Resolve();
  return active;
}

}  // namespace endpoint_rt::simd
