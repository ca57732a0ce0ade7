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

// Inner-loop kernels for the frame classifier: dot products and axpy updates
// over contiguous double arrays.
//
// Each kernel exists as a scalar reference and, where the target supports
// it, an AVX2+FMA (x86-64) or NEON (aarch64) variant. The variant is picked
// once at runtime from CPU features; ENDPOINT_RT_SIMD=scalar|avx2|neon|auto
// overrides the choice. SIMD variants reassociate the reduction in `dot`, so
// results agree with the scalar reference to rounding, not bit for bit.

#ifndef ENDPOINT_RT_SIMD_DENSE_KERNELS_H_
#define ENDPOINT_RT_SIMD_DENSE_KERNELS_H_

#include <cstddef>
#include <span>
#include <string_view>

namespace endpoint_rt::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view IsaName(Isa isa);

struct DenseKernels {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const DenseKernels& ScalarKernels();

// nullptr when the variant was not compiled for this target.
const DenseKernels* Avx2Kernels();
const DenseKernels* NeonKernels();

// True when the variant is compiled in and the running CPU can execute it.
bool IsaAvailable(Isa isa);

// Kernels used by the library. Resolved on first use.
const DenseKernels& ActiveKernels();

// Kernels for `isa`, or the scalar reference if that variant is unavailable.
const DenseKernels& KernelsFor(Isa isa);

inline double Dot(std::span<const double> a, std::span<const double> b) {
  return ActiveKernels().dot(a.data(), b.data(), a.size());
}

inline void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  ActiveKernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace endpoint_rt::simd

#endif  // ENDPOINT_RT_SIMD_DENSE_KERNELS_H_
