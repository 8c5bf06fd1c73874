// scsot/kernels.h

// Copyright 2026  The scsot authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SCSOT_KERNELS_H_
#define SCSOT_KERNELS_H_

#include <cstdint>
#include <string>
#include <vector>

namespace scsot {
namespace kernels {

// Double-precision inner-loop kernels.  Every backend computes each output
// element with the same operation order: reductions use a fixed 4-lane
// accumulation tree combined as (acc0+acc1)+(acc2+acc3) followed by a
// sequential tail, and no backend uses fused multiply-add.  With
// -ffp-contract=off this makes scalar and SIMD results bit-identical, so
// runtime dispatch never affects reproducibility.
struct Backend {
  const char* name;

  // c (m x n) = a (m x k) * b (k x n)
  void (*matmul_nn)(const double* a, const double* b, double* c, int64_t m,
                    int64_t k, int64_t n);
  // c (m x n) = a (m x k) * b^T, b stored (n x k)
  void (*matmul_nt)(const double* a, const double* b, double* c, int64_t m,
                    int64_t k, int64_t n);
  // c (m x n) = a^T * b, a stored (k x m), b stored (k x n)
  void (*matmul_tn)(const double* a, const double* b, double* c, int64_t m,
                    int64_t k, int64_t n);

  void (*add)(const double* x, const double* y, double* out, int64_t n);
  void (*sub)(const double* x, const double* y, double* out, int64_t n);
  void (*mul)(const double* x, const double* y, double* out, int64_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, int64_t n);
  void (*scale)(double alpha, const double* x, double* out, int64_t n);
  double (*dot)(const double* x, const double* y, int64_t n);
  double (*sum)(const double* x, int64_t n);
};

const Backend& Scalar();

#if defined(__x86_64__) || defined(_M_X64)
const Backend& Avx2();
#endif

// Backend in use; picks the widest supported one unless forced.
const Backend& Active();

// Force "scalar", "avx2", or "auto".  Throws if the backend is unknown or
// unsupported on this CPU.  Intended for tests and the SCSOT_KERNELS env var.
void ForceBackend(const std::string& name);

std::vector<std::string> AvailableBackends();

bool CpuSupportsAvx2();

}  // namespace kernels
}  // namespace scsot

#endif  // SCSOT_KERNELS_H_
