// scsot/kernels_avx2.cc

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

// AVX2 kernels.  This translation unit is compiled with -mavx2 and must only
// be entered after a runtime cpuid check.  No FMA: mul followed by add keeps
// each lane bit-identical to the scalar reference.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>

#include "scsot/kernels.h"

namespace scsot {
namespace kernels {
namespace {

void AddAvx2(const double* x, const double* y, double* out, int64_t n) {
  int64_t nv = n & ~int64_t{3};
  for (int64_t i = 0; i < nv; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (int64_t i = nv; i < n; ++i) out[i] = x[i] + y[i];
}

void SubAvx2(const double* x, const double* y, double* out, int64_t n) {
  int64_t nv = n & ~int64_t{3};
  for (int64_t i = 0; i < nv; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (int64_t i = nv; i < n; ++i) out[i] = x[i] - y[i];
}

void MulAvx2(const double* x, const double* y, double* out, int64_t n) {
  int64_t nv = n & ~int64_t{3};
  for (int64_t i = 0; i < nv; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (int64_t i = nv; i < n; ++i) out[i] = x[i] * y[i];
}

void AxpyAvx2(double alpha, const double* x, double* y, int64_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  int64_t nv = n & ~int64_t{3};
  for (int64_t i = 0; i < nv; i += 4) {
    __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (int64_t i = nv; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void ScaleAvx2(double alpha, const double* x, double* out, int64_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  int64_t nv = n & ~int64_t{3};
  for (int64_t i = 0; i < nv; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (int64_t i = nv; i < n; ++i) out[i] = alpha * x[i];
}

// Horizontal combine in the reference order: (l0+l1)+(l2+l3).
inline double HorizontalTree(__m256d acc) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double DotAvx2(const double* x, const double* y, int64_t n) {
  __m256d acc = _mm256_setzero_pd();
  int64_t nv = n & ~int64_t{3};
  for (int64_t i = 0; i < nv; i += 4) {
    __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, prod);
  }
  double s = HorizontalTree(acc);
  for (int64_t i = nv; i < n; ++i) s = s + x[i] * y[i];
  return s;
}

double SumAvx2(const double* x, int64_t n) {
  __m256d acc = _mm256_setzero_pd();
  int64_t nv = n & ~int64_t{3};
  for (int64_t i = 0; i < nv; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  }
  double s = HorizontalTree(acc);
  for (int64_t i = nv; i < n; ++i) s = s + x[i];
  return s;
}

void MatmulNnAvx2(const double* a, const double* b, double* c, int64_t m,
                  int64_t k, int64_t n) {
  std::memset(c, 0, sizeof(double) * static_cast<size_t>(m * n));
  for (int64_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    const double* arow = a + i * k;
    for (int64_t l = 0; l < k; ++l) {
      AxpyAvx2(arow[l], b + l * n, crow, n);
    }
  }
}

void MatmulNtAvx2(const double* a, const double* b, double* c, int64_t m,
                  int64_t k, int64_t n) {
  for (int64_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (int64_t j = 0; j < n; ++j) {
      crow[j] = DotAvx2(arow, b + j * k, k);
    }
  }
}

void MatmulTnAvx2(const double* a, const double* b, double* c, int64_t m,
                  int64_t k, int64_t n) {
  std::memset(c, 0, sizeof(double) * static_cast<size_t>(m * n));
  for (int64_t l = 0; l < k; ++l) {
    const double* arow = a + l * m;
    const double* brow = b + l * n;
    for (int64_t i = 0; i < m; ++i) {
      AxpyAvx2(arow[i], brow, c + i * n, n);
    }
  }
}

}  // namespace

const Backend& Avx2() {
  static const Backend backend = {
      "avx2",     MatmulNnAvx2, MatmulNtAvx2, MatmulTnAvx2, AddAvx2, SubAvx2,
      MulAvx2,    AxpyAvx2,     ScaleAvx2,    DotAvx2,      SumAvx2,
  };
  return backend;
}

}  // namespace kernels
}  // namespace scsot

#endif  // x86_64
