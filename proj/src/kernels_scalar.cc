// scsot/kernels_scalar.cc

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

// Reference kernels.  The reduction order here is the contract every other
// backend must reproduce exactly.

#include "scsot/kernels.h"

#include <cstring>

namespace scsot {
namespace kernels {
namespace {

void AddScalar(const double* x, const double* y, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = x[i] + y[i];
}

void SubScalar(const double* x, const double* y, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}

void MulScalar(const double* x, const double* y, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void AxpyScalar(double alpha, const double* x, double* y, int64_t n) {
  for (int64_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void ScaleScalar(double alpha, const double* x, double* out, int64_t n) {
  for (int64_t i = 0; i < n; ++i) out[i] = alpha * x[i];
}

// 4-lane accumulation tree; lanes combined as (acc0+acc1)+(acc2+acc3),
// then a sequential tail.  Matches the AVX2 horizontal reduction.
double DotScalar(const double* x, const double* y, int64_t n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  int64_t nv = n & ~int64_t{3};
  for (int64_t i = 0; i < nv; i += 4) {
    acc0 = acc0 + x[i] * y[i];
    acc1 = acc1 + x[i + 1] * y[i + 1];
    acc2 = acc2 + x[i + 2] * y[i + 2];
    acc3 = acc3 + x[i + 3] * y[i + 3];
  }
  double s = (acc0 + acc1) + (acc2 + acc3);
  for (int64_t i = nv; i < n; ++i) s = s + x[i] * y[i];
  return s;
}

double SumScalar(const double* x, int64_t n) {
  double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
  int64_t nv = n & ~int64_t{3};
  for (int64_t i = 0; i < nv; i += 4) {
    acc0 = acc0 + x[i];
    acc1 = acc1 + x[i + 1];
    acc2 = acc2 + x[i + 2];
    acc3 = acc3 + x[i + 3];
  }
  double s = (acc0 + acc1) + (acc2 + acc3);
  for (int64_t i = nv; i < n; ++i) s = s + x[i];
  return s;
}

// Row-times-matrix accumulation: per output element the k-index advances
// sequentially, so the j loop may be vectorized freely without changing
// the result.
void MatmulNnScalar(const double* a, const double* b, double* c, int64_t m,
                    int64_t k, int64_t n) {
  std::memset(c, 0, sizeof(double) * static_cast<size_t>(m * n));
  for (int64_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    const double* arow = a + i * k;
    for (int64_t l = 0; l < k; ++l) {
      AxpyScalar(arow[l], b + l * n, crow, n);
    }
  }
}

void MatmulNtScalar(const double* a, const double* b, double* c, int64_t m,
                    int64_t k, int64_t n) {
  for (int64_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (int64_t j = 0; j < n; ++j) {
      crow[j] = DotScalar(arow, b + j * k, k);
    }
  }
}

void MatmulTnScalar(const double* a, const double* b, double* c, int64_t m,
                    int64_t k, int64_t n) {
  std::memset(c, 0, sizeof(double) * static_cast<size_t>(m * n));
  for (int64_t l = 0; l < k; ++l) {
    const double* arow = a + l * m;
    const double* brow = b + l * n;
    for (int64_t i = 0; i < m; ++i) {
      AxpyScalar(arow[i], brow, c + i * n, n);
    }
  }
}

}  // namespace

const Backend& Scalar() {
  static const Backend backend = {
      "scalar",       MatmulNnScalar, MatmulNtScalar, MatmulTnScalar,
      AddScalar,      SubScalar,      MulScalar,      AxpyScalar,
      ScaleScalar,    DotScalar,      SumScalar,
  };
  return backend;
}

}  // namespace kernels
}  // namespace scsot
