// scsot/tests/test_kernels.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "scsot/kernels.h"
#include "scsot/rng.h"

using namespace scsot;
using kernels::Backend;

namespace {

std::vector<double> RandVec(Rng* rng, int64_t n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (auto& x : v) x = rng->Uniform(-2.0, 2.0);
  return v;
}

// Sizes chosen to hit the vector body, the scalar tail, and the empty case.
const std::vector<int64_t> kLens = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 64, 67};

// All backends usable on this host, scalar first.
std::vector<const Backend*> AllBackends() {
  std::vector<const Backend*> out = {&kernels::Scalar()};
  if (kernels::CpuSupportsAvx2()) out.push_back(&kernels::Avx2());
  return out;
}

}  // namespace

TEST_CASE("elementwise kernels are bit-identical across backends") {
  const Backend& s = kernels::Scalar();
  std::vector<const Backend*> others = AllBackends();
  others.erase(others.begin());
  REQUIRE(!others.empty());  // this project targets hosts with AVX2

  Rng rng(101);
  for (int64_t n : kLens) {
    std::vector<double> a = RandVec(&rng, n), b = RandVec(&rng, n);
    std::vector<double> ref(static_cast<size_t>(n)), got(static_cast<size_t>(n));
    for (const Backend* o : others) {
      s.add(a.data(), b.data(), ref.data(), n);
      o->add(a.data(), b.data(), got.data(), n);
      CHECK(ref == got);
      s.sub(a.data(), b.data(), ref.data(), n);
      o->sub(a.data(), b.data(), got.data(), n);
      CHECK(ref == got);
      s.mul(a.data(), b.data(), ref.data(), n);
      o->mul(a.data(), b.data(), got.data(), n);
      CHECK(ref == got);
      s.scale(1.37, a.data(), ref.data(), n);
      o->scale(1.37, a.data(), got.data(), n);
      CHECK(ref == got);
      ref = b;
      got = b;
      s.axpy(-0.71, a.data(), ref.data(), n);
      o->axpy(-0.71, a.data(), got.data(), n);
      CHECK(ref == got);
    }
  }
}

TEST_CASE("reductions are bit-identical across backends") {
  const Backend& s = kernels::Scalar();
  Rng rng(202);
  for (int64_t n : kLens) {
    std::vector<double> a = RandVec(&rng, n), b = RandVec(&rng, n);
    for (const Backend* o : AllBackends()) {
      CHECK(s.dot(a.data(), b.data(), n) == o->dot(a.data(), b.data(), n));
      CHECK(s.sum(a.data(), n) == o->sum(a.data(), n));
    }
  }
}

TEST_CASE("matmul variants are bit-identical across backends") {
  const Backend& s = kernels::Scalar();
  Rng rng(303);
  std::vector<std::array<int64_t, 3>> shapes = {
      {1, 1, 1}, {2, 3, 4}, {5, 7, 3}, {8, 8, 8}, {3, 17, 5}, {13, 9, 11}};
  for (auto [m, k, n] : shapes) {
    std::vector<double> a = RandVec(&rng, m * k);
    std::vector<double> b_nn = RandVec(&rng, k * n);
    std::vector<double> b_nt = RandVec(&rng, n * k);
    std::vector<double> a_tn = RandVec(&rng, k * m);
    std::vector<double> ref(static_cast<size_t>(m * n)),
        got(static_cast<size_t>(m * n));
    for (const Backend* o : AllBackends()) {
      s.matmul_nn(a.data(), b_nn.data(), ref.data(), m, k, n);
      o->matmul_nn(a.data(), b_nn.data(), got.data(), m, k, n);
      CHECK(ref == got);
      s.matmul_nt(a.data(), b_nt.data(), ref.data(), m, k, n);
      o->matmul_nt(a.data(), b_nt.data(), got.data(), m, k, n);
      CHECK(ref == got);
      s.matmul_tn(a_tn.data(), b_nn.data(), ref.data(), m, k, n);
      o->matmul_tn(a_tn.data(), b_nn.data(), got.data(), m, k, n);
      CHECK(ref == got);
    }
  }
}

TEST_CASE("matmul agrees with a naive triple loop") {
  Rng rng(404);
  int64_t m = 6, k = 11, n = 4;
  std::vector<double> a = RandVec(&rng, m * k), b = RandVec(&rng, k * n);
  for (const Backend* o : AllBackends()) {
    std::vector<double> c(static_cast<size_t>(m * n));
    o->matmul_nn(a.data(), b.data(), c.data(), m, k, n);
    for (int64_t i = 0; i < m; ++i) {
      for (int64_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int64_t l = 0; l < k; ++l) acc += a[i * k + l] * b[l * n + j];
        CHECK(std::fabs(c[i * n + j] - acc) < 1e-12);
      }
    }
  }
}

TEST_CASE("dot and sum agree with sequential reference") {
  Rng rng(505);
  for (int64_t n : kLens) {
    std::vector<double> a = RandVec(&rng, n), b = RandVec(&rng, n);
    double seq_dot = 0.0, seq_sum = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      seq_dot += a[i] * b[i];
      seq_sum += a[i];
    }
    for (const Backend* o : AllBackends()) {
      CHECK(o->dot(a.data(), b.data(), n) == doctest::Approx(seq_dot).epsilon(1e-12));
      CHECK(o->sum(a.data(), n) == doctest::Approx(seq_sum).epsilon(1e-12));
    }
  }
}

TEST_CASE("backend forcing round-trips") {
  std::string before = kernels::Active().name;
  kernels::ForceBackend("scalar");
  CHECK(std::string(kernels::Active().name) == "scalar");
  if (kernels::CpuSupportsAvx2()) {
    kernels::ForceBackend("avx2");
    CHECK(std::string(kernels::Active().name) == "avx2");
  }
  kernels::ForceBackend("auto");
  CHECK(std::string(kernels::Active().name) == before);
  CHECK_THROWS(kernels::ForceBackend("sse9"));
}
