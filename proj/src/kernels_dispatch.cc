// scsot/kernels_dispatch.cc

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

// Runtime backend selection.  Compiled without SIMD flags so the detection
// path itself never executes AVX instructions.

#include "scsot/kernels.h"

#include <cstdlib>

#include "scsot/common.h"

namespace scsot {
namespace kernels {
namespace {

const Backend* g_active = nullptr;

const Backend* PickDefault() {
#if defined(__x86_64__) || defined(_M_X64)
  if (CpuSupportsAvx2()) return &Avx2();
#endif
  return &Scalar();
}

const Backend* ResolveName(const std::string& name) {
  if (name == "auto") return PickDefault();
  if (name == "scalar") return &Scalar();
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2") {
    SCSOT_CHECK(CpuSupportsAvx2(), "avx2 backend requested but CPU lacks AVX2");
    return &Avx2();
  }
#endif
  SCSOT_CHECK(false, "unknown kernel backend: " + name);
  return nullptr;
}

}  // namespace

bool CpuSupportsAvx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const Backend& Active() {
  if (g_active == nullptr) {
    const char* env = std::getenv("SCSOT_KERNELS");
    g_active = (env != nullptr) ? ResolveName(env) : PickDefault();
    SCSOT_DEBUG("kernel backend: %s", g_active->name);
  }
  return *g_active;
}

void ForceBackend(const std::string& name) { g_active = ResolveName(name); }

std::vector<std::string> AvailableBackends() {
  std::vector<std::string> out = {"scalar"};
#if defined(__x86_64__) || defined(_M_X64)
  if (CpuSupportsAvx2()) out.push_back("avx2");
#endif
  return out;
}

}  // namespace kernels
}  // namespace scsot
