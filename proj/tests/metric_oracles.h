// scsot/tests/metric_oracles.h

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

// Brute-force scoring oracles shared by the metric unit tests and the
// acceptance gate.  Each one is written against the metric definition, not
// against the production code, and trades speed for obviousness.

#ifndef SCSOT_TESTS_METRIC_ORACLES_H_
#define SCSOT_TESTS_METRIC_ORACLES_H_

#include <algorithm>
#include <vector>

#include "scsot/tensor.h"

namespace scsot {
namespace testing {

// Full-matrix Levenshtein, kept deliberately different from the two-row
// rolling version under test.
inline int64_t SlowEdit(const std::vector<int>& a, const std::vector<int>& b) {
  size_t n = a.size(), m = b.size();
  std::vector<std::vector<int64_t>> d(n + 1, std::vector<int64_t>(m + 1));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      int64_t best = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      best = std::min(best, d[i - 1][j] + 1);
      best = std::min(best, d[i][j - 1] + 1);
      d[i][j] = best;
    }
  }
  return d[n][m];
}

// Exhaustive assignment search over padded segment sets.
inline int64_t SlowWerEdits(std::vector<std::vector<int>> ref,
                            std::vector<std::vector<int>> hyp) {
  size_t n = std::max(ref.size(), hyp.size());
  ref.resize(n);
  hyp.resize(n);
  std::vector<bool> used(n, false);
  int64_t best = -1;
  auto go = [&](auto&& self, size_t i, int64_t acc) -> void {
    if (i == n) {
      if (best < 0 || acc < best) best = acc;
      return;
    }
    for (size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      used[j] = true;
      self(self, i + 1, acc + SlowEdit(ref[i], hyp[j]));
      used[j] = false;
    }
  };
  go(go, 0, 0);
  return best;
}

// Windowed binary majority with replicated edges, recounted per position.
inline std::vector<int> SlowFilter(const std::vector<int>& x, int window) {
  int n = static_cast<int>(x.size());
  int h = window / 2;
  std::vector<int> out(x.size());
  for (int i = 0; i < n; ++i) {
    int ones = 0;
    for (int k = i - h; k <= i + h; ++k) {
      int idx = std::clamp(k, 0, n - 1);
      ones += x[static_cast<size_t>(idx)];
    }
    out[static_cast<size_t>(i)] = ones * 2 > window ? 1 : 0;
  }
  return out;
}

struct SlowDer {
  int64_t miss = 0, fa = 0, conf = 0, ref_speech = 0;
};

// Independent per-frame error counter over binarized, filtered tracks.
inline SlowDer SlowDerCount(const Tensor& ref, const Tensor& hyp, double theta,
                            int window) {
  int64_t frames = ref.Dim(0);
  int64_t cols = std::max(ref.Dim(1), hyp.Dim(1));
  auto track = [&](const Tensor& m, int64_t s) {
    std::vector<int> x(static_cast<size_t>(frames), 0);
    if (s < m.Dim(1)) {
      for (int64_t t = 0; t < frames; ++t) {
        x[static_cast<size_t>(t)] = m.At(t, s) >= theta ? 1 : 0;
      }
    }
    return SlowFilter(x, window);
  };
  std::vector<std::vector<int>> r, h;
  for (int64_t s = 0; s < cols; ++s) {
    r.push_back(track(ref, s));
    h.push_back(track(hyp, s));
  }
  SlowDer out;
  for (int64_t t = 0; t < frames; ++t) {
    int64_t rc = 0, hc = 0, both = 0;
    for (int64_t s = 0; s < cols; ++s) {
      rc += r[static_cast<size_t>(s)][static_cast<size_t>(t)];
      hc += h[static_cast<size_t>(s)][static_cast<size_t>(t)];
      both += r[static_cast<size_t>(s)][static_cast<size_t>(t)] &
              h[static_cast<size_t>(s)][static_cast<size_t>(t)];
    }
    out.ref_speech += rc;
    out.miss += std::max<int64_t>(0, rc - hc);
    out.fa += std::max<int64_t>(0, hc - rc);
    out.conf += std::min(rc, hc) - both;
  }
  return out;
}

}  // namespace testing
}  // namespace scsot

#endif  // SCSOT_TESTS_METRIC_ORACLES_H_
