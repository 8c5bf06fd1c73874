// scsot/src/metrics.cc

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

#include "scsot/metrics.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>

#include "scsot/common.h"
#include "scsot/diar_model.h"

namespace scsot {

namespace {

// Hungarian algorithm with potentials on an n x n cost matrix.  Returns the
// column matched to each row under a minimum-total-cost perfect matching.
// Indices are shifted by one internally; column 0 is the virtual root.
std::vector<int> MinCostAssignment(const std::vector<int64_t>& cost,
                                   size_t n) {
  const int64_t kInf = std::numeric_limits<int64_t>::max() / 4;
  std::vector<int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    p[0] = static_cast<int>(i);
    size_t j0 = 0;
    std::vector<int64_t> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      size_t i0 = static_cast<size_t>(p[j0]), j1 = 0;
      int64_t delta = kInf;
      for (size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        int64_t cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = static_cast<int>(j0);
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[static_cast<size_t>(p[j])] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      size_t j1 = static_cast<size_t>(way[j0]);
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(n, -1);
  for (size_t j = 1; j <= n; ++j) {
    if (p[j] > 0) match[static_cast<size_t>(p[j]) - 1] = static_cast<int>(j - 1);
  }
  return match;
}

}  // namespace

int64_t EditDistance(const std::vector<int>& ref, const std::vector<int>& hyp) {
  size_t n = ref.size(), m = hyp.size();
  std::vector<int64_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      int64_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

WerResult Wer(const std::vector<std::vector<int>>& ref,
              const std::vector<std::vector<int>>& hyp) {
  SCSOT_CHECK(!ref.empty(), "wer: need at least one reference speaker");
  int64_t ref_tokens = 0;
  for (const auto& r : ref) ref_tokens += static_cast<int64_t>(r.size());
  SCSOT_CHECK(ref_tokens > 0, "wer: reference has no tokens");

  // Pad the shorter side with empty segments, then pick the assignment of
  // hypothesis segments to reference slots with the fewest total edits.
  size_t n = std::max(ref.size(), hyp.size());
  std::vector<std::vector<int>> r(ref), h(hyp);
  r.resize(n);
  h.resize(n);

  std::vector<int64_t> cost(n * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) cost[i * n + j] = EditDistance(r[i], h[j]);
  }

  std::vector<int> match = MinCostAssignment(cost, n);
  int64_t best = 0;
  for (size_t i = 0; i < n; ++i) {
    best += cost[i * n + static_cast<size_t>(match[i])];
  }

  WerResult out;
  out.edits = best;
  out.ref_tokens = ref_tokens;
  out.wer = static_cast<double>(best) / static_cast<double>(ref_tokens);
  out.assignment.assign(ref.size(), -1);
  for (size_t i = 0; i < ref.size(); ++i) {
    out.assignment[i] =
        match[i] < static_cast<int>(hyp.size()) ? match[i] : -1;
  }
  return out;
}

double Sca(const std::vector<int>& true_counts,
           const std::vector<int>& predicted_counts) {
  SCSOT_CHECK(true_counts.size() == predicted_counts.size(),
              StrPrintf("sca: %zu true counts vs %zu predictions",
                        true_counts.size(), predicted_counts.size()));
  SCSOT_CHECK(!true_counts.empty(), "sca: empty count lists");
  int64_t hit = 0;
  for (size_t i = 0; i < true_counts.size(); ++i) {
    if (true_counts[i] == predicted_counts[i]) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(true_counts.size());
}

namespace {

// Binarized, median-filtered track of column s; columns past the matrix
// width read as silence.
std::vector<int> Track(const Tensor& m, int64_t s, double theta, int window) {
  std::vector<int> x(static_cast<size_t>(m.Dim(0)), 0);
  if (s < m.Dim(1)) {
    for (int64_t t = 0; t < m.Dim(0); ++t) {
      x[static_cast<size_t>(t)] = m.At(t, s) >= theta ? 1 : 0;
    }
  }
  return MedianFilter(x, window);
}

}  // namespace

DerResult Der(const Tensor& ref_labels, const Tensor& hyp_posterior,
              double theta, int median_window) {
  SCSOT_CHECK(ref_labels.Rank() == 2 && hyp_posterior.Rank() == 2,
              "der: both inputs must be [T, S] matrices");
  SCSOT_CHECK(ref_labels.Dim(0) == hyp_posterior.Dim(0),
              StrPrintf("der: frame counts differ, %ld vs %ld",
                        ref_labels.Dim(0), hyp_posterior.Dim(0)));
  int64_t frames = ref_labels.Dim(0);
  int64_t cols = std::max(ref_labels.Dim(1), hyp_posterior.Dim(1));

  std::vector<std::vector<int>> ref(static_cast<size_t>(cols)),
      hyp(static_cast<size_t>(cols));
  for (int64_t s = 0; s < cols; ++s) {
    ref[static_cast<size_t>(s)] = Track(ref_labels, s, theta, median_window);
    hyp[static_cast<size_t>(s)] = Track(hyp_posterior, s, theta, median_window);
  }

  DerResult out;
  for (int64_t t = 0; t < frames; ++t) {
    int64_t r = 0, h = 0, matched = 0;
    for (int64_t s = 0; s < cols; ++s) {
      int rv = ref[static_cast<size_t>(s)][static_cast<size_t>(t)];
      int hv = hyp[static_cast<size_t>(s)][static_cast<size_t>(t)];
      r += rv;
      h += hv;
      matched += (rv & hv);
    }
    out.ref_speech_frames += r;
    out.miss_frames += std::max<int64_t>(0, r - h);
    out.false_alarm_frames += std::max<int64_t>(0, h - r);
    out.confusion_frames += std::min(r, h) - matched;
  }
  SCSOT_CHECK(out.ref_speech_frames > 0,
              "der: reference has no speech frames after filtering");
  double denom = static_cast<double>(out.ref_speech_frames);
  out.miss = static_cast<double>(out.miss_frames) / denom;
  out.false_alarm = static_cast<double>(out.false_alarm_frames) / denom;
  out.confusion = static_cast<double>(out.confusion_frames) / denom;
  out.der = static_cast<double>(out.miss_frames + out.false_alarm_frames +
                                out.confusion_frames) /
            denom;
  return out;
}

void ScoreAccumulator::AddWer(const WerResult& w) {
  wer_edits += w.edits;
  wer_ref_tokens += w.ref_tokens;
}

void ScoreAccumulator::AddCount(int true_count, int predicted_count) {
  if (true_count == predicted_count) ++count_matches;
  ++count_total;
}

void ScoreAccumulator::AddDer(const DerResult& d) {
  der_error_frames += d.miss_frames + d.false_alarm_frames + d.confusion_frames;
  der_miss += d.miss_frames;
  der_fa += d.false_alarm_frames;
  der_conf += d.confusion_frames;
  der_ref_frames += d.ref_speech_frames;
}

double ScoreAccumulator::Wer() const {
  SCSOT_CHECK(wer_ref_tokens > 0, "score: no reference tokens accumulated");
  return static_cast<double>(wer_edits) / static_cast<double>(wer_ref_tokens);
}

double ScoreAccumulator::Sca() const {
  SCSOT_CHECK(count_total > 0, "score: no counts accumulated");
  return static_cast<double>(count_matches) /
         static_cast<double>(count_total);
}

double ScoreAccumulator::Der() const {
  SCSOT_CHECK(der_ref_frames > 0, "score: no reference frames accumulated");
  return static_cast<double>(der_error_frames) /
         static_cast<double>(der_ref_frames);
}

void WriteScoreCsv(const std::string& path, const std::vector<ScoreRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  SCSOT_CHECK(out.good(), "cannot open score file for writing: " + path);
  out << "# wer: minimum-permutation assignment with empty-segment padding\n";
  out << "# der: fixed FIFO column correspondence, no permutation search\n";
  out << "metric,split,value,components\n";
  for (const ScoreRow& r : rows) {
    out << r.metric << ',' << r.split << ','
        << StrPrintf("%.6f", r.value) << ',' << r.components << '\n';
  }
  SCSOT_CHECK(out.good(), "failed writing score file: " + path);
}

}  // namespace scsot
