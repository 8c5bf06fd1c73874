// scsot/include/scsot/metrics.h

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

#ifndef SCSOT_METRICS_H_
#define SCSOT_METRICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "scsot/tensor.h"

namespace scsot {

// Levenshtein distance with unit substitution/insertion/deletion costs.
int64_t EditDistance(const std::vector<int>& ref, const std::vector<int>& hyp);

struct WerResult {
  int64_t edits = 0;
  int64_t ref_tokens = 0;
  double wer = 0.0;
  // assignment[r] = hypothesis segment scored against reference r, or -1
  // when reference r was matched with an empty padding segment.
  std::vector<int> assignment;
};

// Multi-talker WER: the shorter side is padded with empty segments, the
// minimum-total-edit assignment of hypothesis segments to reference slots
// is solved exactly, and that edit count is divided by the total reference
// token count.
WerResult Wer(const std::vector<std::vector<int>>& ref,
              const std::vector<std::vector<int>>& hyp);

// Fraction of positions where the counts match exactly.
double Sca(const std::vector<int>& true_counts,
           const std::vector<int>& predicted_counts);

struct DerResult {
  int64_t miss_frames = 0;
  int64_t false_alarm_frames = 0;
  int64_t confusion_frames = 0;
  int64_t ref_speech_frames = 0;
  double der = 0.0;
  double miss = 0.0;
  double false_alarm = 0.0;
  double confusion = 0.0;
};

// Frame-count DER under fixed FIFO column correspondence: both sides are
// binarized at theta and median-filtered per track, then every frame
// contributes miss = max(0, R-H), false alarm = max(0, H-R) and confusion =
// min(R, H) - matched, normalized by total reference speech frames.  A
// hypothesis with fewer columns than the reference is padded with silence;
// extra hypothesis columns count as false alarms.
DerResult Der(const Tensor& ref_labels, const Tensor& hyp_posterior,
              double theta = 0.5, int median_window = 11);

// Accumulates per-utterance numerators and denominators so corpus scores
// weight utterances by their size rather than averaging fractions.
struct ScoreAccumulator {
  int64_t wer_edits = 0;
  int64_t wer_ref_tokens = 0;
  int64_t count_matches = 0;
  int64_t count_total = 0;
  int64_t der_error_frames = 0;
  int64_t der_miss = 0;
  int64_t der_fa = 0;
  int64_t der_conf = 0;
  int64_t der_ref_frames = 0;

  void AddWer(const WerResult& w);
  void AddCount(int true_count, int predicted_count);
  void AddDer(const DerResult& d);

  double Wer() const;
  double Sca() const;
  double Der() const;
};

struct ScoreRow {
  std::string metric;
  std::string split;
  double value = 0.0;
  std::string components;  // "key=value;..." or empty
};

// CSV with header (metric, split, value, components); leading comment lines
// document the WER assignment and DER correspondence conventions.
void WriteScoreCsv(const std::string& path, const std::vector<ScoreRow>& rows);

}  // namespace scsot

#endif  // SCSOT_METRICS_H_
