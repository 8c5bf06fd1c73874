// scsot/tests/test_metrics.cc

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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "metric_oracles.h"
#include "scsot/common.h"
#include "scsot/metrics.h"
#include "scsot/rng.h"

using namespace scsot;
using namespace scsot::testing;

namespace {

std::vector<int> RandTokens(Rng* rng, int max_len, int vocab) {
  int len = static_cast<int>(rng->UniformInt(0, max_len));
  std::vector<int> out;
  for (int i = 0; i < len; ++i) {
    out.push_back(static_cast<int>(rng->UniformInt(0, vocab - 1)));
  }
  return out;
}

}  // namespace

TEST_CASE("edit distance on hand examples") {
  CHECK(EditDistance({}, {}) == 0);
  CHECK(EditDistance({1, 2, 3}, {1, 2, 3}) == 0);
  CHECK(EditDistance({1, 2, 3}, {1, 9, 3}) == 1);
  CHECK(EditDistance({1, 2, 3}, {}) == 3);
  CHECK(EditDistance({}, {4, 5}) == 2);
  CHECK(EditDistance({1, 2, 3, 4}, {2, 3, 4, 5}) == 2);
  CHECK(EditDistance({7}, {7, 7, 7}) == 2);
}

TEST_CASE("edit distance matches full-matrix oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> a = RandTokens(&rng, 12, 5);
    std::vector<int> b = RandTokens(&rng, 12, 5);
    CHECK(EditDistance(a, b) == SlowEdit(a, b));
  }
}

TEST_CASE("wer hand examples") {
  WerResult same = Wer({{1, 2}, {3}}, {{1, 2}, {3}});
  CHECK(same.edits == 0);
  CHECK(same.ref_tokens == 3);
  CHECK(same.wer == 0.0);
  CHECK(same.assignment == std::vector<int>{0, 1});

  WerResult sub = Wer({{1, 2, 3}}, {{1, 9, 3}});
  CHECK(sub.edits == 1);
  CHECK(sub.wer == doctest::Approx(1.0 / 3.0));

  // Swapped speaker order scores zero under the assignment search.
  WerResult swapped = Wer({{1, 2}, {3}}, {{3}, {1, 2}});
  CHECK(swapped.edits == 0);
  CHECK(swapped.wer == 0.0);
  CHECK(swapped.assignment == std::vector<int>{1, 0});
}

TEST_CASE("wer pads the shorter side with empty segments") {
  // Missing hypothesis speaker: all reference tokens are deletions.
  WerResult missing = Wer({{1, 2}, {3, 4, 5}}, {{1, 2}});
  CHECK(missing.edits == 3);
  CHECK(missing.wer == doctest::Approx(0.6));
  CHECK(missing.assignment.size() == 2);
  CHECK(missing.assignment[0] == 0);
  CHECK(missing.assignment[1] == -1);

  // Extra hypothesis speaker: its tokens are insertions.
  WerResult extra = Wer({{1, 2}}, {{1, 2}, {9}});
  CHECK(extra.edits == 1);
  CHECK(extra.wer == doctest::Approx(0.5));
  CHECK(extra.assignment == std::vector<int>{0});

  WerResult empty_hyp = Wer({{1, 2, 3}}, {});
  CHECK(empty_hyp.edits == 3);
  CHECK(empty_hyp.wer == 1.0);
}

TEST_CASE("wer rejects empty references") {
  CHECK_THROWS_AS(Wer({}, {{1}}), Error);
  CHECK_THROWS_AS(Wer({{}, {}}, {{1}}), Error);
}

TEST_CASE("wer matches recursive assignment oracle") {
  Rng rng(23);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    int nr = static_cast<int>(rng.UniformInt(1, 5));
    int nh = static_cast<int>(rng.UniformInt(0, 6));
    std::vector<std::vector<int>> ref, hyp;
    int64_t ref_tokens = 0;
    for (int i = 0; i < nr; ++i) {
      ref.push_back(RandTokens(&rng, 6, 4));
      ref_tokens += static_cast<int64_t>(ref.back().size());
    }
    for (int j = 0; j < nh; ++j) hyp.push_back(RandTokens(&rng, 6, 4));
    if (ref_tokens == 0) continue;
    WerResult got = Wer(ref, hyp);
    int64_t want = SlowWerEdits(ref, hyp);
    CHECK(got.edits == want);
    CHECK(got.ref_tokens == ref_tokens);
    CHECK(got.wer ==
          doctest::Approx(static_cast<double>(want) /
                          static_cast<double>(ref_tokens)));

    // The search can never do worse than the identity pairing.
    size_t n = std::max(ref.size(), hyp.size());
    std::vector<std::vector<int>> rp(ref), hp(hyp);
    rp.resize(n);
    hp.resize(n);
    int64_t identity = 0;
    for (size_t i = 0; i < n; ++i) identity += SlowEdit(rp[i], hp[i]);
    CHECK(got.edits <= identity);
    ++checked;
  }
  CHECK(checked >= 250);
}

TEST_CASE("wer stays fast when a hypothesis splinters into many segments") {
  // Degenerate decodes can emit dozens of separator tokens.  The assignment
  // has to stay polynomial, and with junk segments drawn from a token the
  // references never use, the optimum is exactly one insertion per junk
  // token: total edits can never drop below the hypothesis token surplus.
  std::vector<std::vector<int>> ref = {{1, 2, 3}, {4, 5}};
  std::vector<std::vector<int>> hyp = ref;
  for (int j = 0; j < 40; ++j) hyp.push_back({99});
  WerResult got = Wer(ref, hyp);
  CHECK(got.edits == 40);
  CHECK(got.assignment == std::vector<int>{0, 1});
}

TEST_CASE("wer assignment indices rescore to the reported edit count") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<int>> ref, hyp;
    int nr = static_cast<int>(rng.UniformInt(1, 3));
    int nh = static_cast<int>(rng.UniformInt(1, 3));
    bool any = false;
    for (int i = 0; i < nr; ++i) {
      ref.push_back(RandTokens(&rng, 5, 3));
      any = any || !ref.back().empty();
    }
    for (int j = 0; j < nh; ++j) hyp.push_back(RandTokens(&rng, 5, 3));
    if (!any) continue;
    WerResult got = Wer(ref, hyp);

    // Edits implied by the assignment: matched pairs by edit distance,
    // unmatched reference tokens as deletions, unmatched hypothesis
    // segments as pure insertions.
    std::vector<bool> hyp_used(hyp.size(), false);
    int64_t edits = 0;
    for (size_t i = 0; i < ref.size(); ++i) {
      int j = got.assignment[i];
      if (j < 0) {
        edits += static_cast<int64_t>(ref[i].size());
      } else {
        hyp_used[static_cast<size_t>(j)] = true;
        edits += SlowEdit(ref[i], hyp[static_cast<size_t>(j)]);
      }
    }
    for (size_t j = 0; j < hyp.size(); ++j) {
      if (!hyp_used[j]) edits += static_cast<int64_t>(hyp[j].size());
    }
    CHECK(edits == got.edits);
  }
}

TEST_CASE("sca counts exact matches") {
  CHECK(Sca({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(Sca({1, 2, 3, 2}, {1, 2, 2, 2}) == doctest::Approx(0.75));
  CHECK(Sca({2}, {3}) == 0.0);
  CHECK_THROWS_AS(Sca({}, {}), Error);
  CHECK_THROWS_AS(Sca({1, 2}, {1}), Error);
}

namespace {

Tensor MatrixOf(const std::vector<std::vector<double>>& rows) {
  int64_t t = static_cast<int64_t>(rows.size());
  int64_t s = static_cast<int64_t>(rows[0].size());
  Tensor m({t, s});
  for (int64_t i = 0; i < t; ++i) {
    for (int64_t j = 0; j < s; ++j) m.At(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  return m;
}

// [T, S] binary labels with a guaranteed long run in column 0 so the
// filtered reference always keeps speech frames.
Tensor RandLabels(Rng* rng, int64_t frames, int64_t cols) {
  Tensor m({frames, cols});
  for (int64_t t = 0; t < frames; ++t) {
    for (int64_t s = 0; s < cols; ++s) {
      m.At(t, s) = rng->UniformInt(0, 1) ? 1.0 : 0.0;
    }
  }
  for (int64_t t = 4; t < std::min<int64_t>(frames, 28); ++t) m.At(t, 0) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("der of a perfect prediction is exactly zero") {
  Rng rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    int64_t frames = rng.UniformInt(30, 70);
    int64_t cols = rng.UniformInt(1, 3);
    Tensor ref = RandLabels(&rng, frames, cols);
    DerResult d = Der(ref, ref);
    CHECK(d.miss_frames == 0);
    CHECK(d.false_alarm_frames == 0);
    CHECK(d.confusion_frames == 0);
    CHECK(d.der == 0.0);
    CHECK(d.ref_speech_frames > 0);
  }
}

TEST_CASE("der hand examples") {
  // 40 frames, one always-active reference speaker, silent hypothesis:
  // everything is a miss.
  std::vector<std::vector<double>> on(40, {1.0}), off(40, {0.0});
  DerResult miss = Der(MatrixOf(on), MatrixOf(off));
  CHECK(miss.ref_speech_frames == 40);
  CHECK(miss.miss_frames == 40);
  CHECK(miss.false_alarm_frames == 0);
  CHECK(miss.confusion_frames == 0);
  CHECK(miss.der == 1.0);

  // Speaker in the wrong column is pure confusion under the fixed
  // correspondence.
  std::vector<std::vector<double>> ref_col0(40, {1.0, 0.0});
  std::vector<std::vector<double>> hyp_col1(40, {0.0, 1.0});
  DerResult conf = Der(MatrixOf(ref_col0), MatrixOf(hyp_col1));
  CHECK(conf.miss_frames == 0);
  CHECK(conf.false_alarm_frames == 0);
  CHECK(conf.confusion_frames == 40);
  CHECK(conf.der == 1.0);

  // Extra hypothesis column is a false alarm; DER may exceed 1.
  std::vector<std::vector<double>> hyp_both(40, {1.0, 1.0});
  DerResult fa = Der(MatrixOf(ref_col0), MatrixOf(hyp_both));
  CHECK(fa.miss_frames == 0);
  CHECK(fa.false_alarm_frames == 40);
  CHECK(fa.confusion_frames == 0);
  CHECK(fa.der == 1.0);

  // Narrower hypothesis matrix behaves as silence in the missing column.
  std::vector<std::vector<double>> ref_two(40, {1.0, 1.0});
  std::vector<std::vector<double>> hyp_one(40, {1.0});
  DerResult pad = Der(MatrixOf(ref_two), MatrixOf(hyp_one));
  CHECK(pad.ref_speech_frames == 80);
  CHECK(pad.miss_frames == 40);
  CHECK(pad.der == 0.5);
}

TEST_CASE("der filters out short spurious runs on both sides") {
  // A 3-frame blip in an otherwise silent hypothesis track disappears
  // under the width-11 filter, so the score stays clean.
  std::vector<std::vector<double>> ref(50, {1.0}), hyp(50, {1.0});
  Tensor h = MatrixOf(hyp);
  Tensor r = MatrixOf(ref);
  Tensor h2({50, 2});
  for (int64_t t = 0; t < 50; ++t) {
    h2.At(t, 0) = 1.0;
    h2.At(t, 1) = (t >= 20 && t < 23) ? 0.9 : 0.0;
  }
  DerResult d = Der(r, h2);
  CHECK(d.false_alarm_frames == 0);
  CHECK(d.der == 0.0);
  DerResult base = Der(r, h);
  CHECK(base.der == 0.0);
}

TEST_CASE("der matches the brute-force counter") {
  Rng rng(53);
  int checked = 0;
  for (int trial = 0; trial < 250; ++trial) {
    int64_t frames = rng.UniformInt(30, 80);
    int64_t ref_cols = rng.UniformInt(1, 3);
    int64_t hyp_cols = rng.UniformInt(1, 4);
    Tensor ref = RandLabels(&rng, frames, ref_cols);
    Tensor hyp({frames, hyp_cols});
    for (int64_t t = 0; t < frames; ++t) {
      for (int64_t s = 0; s < hyp_cols; ++s) hyp.At(t, s) = rng.Uniform();
    }
    SlowDer want = SlowDerCount(ref, hyp, 0.5, 11);
    if (want.ref_speech == 0) continue;
    DerResult got = Der(ref, hyp);
    CHECK(got.miss_frames == want.miss);
    CHECK(got.false_alarm_frames == want.fa);
    CHECK(got.confusion_frames == want.conf);
    CHECK(got.ref_speech_frames == want.ref_speech);
    double denom = static_cast<double>(want.ref_speech);
    CHECK(got.der == doctest::Approx(
                         static_cast<double>(want.miss + want.fa + want.conf) /
                         denom));
    CHECK(got.der ==
          doctest::Approx(got.miss + got.false_alarm + got.confusion));
    ++checked;
  }
  CHECK(checked >= 200);
}

TEST_CASE("der input validation") {
  std::vector<std::vector<double>> on(40, {1.0});
  Tensor good = MatrixOf(on);
  Tensor vec({40});
  CHECK_THROWS_AS(Der(vec, good), Error);
  Tensor short_hyp({20, 1});
  CHECK_THROWS_AS(Der(good, short_hyp), Error);
  std::vector<std::vector<double>> silent(40, {0.0});
  CHECK_THROWS_AS(Der(MatrixOf(silent), good), Error);
}

TEST_CASE("accumulator pools numerators before dividing") {
  // Two utterances with different sizes: pooled scores differ from the
  // mean of per-utterance rates.
  ScoreAccumulator acc;
  WerResult a = Wer({{1, 2, 3, 4, 5, 6, 7, 8}}, {{1, 2, 3, 4, 5, 6, 7, 8}});
  WerResult b = Wer({{1, 2}}, {{9, 9}});
  acc.AddWer(a);
  acc.AddWer(b);
  CHECK(acc.Wer() == doctest::Approx(2.0 / 10.0));

  acc.AddCount(2, 2);
  acc.AddCount(3, 2);
  acc.AddCount(1, 1);
  CHECK(acc.Sca() == doctest::Approx(2.0 / 3.0));

  std::vector<std::vector<double>> on(40, {1.0}), off(40, {0.0});
  DerResult d1 = Der(MatrixOf(on), MatrixOf(on));
  DerResult d2 = Der(MatrixOf(on), MatrixOf(off));
  acc.AddDer(d1);
  acc.AddDer(d2);
  CHECK(acc.Der() == doctest::Approx(40.0 / 80.0));

  ScoreAccumulator empty;
  CHECK_THROWS_AS(empty.Wer(), Error);
  CHECK_THROWS_AS(empty.Sca(), Error);
  CHECK_THROWS_AS(empty.Der(), Error);
}

TEST_CASE("score csv layout") {
  std::string path = "/tmp/scsot_scores_test.csv";
  WriteScoreCsv(path, {{"wer", "test", 0.125, "edits=2;ref_tokens=16"},
                       {"der", "test", 0.0, ""}});
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("#", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("#", 0) == 0);
  std::getline(in, line);
  CHECK(line == "metric,split,value,components");
  std::getline(in, line);
  CHECK(line == "wer,test,0.125000,edits=2;ref_tokens=16");
  std::getline(in, line);
  CHECK(line == "der,test,0.000000,");
  std::remove(path.c_str());
}
