// scsot/tests/test_asr_model.cc

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

#include "gradcheck_cases.h"
#include "scsot/asr_model.h"
#include "scsot/gradcheck.h"
#include "scsot/serialize.h"

using namespace scsot;
using scsot::testing::RandTensor;

namespace {

EncoderConfig TinyEncoder() {
  EncoderConfig cfg;
  cfg.layers = 1;
  cfg.heads = 2;
  cfg.hidden = 8;
  cfg.ffn = 12;
  cfg.conv_kernel = 3;
  cfg.subsample = 2;
  return cfg;
}

DecoderConfig TinyDecoder(bool spk, bool penalty) {
  DecoderConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.hidden = 8;
  cfg.ffn = 12;
  cfg.attractor_dim = 4;
  cfg.use_speaker_emb = spk;
  cfg.use_activity_penalty = penalty;
  return cfg;
}

// 2-speaker toy target: 6 positions [t2,t3,SC,t1,t4,EOS] over vocab 5+3.
SerializedTarget ToyTarget(const TokenVocab& vocab) {
  return SerializeFifo({{2, 3}, {1, 4}}, {0, 7}, TerminalMode::kEosTerminal,
                       vocab);
}

std::vector<double> SoftmaxRow(const std::vector<double>& logits) {
  double m = logits[0];
  for (double v : logits) m = std::max(m, v);
  double z = 0.0;
  std::vector<double> out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

}  // namespace

TEST_CASE("penalty matches the stated example row exactly") {
  // dk = 1 with q = [1] turns k into the raw scaled logits [2, 1, 0].
  Tape tape(false);
  Tensor q({1, 1});
  q.At(0) = 1.0;
  Tensor k({3, 1});
  k.At(0) = 2.0;
  k.At(1) = 1.0;
  k.At(2) = 0.0;
  Rng vrng(4);
  Tensor v = RandTensor(&vrng, {3, 1});
  Tensor p({3});
  p.At(0) = 0.9;
  p.At(1) = 0.2;
  p.At(2) = 0.6;
  PenalizedAttentionResult res = PenalizedSourceTargetAttention(
      &tape, tape.Constant(q), tape.Constant(k), tape.Constant(v), p, 50.0,
      0.5, true);
  // Penalized logits must be [2, -49, 0].
  std::vector<double> expected = SoftmaxRow({2.0, -49.0, 0.0});
  for (int64_t t = 0; t < 3; ++t) {
    CHECK(res.attention.Data().At(0, t) ==
          doctest::Approx(expected[static_cast<size_t>(t)]).epsilon(1e-12));
  }
}

TEST_CASE("all-active activity leaves attention bit-identical") {
  Rng rng(5);
  Tape tape(false);
  Value q = tape.Constant(RandTensor(&rng, {4, 3}));
  Value k = tape.Constant(RandTensor(&rng, {6, 3}));
  Value v = tape.Constant(RandTensor(&rng, {6, 3}));
  Tensor p({6});
  for (int64_t t = 0; t < 6; ++t) p.At(t) = 0.5 + 0.08 * static_cast<double>(t);
  PenalizedAttentionResult on =
      PenalizedSourceTargetAttention(&tape, q, k, v, p, 50.0, 0.5, true);
  PenalizedAttentionResult off =
      PenalizedSourceTargetAttention(&tape, q, k, v, p, 50.0, 0.5, false);
  for (int64_t i = 0; i < on.attention.Data().NumElements(); ++i) {
    CHECK(on.attention.Data().At(i) == off.attention.Data().At(i));
  }
  for (int64_t i = 0; i < on.context.Data().NumElements(); ++i) {
    CHECK(on.context.Data().At(i) == off.context.Data().At(i));
  }
}

TEST_CASE("uniform penalty cancels in the softmax") {
  Rng rng(6);
  Tape tape(false);
  Value q = tape.Constant(RandTensor(&rng, {3, 4}));
  Value k = tape.Constant(RandTensor(&rng, {5, 4}));
  Value v = tape.Constant(RandTensor(&rng, {5, 4}));
  Tensor p = Tensor::Zeros({5});  // every frame below theta
  PenalizedAttentionResult on =
      PenalizedSourceTargetAttention(&tape, q, k, v, p, 50.0, 0.5, true);
  PenalizedAttentionResult off =
      PenalizedSourceTargetAttention(&tape, q, k, v, p, 50.0, 0.5, false);
  for (int64_t i = 0; i < on.attention.Data().NumElements(); ++i) {
    CHECK(std::fabs(on.attention.Data().At(i) - off.attention.Data().At(i)) <=
          1e-9);
  }
}

TEST_CASE("penalized frames get negligible attention mass") {
  Rng rng(7);
  Tape tape(false);
  Value q = tape.Constant(RandTensor(&rng, {2, 4}));
  Value k = tape.Constant(RandTensor(&rng, {6, 4}));
  Value v = tape.Constant(RandTensor(&rng, {6, 4}));
  Tensor p({6});
  for (int64_t t = 0; t < 6; ++t) p.At(t) = (t % 2 == 0) ? 0.9 : 0.1;
  PenalizedAttentionResult on =
      PenalizedSourceTargetAttention(&tape, q, k, v, p, 50.0, 0.5, true);
  PenalizedAttentionResult off =
      PenalizedSourceTargetAttention(&tape, q, k, v, p, 50.0, 0.5, false);
  for (int64_t i = 0; i < 2; ++i) {
    for (int64_t t = 1; t < 6; t += 2) {
      CHECK(on.attention.Data().At(i, t) <= off.attention.Data().At(i, t));
      CHECK(on.attention.Data().At(i, t) < 1e-20);
    }
  }
}

TEST_CASE("encoder output frame count is ceil(T/r)") {
  ParameterStore store(1);
  ConformerEncoder enc(&store, TinyEncoder(), 3, "enc");
  Rng rng(8);
  {
    Tape tape(false);
    Value out = enc.Forward(&tape, RandTensor(&rng, {90, 3}));
    CHECK(out.Data().Dim(0) == 45);
    CHECK(out.Data().Dim(1) == 8);
  }
  {
    Tape tape(false);
    Value out = enc.Forward(&tape, RandTensor(&rng, {91, 3}));
    CHECK(out.Data().Dim(0) == 46);
  }
  {
    Tape tape(false);
    CHECK_THROWS(enc.Forward(&tape, RandTensor(&rng, {1, 3})));
  }
  {
    Tape tape(false);
    Value out = enc.Forward(&tape, Tensor::Zeros({12, 3}));
    CHECK(out.Data().AllFinite());
  }
}

TEST_CASE("one encoder layer gradchecks below 1e-4") {
  EncoderConfig cfg = TinyEncoder();
  cfg.hidden = 6;
  cfg.ffn = 8;
  cfg.heads = 2;
  ParameterStore store(21);
  ConformerEncoder enc(&store, cfg, 2, "enc");
  Rng rng(22);
  Tensor features = RandTensor(&rng, {8, 2});
  Tensor w = RandTensor(&rng, {4, 6});
  auto fn = [&](Tape* t) {
    return t->Sum(t->Mul(enc.Forward(t, features), t->Constant(w)));
  };
  GradCheckOptions opt;
  opt.max_elements_per_tensor = 6;
  opt.seed = 3;
  GradCheckReport report = GradCheckParams(&store, fn, opt);
  INFO(report.worst);
  CHECK(report.ok);
}

TEST_CASE("conditioned ffn applies the attractor only in the first layer") {
  TokenVocab vocab = TokenVocab::Make(5);
  ParameterStore store(31);
  AsrDecoder dec(&store, TinyDecoder(true, false), vocab.TotalSize(), "dec");
  Rng rng(32);
  Tensor z = RandTensor(&rng, {3, 8});
  Tensor attr_a = RandTensor(&rng, {2, 4});
  Tensor attr_b = RandTensor(&rng, {2, 4});
  std::vector<int> spk = {0, 0, 1};

  Tape tape(false);
  Value zv = tape.Constant(z);
  Value a = tape.Constant(attr_a);
  Value b = tape.Constant(attr_b);

  // Layer 1 (second layer): attractor identity has no effect, bit-for-bit.
  Value l1_a = dec.ConditionedFfn(&tape, zv, 1, a, spk);
  Value l1_b = dec.ConditionedFfn(&tape, zv, 1, b, spk);
  for (int64_t i = 0; i < l1_a.Data().NumElements(); ++i) {
    CHECK(l1_a.Data().At(i) == l1_b.Data().At(i));
  }

  // Layer 0: distinct attractors give distinct outputs.
  Value l0_a = dec.ConditionedFfn(&tape, zv, 0, a, spk);
  Value l0_b = dec.ConditionedFfn(&tape, zv, 0, b, spk);
  double diff = 0.0;
  for (int64_t i = 0; i < l0_a.Data().NumElements(); ++i) {
    diff += std::fabs(l0_a.Data().At(i) - l0_b.Data().At(i));
  }
  CHECK(diff > 1e-6);

  // Zero spk_w restores the unconditioned FFN exactly.
  Parameter* spk_w = store.Find("dec.spk_w");
  REQUIRE(spk_w != nullptr);
  Tensor saved = spk_w->value;
  spk_w->value = Tensor::Zeros(spk_w->value.Shape());
  Tape tape2(false);
  Value cond = dec.ConditionedFfn(&tape2, tape2.Constant(z), 0,
                                  tape2.Constant(attr_a), spk);
  Value plain = dec.ConditionedFfn(&tape2, tape2.Constant(z), 0, std::nullopt,
                                   spk);
  for (int64_t i = 0; i < cond.Data().NumElements(); ++i) {
    CHECK(cond.Data().At(i) == plain.Data().At(i));
  }
  spk_w->value = saved;
}

TEST_CASE("conditioning flags off reproduce the plain SOT forward bitwise") {
  TokenVocab vocab = TokenVocab::Make(5);
  SerializedTarget target = ToyTarget(vocab);
  Rng rng(41);
  Tensor features = RandTensor(&rng, {14, 3});
  Tensor attractors = RandTensor(&rng, {2, 4});
  Tensor activity({7, 2});
  for (int64_t i = 0; i < activity.NumElements(); ++i) {
    activity.At(i) = (i % 3 == 0) ? 0.1 : 0.9;
  }

  auto run = [&](bool spk, bool pen, bool supply_conditioning,
                 const Tensor* act) {
    ParameterStore store(77);  // same seed everywhere: identical parameters
    ConformerEncoder enc(&store, TinyEncoder(), 3, "enc");
    AsrDecoder dec(&store, TinyDecoder(spk, pen), vocab.TotalSize(), "dec");
    Tape tape(false);
    Value enc_out = enc.Forward(&tape, features);
    std::optional<Value> attr;
    if (supply_conditioning) attr = tape.Constant(attractors);
    AsrDecoder::ForwardResult res = dec.ForwardTeacherForced(
        &tape, enc_out, target, attr, act ? *act : Tensor());
    return res.logits.Data();
  };

  Tensor base = run(false, false, false, nullptr);
  // Supplying conditioning inputs while the flags are off changes nothing.
  Tensor gated = run(false, false, true, &activity);
  REQUIRE(base.SameShape(gated));
  for (int64_t i = 0; i < base.NumElements(); ++i) {
    CHECK(base.At(i) == gated.At(i));
  }

  // Penalty enabled but every frame active: identical logits bit-for-bit.
  Tensor all_active = Tensor::Full({7, 2}, 1.0);
  Tensor pen_on = run(false, true, true, &all_active);
  for (int64_t i = 0; i < base.NumElements(); ++i) {
    CHECK(base.At(i) == pen_on.At(i));
  }

  // Speaker conditioning with a zeroed projection: equal values.
  ParameterStore store(77);
  ConformerEncoder enc(&store, TinyEncoder(), 3, "enc");
  AsrDecoder dec(&store, TinyDecoder(true, false), vocab.TotalSize(), "dec");
  store.Find("dec.spk_w")->value = Tensor::Zeros({4, 8});
  Tape tape(false);
  AsrDecoder::ForwardResult res = dec.ForwardTeacherForced(
      &tape, enc.Forward(&tape, features), target, tape.Constant(attractors),
      Tensor());
  for (int64_t i = 0; i < base.NumElements(); ++i) {
    CHECK(base.At(i) == res.logits.Data().At(i));
  }
}

TEST_CASE("teacher-forced sc-sot forward gradchecks below 1e-4") {
  TokenVocab vocab = TokenVocab::Make(5);
  SerializedTarget target = ToyTarget(vocab);
  EncoderConfig ecfg = TinyEncoder();
  ecfg.hidden = 6;
  ecfg.ffn = 8;
  DecoderConfig dcfg = TinyDecoder(true, true);
  dcfg.layers = 2;
  dcfg.hidden = 6;
  dcfg.ffn = 8;
  dcfg.attractor_dim = 3;
  ParameterStore store(51);
  ConformerEncoder enc(&store, ecfg, 2, "enc");
  AsrDecoder dec(&store, dcfg, vocab.TotalSize(), "dec");
  Rng rng(52);
  Tensor features = RandTensor(&rng, {10, 2});
  Tensor attractors = RandTensor(&rng, {2, 3});
  Tensor activity({5, 2});  // oracle-style 0/1, far from theta
  for (int64_t t = 0; t < 5; ++t) {
    activity.At(t, 0) = (t < 4) ? 1.0 : 0.0;
    activity.At(t, 1) = (t >= 2) ? 1.0 : 0.0;
  }
  auto fn = [&](Tape* t) {
    Value enc_out = enc.Forward(t, features);
    return dec
        .ForwardTeacherForced(t, enc_out, target, t->Constant(attractors),
                              activity)
        .loss;
  };
  GradCheckOptions opt;
  opt.max_elements_per_tensor = 5;
  opt.seed = 9;
  GradCheckReport report = GradCheckParams(&store, fn, opt);
  INFO(report.worst);
  CHECK(report.ok);
  CHECK(report.checked > 100);
}

TEST_CASE("speaker index beyond the attractor set is rejected") {
  TokenVocab vocab = TokenVocab::Make(5);
  SerializedTarget target = ToyTarget(vocab);  // two speakers
  ParameterStore store(61);
  ConformerEncoder enc(&store, TinyEncoder(), 3, "enc");
  AsrDecoder dec(&store, TinyDecoder(true, false), vocab.TotalSize(), "dec");
  Rng rng(62);
  Tensor features = RandTensor(&rng, {12, 3});
  Tape tape(false);
  Value enc_out = enc.Forward(&tape, features);
  Tensor one_attractor = RandTensor(&rng, {1, 4});
  CHECK_THROWS(dec.ForwardTeacherForced(&tape, enc_out, target,
                                        tape.Constant(one_attractor), Tensor()));
}

TEST_CASE("attention traces normalize, have contract shapes, and replay") {
  TokenVocab vocab = TokenVocab::Make(5);
  SerializedTarget target = ToyTarget(vocab);
  Rng rng(71);
  Tensor features = RandTensor(&rng, {14, 3});
  Tensor attractors = RandTensor(&rng, {2, 4});
  Tensor activity = Tensor::Full({7, 2}, 1.0);

  auto run = [&]() {
    ParameterStore store(81);
    ConformerEncoder enc(&store, TinyEncoder(), 3, "enc");
    AsrDecoder dec(&store, TinyDecoder(true, true), vocab.TotalSize(), "dec");
    std::vector<AttentionTrace> trace;
    Tape tape(false);
    Value enc_out = enc.Forward(&tape, features, &trace);
    dec.ForwardTeacherForced(&tape, enc_out, target, tape.Constant(attractors),
                             activity, &trace);
    return trace;
  };

  std::vector<AttentionTrace> trace = run();
  int n_enc_self = 0, n_dec_self = 0, n_cross = 0;
  for (const AttentionTrace& t : trace) {
    for (int64_t i = 0; i < t.matrix.Dim(0); ++i) {
      double sum = 0.0;
      for (int64_t j = 0; j < t.matrix.Dim(1); ++j) sum += t.matrix.At(i, j);
      CHECK(std::fabs(sum - 1.0) <= 1e-9);
    }
    if (t.type == "encoder_self") {
      CHECK(t.matrix.Dim(0) == 7);
      CHECK(t.matrix.Dim(1) == 7);
      ++n_enc_self;
    } else if (t.type == "decoder_self") {
      CHECK(t.matrix.Dim(0) == 6);
      CHECK(t.matrix.Dim(1) == 6);
      ++n_dec_self;
    } else {
      CHECK(t.type == "source_target");
      CHECK(t.matrix.Dim(0) == 6);
      CHECK(t.matrix.Dim(1) == 7);
      ++n_cross;
    }
  }
  CHECK(n_enc_self == 1 * 2);  // encoder layers x heads
  CHECK(n_dec_self == 2 * 2);
  CHECK(n_cross == 2 * 2);

  // Re-running the identical forward reproduces every matrix bit-for-bit.
  std::vector<AttentionTrace> again = run();
  REQUIRE(again.size() == trace.size());
  for (size_t i = 0; i < trace.size(); ++i) {
    for (int64_t j = 0; j < trace[i].matrix.NumElements(); ++j) {
      CHECK(trace[i].matrix.At(j) == again[i].matrix.At(j));
    }
  }

  // File round-trip.
  WriteAttentionDump("/tmp/scsot_attn.txt", trace);
  std::vector<AttentionTrace> loaded = ReadAttentionDump("/tmp/scsot_attn.txt");
  REQUIRE(loaded.size() == trace.size());
  for (size_t i = 0; i < trace.size(); ++i) {
    CHECK(loaded[i].layer == trace[i].layer);
    CHECK(loaded[i].head == trace[i].head);
    CHECK(loaded[i].type == trace[i].type);
    REQUIRE(loaded[i].matrix.SameShape(trace[i].matrix));
    for (int64_t j = 0; j < trace[i].matrix.NumElements(); ++j) {
      CHECK(loaded[i].matrix.At(j) ==
            doctest::Approx(trace[i].matrix.At(j)).epsilon(1e-10));
    }
  }
}

TEST_CASE("next-token logits agree with the teacher-forced row") {
  TokenVocab vocab = TokenVocab::Make(5);
  SerializedTarget target = ToyTarget(vocab);
  ParameterStore store(91);
  ConformerEncoder enc(&store, TinyEncoder(), 3, "enc");
  AsrDecoder dec(&store, TinyDecoder(true, true), vocab.TotalSize(), "dec");
  Rng rng(92);
  Tensor features = RandTensor(&rng, {14, 3});
  Tensor attractors = RandTensor(&rng, {2, 4});
  Tensor activity({7, 2});
  for (int64_t t = 0; t < 7; ++t) {
    activity.At(t, 0) = (t < 4) ? 1.0 : 0.0;
    activity.At(t, 1) = (t >= 3) ? 1.0 : 0.0;
  }
  Tape tape(false);
  Value enc_out = enc.Forward(&tape, features);
  AsrDecoder::ForwardResult full = dec.ForwardTeacherForced(
      &tape, enc_out, target, tape.Constant(attractors), activity);

  // Causal masking means position n only sees the prefix, so scoring the
  // prefix alone must give the same final row.
  for (size_t n = 0; n < target.tokens.size(); ++n) {
    std::vector<int> prefix(target.tokens.begin(),
                            target.tokens.begin() + static_cast<long>(n));
    std::vector<int> spk(target.speaker_index_per_token.begin(),
                         target.speaker_index_per_token.begin() +
                             static_cast<long>(n) + 1);
    Value step = dec.NextTokenLogits(&tape, enc_out, prefix, spk,
                                     tape.Constant(attractors), activity);
    for (int64_t v = 0; v < step.Data().Dim(1); ++v) {
      CHECK(step.Data().At(0, v) ==
            doctest::Approx(full.logits.Data().At(static_cast<int64_t>(n), v))
                .epsilon(1e-9));
    }
  }
}
