// scsot/tests/test_diffmath.cc

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
#include "scsot/gradcheck.h"
#include "scsot/parameters.h"
#include "scsot/tape.h"

using namespace scsot;
using scsot::testing::RandTensor;

TEST_CASE("finite differences validate every primitive across seeds") {
  GradCheckOptions opt;
  for (uint64_t seed = 0; seed < 6; ++seed) {
    for (const auto& named : testing::RunOpGradChecks(seed, opt)) {
      INFO("op=", named.name, " seed=", seed, " worst=", named.report.worst);
      CHECK(named.report.ok);
      CHECK(named.report.checked > 0);
    }
  }
}

TEST_CASE("cross entropy gradient matches the softmax-minus-onehot oracle") {
  Rng rng(77);
  int64_t n = 3, v = 5;
  Tensor logits = RandTensor(&rng, {n, v}, 2.0);
  std::vector<int> targets = {4, 0, 2};

  Tape tape(true);
  Value in = tape.Input(logits);
  Value loss = tape.CrossEntropyLogits(in, targets);
  tape.Backward(loss);

  for (int64_t i = 0; i < n; ++i) {
    double m = logits.At(i, 0);
    for (int64_t j = 1; j < v; ++j) m = std::max(m, logits.At(i, j));
    double z = 0.0;
    for (int64_t j = 0; j < v; ++j) z += std::exp(logits.At(i, j) - m);
    for (int64_t j = 0; j < v; ++j) {
      double p = std::exp(logits.At(i, j) - m) / z;
      double expected = (p - (j == targets[i] ? 1.0 : 0.0)) / static_cast<double>(n);
      CHECK(in.Grad().At(i, j) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("softmax rows are normalized and shift invariant") {
  Rng rng(88);
  Tensor x = RandTensor(&rng, {4, 7}, 3.0);
  Tensor shifted = x;
  for (int64_t i = 0; i < 4; ++i) {
    for (int64_t j = 0; j < 7; ++j) shifted.At(i, j) += 11.25;
  }
  Tape tape(false);
  Value y = tape.Softmax(tape.Constant(x), 1);
  Value y2 = tape.Softmax(tape.Constant(shifted), 1);
  for (int64_t i = 0; i < 4; ++i) {
    double s = 0.0;
    for (int64_t j = 0; j < 7; ++j) {
      s += y.Data().At(i, j);
      CHECK(y.Data().At(i, j) == doctest::Approx(y2.Data().At(i, j)).epsilon(1e-12));
      CHECK(y.Data().At(i, j) > 0.0);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("bce matches hand-computed value and clamps extreme probabilities") {
  Tensor probs({4});
  probs.At(0) = 0.9;
  probs.At(1) = 0.1;
  probs.At(2) = 0.0;  // clamped to eps
  probs.At(3) = 1.0;  // clamped to 1-eps
  Tensor targets({4});
  targets.At(0) = 1.0;
  targets.At(1) = 0.0;
  targets.At(2) = 1.0;
  targets.At(3) = 0.0;
  const double eps = 1e-7;
  double expected = (-std::log(0.9) - std::log(0.9) - std::log(eps) -
                     std::log(eps)) /
                    4.0;
  Tape tape(true);
  Value in = tape.Input(probs);
  Value loss = tape.BinaryCrossEntropy(in, targets);
  CHECK(loss.Data().At(0) == doctest::Approx(expected).epsilon(1e-9));
  tape.Backward(loss);
  // Clamped entries sit on a flat region and get no gradient.
  CHECK(in.Grad().At(2) == 0.0);
  CHECK(in.Grad().At(3) == 0.0);
  CHECK(in.Grad().At(0) != 0.0);
}

TEST_CASE("parameter leaves accumulate gradients through the store") {
  ParameterStore store(1234);
  Parameter* w1 = store.Create("w1", {3, 4}, InitScheme::kMatrixUniform);
  Parameter* b1 = store.Create("b1", {4}, InitScheme::kZeros);
  Parameter* w2 = store.Create("w2", {4, 1}, InitScheme::kMatrixUniform);
  Rng rng(55);
  Tensor x = RandTensor(&rng, {2, 3});

  auto fn = [&](Tape* t) {
    Value h = t->Gelu(t->Add(t->MatMul(t->Input(x), t->Param(w1)), t->Param(b1)));
    return t->Mean(t->MatMul(h, t->Param(w2)));
  };

  GradCheckOptions opt;
  GradCheckReport report = GradCheckParams(&store, fn, opt);
  INFO(report.worst);
  CHECK(report.ok);
  CHECK(report.checked == store.TotalElements());

  // Same parameter used twice in one graph accumulates both contributions.
  store.ZeroGrads();
  auto fn2 = [&](Tape* t) {
    Value w = t->Param(w2);  // [4,1]
    return t->Sum(t->Mul(w, w));
  };
  GradCheckReport r2 = GradCheckParams(
      &store, fn2, GradCheckOptions{.step = 1e-5, .tol = 1e-4});
  INFO(r2.worst);
  CHECK(r2.ok);
}

TEST_CASE("backward is idempotent across separate tapes") {
  Rng rng(66);
  Tensor x = RandTensor(&rng, {2, 2});
  Tensor g1, g2;
  for (int round = 0; round < 2; ++round) {
    Tape tape(true);
    Value in = tape.Input(x);
    Value loss = tape.Mean(tape.Mul(in, in));
    tape.Backward(loss);
    (round == 0 ? g1 : g2) = in.Grad();
  }
  for (int64_t i = 0; i < g1.NumElements(); ++i) CHECK(g1.At(i) == g2.At(i));
}

TEST_CASE("grad-disabled tape still computes forward values") {
  Tape tape(false);
  Value a = tape.Input(Tensor::Full({2, 2}, 3.0));
  Value s = tape.Sum(a);
  CHECK(s.Data().At(0) == doctest::Approx(12.0));
  CHECK_THROWS(tape.Backward(s));
}

TEST_CASE("checkpoint round-trip preserves bits") {
  ParameterStore store(42);
  store.Create("enc.w", {5, 3}, InitScheme::kMatrixUniform);
  store.Create("enc.b", {3}, InitScheme::kZeros);
  store.Create("ln.g", {3}, InitScheme::kOnes);
  std::string path = "/tmp/scsot_test_ckpt.bin";
  SaveCheckpoint(path, store);

  ParameterStore loaded(43);  // different seed, different init
  loaded.Create("enc.w", {5, 3}, InitScheme::kMatrixUniform);
  loaded.Create("enc.b", {3}, InitScheme::kZeros);
  loaded.Create("ln.g", {3}, InitScheme::kOnes);
  LoadCheckpoint(path, &loaded);
  for (size_t i = 0; i < store.All().size(); ++i) {
    const Tensor& a = store.All()[i]->value;
    const Tensor& b = loaded.All()[i]->value;
    REQUIRE(a.SameShape(b));
    for (int64_t j = 0; j < a.NumElements(); ++j) CHECK(a.At(j) == b.At(j));
  }

  ParameterStore wrong(44);
  wrong.Create("enc.w", {5, 3}, InitScheme::kMatrixUniform);
  CHECK_THROWS(LoadCheckpoint(path, &wrong));  // unconsumed records
}

TEST_CASE("identical seeds give identical initialization") {
  ParameterStore a(7), b(7), c(8);
  for (ParameterStore* s : {&a, &b, &c}) {
    s->Create("w", {4, 4}, InitScheme::kMatrixUniform);
    s->Create("u", {2, 8}, InitScheme::kMatrixUniform);
  }
  bool same_ab = true, same_ac = true;
  for (size_t k = 0; k < 2; ++k) {
    const Tensor& ta = a.All()[k]->value;
    for (int64_t i = 0; i < ta.NumElements(); ++i) {
      same_ab = same_ab && (ta.At(i) == b.All()[k]->value.At(i));
      same_ac = same_ac && (ta.At(i) == c.All()[k]->value.At(i));
    }
  }
  CHECK(same_ab);
  CHECK(!same_ac);
}
