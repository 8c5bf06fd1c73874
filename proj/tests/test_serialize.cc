// scsot/tests/test_serialize.cc

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
#include <numeric>

#include "scsot/rng.h"
#include "scsot/serialize.h"

using namespace scsot;

namespace {

const TokenVocab kVocab = TokenVocab::Make(8);
const int A = 0, B = 1, C = 2;

}  // namespace

TEST_CASE("two-speaker eos_terminal target has the canonical shape") {
  // transcripts {A:[a,b], B:[c]}, starts {10, 40} -> [a,b,SC,c,EOS]
  SerializedTarget t = SerializeFifo({{A, B}, {C}}, {10, 40},
                                     TerminalMode::kEosTerminal, kVocab);
  CHECK(t.tokens == std::vector<int>{A, B, kVocab.Sc(), C, kVocab.Eos()});
  CHECK(t.speaker_index_per_token == std::vector<int>{0, 0, 0, 1, 1});
}

TEST_CASE("single speaker eos_terminal has no SC") {
  SerializedTarget t =
      SerializeFifo({{A, B}}, {5}, TerminalMode::kEosTerminal, kVocab);
  CHECK(t.tokens == std::vector<int>{A, B, kVocab.Eos()});
  CHECK(CountSegments(t.tokens, t.mode, kVocab) == 1);
}

TEST_CASE("three-speaker sc_terminal has exactly three SC and no EOS") {
  SerializedTarget t = SerializeFifo({{A}, {B}, {C}}, {30, 10, 20},
                                     TerminalMode::kScTerminal, kVocab);
  int sc = 0, eos = 0;
  for (int id : t.tokens) {
    sc += (id == kVocab.Sc());
    eos += (id == kVocab.Eos());
  }
  CHECK(sc == 3);
  CHECK(eos == 0);
  // FIFO by start time: speaker 1 (t=10), speaker 2 (t=20), speaker 0 (t=30).
  CHECK(t.tokens == std::vector<int>{B, kVocab.Sc(), C, kVocab.Sc(), A,
                                     kVocab.Sc()});
}

TEST_CASE("equal starts keep ascending speaker index") {
  SerializedTarget t = SerializeFifo({{A}, {B}}, {5, 5},
                                     TerminalMode::kEosTerminal, kVocab);
  CHECK(t.tokens == std::vector<int>{A, kVocab.Sc(), B, kVocab.Eos()});
}

TEST_CASE("fifo_order matches a stable-sort oracle") {
  CHECK(FifoOrder({40, 10}) == std::vector<int>{1, 0});
  CHECK(FifoOrder({5, 5, 1}) == std::vector<int>{2, 0, 1});
  CHECK(FifoOrder({7}) == std::vector<int>{0});

  Rng rng(909);
  for (int trial = 0; trial < 500; ++trial) {
    int n = static_cast<int>(rng.UniformInt(1, 6));
    std::vector<int64_t> starts(static_cast<size_t>(n));
    for (auto& s : starts) s = rng.UniformInt(0, 4);  // many ties
    std::vector<int> oracle(static_cast<size_t>(n));
    std::iota(oracle.begin(), oracle.end(), 0);
    std::stable_sort(oracle.begin(), oracle.end(), [&](int a, int b) {
      return starts[static_cast<size_t>(a)] < starts[static_cast<size_t>(b)];
    });
    CHECK(FifoOrder(starts) == oracle);
  }
}

TEST_CASE("deserialize inverts serialize on random instances") {
  Rng rng(1010);
  for (int trial = 0; trial < 500; ++trial) {
    int n_spk = static_cast<int>(rng.UniformInt(1, 4));
    std::vector<std::vector<int>> transcripts(static_cast<size_t>(n_spk));
    std::vector<int64_t> starts(static_cast<size_t>(n_spk));
    for (int s = 0; s < n_spk; ++s) {
      int len = static_cast<int>(rng.UniformInt(1, 6));
      for (int i = 0; i < len; ++i) {
        transcripts[static_cast<size_t>(s)].push_back(
            static_cast<int>(rng.UniformInt(0, kVocab.num_text - 1)));
      }
      starts[static_cast<size_t>(s)] = rng.UniformInt(0, 100);
    }
    TerminalMode mode = (trial % 2 == 0) ? TerminalMode::kEosTerminal
                                         : TerminalMode::kScTerminal;
    SerializedTarget t = SerializeFifo(transcripts, starts, mode, kVocab);

    std::vector<int> order = FifoOrder(starts);
    std::vector<std::vector<int>> expected;
    for (int idx : order) expected.push_back(transcripts[static_cast<size_t>(idx)]);
    CHECK(Deserialize(t.tokens, mode, kVocab) == expected);
    CHECK(CountSegments(t.tokens, mode, kVocab) == n_spk);

    // speaker_index_per_token is non-decreasing and steps by one after SC.
    int expect_idx = 0;
    bool ok_prop = t.speaker_index_per_token.size() == t.tokens.size();
    for (size_t i = 0; i < t.tokens.size(); ++i) {
      ok_prop = ok_prop && (t.speaker_index_per_token[i] == expect_idx);
      if (t.tokens[i] == kVocab.Sc()) ++expect_idx;
    }
    CHECK(ok_prop);
  }
}

TEST_CASE("deserialize handles malformed and empty-segment sequences") {
  // [a,b,SC,c,EOS] -> {[a,b],[c]}
  CHECK(Deserialize({A, B, kVocab.Sc(), C, kVocab.Eos()},
                    TerminalMode::kEosTerminal, kVocab) ==
        std::vector<std::vector<int>>{{A, B}, {C}});
  // [a,SC,SC] -> {[a],[]}: silent second speaker preserved.
  CHECK(Deserialize({A, kVocab.Sc(), kVocab.Sc()}, TerminalMode::kScTerminal,
                    kVocab) == std::vector<std::vector<int>>{{A}, {}});
  // Tokens after EOS are dropped.
  CHECK(Deserialize({A, kVocab.Eos(), B, kVocab.Sc()},
                    TerminalMode::kEosTerminal, kVocab) ==
        std::vector<std::vector<int>>{{A}});
  // Length-capped tail without terminal still yields the partial segment.
  CHECK(Deserialize({A, kVocab.Sc(), B}, TerminalMode::kEosTerminal, kVocab) ==
        std::vector<std::vector<int>>{{A}, {B}});
  CHECK(Deserialize({A, kVocab.Sc(), B}, TerminalMode::kScTerminal, kVocab) ==
        std::vector<std::vector<int>>{{A}, {B}});
  // Empty hypothesis.
  CHECK(Deserialize({}, TerminalMode::kEosTerminal, kVocab) ==
        std::vector<std::vector<int>>{{}});
  CHECK(Deserialize({}, TerminalMode::kScTerminal, kVocab).empty());
}

TEST_CASE("count_segments follows the mode rule") {
  CHECK(CountSegments({A, kVocab.Sc(), B, kVocab.Eos()},
                      TerminalMode::kEosTerminal, kVocab) == 2);
  CHECK(CountSegments({A, kVocab.Sc(), B, kVocab.Sc()},
                      TerminalMode::kScTerminal, kVocab) == 2);
  CHECK(CountSegments({A, kVocab.Eos()}, TerminalMode::kEosTerminal, kVocab) == 1);
}

TEST_CASE("label-side validation rejects bad input") {
  CHECK_THROWS(SerializeFifo({}, {}, TerminalMode::kEosTerminal, kVocab));
  CHECK_THROWS(SerializeFifo({{}}, {3}, TerminalMode::kEosTerminal, kVocab));
  CHECK_THROWS(SerializeFifo({{kVocab.Eos()}}, {3}, TerminalMode::kEosTerminal,
                             kVocab));
  CHECK_THROWS(SerializeFifo({{A}, {B}}, {3}, TerminalMode::kEosTerminal,
                             kVocab));
}

TEST_CASE("vocabulary file round-trips") {
  std::string path = "/tmp/scsot_test_vocab.tsv";
  kVocab.Save(path);
  TokenVocab loaded = TokenVocab::Load(path);
  CHECK(loaded.num_text == kVocab.num_text);
  CHECK(loaded.surface == kVocab.surface);
  CHECK(loaded.Eos() == kVocab.Eos());
  CHECK(loaded.Sc() == kVocab.Sc());
  CHECK(loaded.Sos() == kVocab.Sos());
}
