// scsot/serialize.h

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

#ifndef SCSOT_SERIALIZE_H_
#define SCSOT_SERIALIZE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace scsot {

// Token id layout: text tokens occupy 0..num_text-1, then EOS, SC, SOS.
// SOS is decoder input only; it never appears in targets and is excluded
// from segment counting.
struct TokenVocab {
  int num_text = 0;
  std::vector<std::string> surface;  // indexed by id, size num_text + 3

  int Eos() const { return num_text; }
  int Sc() const { return num_text + 1; }
  int Sos() const { return num_text + 2; }
  int TotalSize() const { return num_text + 3; }
  bool IsText(int id) const { return id >= 0 && id < num_text; }
  const std::string& SurfaceOf(int id) const;
  int IdOf(const std::string& surface) const;

  // Synthetic vocabulary with surfaces t0..t{n-1} plus <eos>, <sc>, <sos>.
  static TokenVocab Make(int num_text);

  // Line format: "id<TAB>surface<TAB>kind", kind in {text,eos,sc,sos}.
  static TokenVocab Load(const std::string& path);
  void Save(const std::string& path) const;
};

enum class TerminalMode {
  kEosTerminal,  // SC separates speakers, one trailing EOS
  kScTerminal,   // every speaker segment ends with SC, no EOS
};

const char* TerminalModeName(TerminalMode mode);
TerminalMode TerminalModeFromName(const std::string& name);

struct SerializedTarget {
  std::vector<int> tokens;
  TerminalMode mode = TerminalMode::kEosTerminal;
  // speaker_index_per_token[n] == number of SC tokens strictly before n.
  std::vector<int> speaker_index_per_token;
};

// Permutation ordering speakers by (start_frame, speaker index) ascending.
// The same permutation orders ASR targets and diarization label columns.
std::vector<int> FifoOrder(const std::vector<int64_t>& start_frames);

// Serializes per-speaker transcripts in FIFO order.  Transcripts must be
// non-empty and contain only text token ids.
SerializedTarget SerializeFifo(const std::vector<std::vector<int>>& transcripts,
                               const std::vector<int64_t>& start_frames,
                               TerminalMode mode, const TokenVocab& vocab);

// Splits a token sequence back into per-speaker transcripts.  Total on all
// inputs: in eos mode everything after the first EOS is dropped and SC acts
// as a separator; in sc mode SC terminates a segment and an unterminated
// non-empty tail is kept as a final segment.  Empty segments are preserved.
std::vector<std::vector<int>> Deserialize(const std::vector<int>& tokens,
                                          TerminalMode mode,
                                          const TokenVocab& vocab);

// eos mode: (#SC)+1.  sc mode: #SC.
int CountSegments(const std::vector<int>& tokens, TerminalMode mode,
                  const TokenVocab& vocab);

}  // namespace scsot

#endif  // SCSOT_SERIALIZE_H_
