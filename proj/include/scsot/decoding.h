// scsot/include/scsot/decoding.h

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

#ifndef SCSOT_DECODING_H_
#define SCSOT_DECODING_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scsot/serialize.h"
#include "scsot/training.h"

namespace scsot {

enum class Termination { kEos, kCount };
enum class ConditioningSource { kNone, kPredicted, kOracle };
enum class StopReason { kTerminalToken, kCountReached, kLengthCap };

const char* TerminationName(Termination t);
Termination TerminationFromName(const std::string& name);
const char* ConditioningSourceName(ConditioningSource s);
ConditioningSource ConditioningSourceFromName(const std::string& name);
const char* StopReasonName(StopReason r);
StopReason StopReasonFromName(const std::string& name);

struct DecodeConfig {
  int beam = 4;
  int max_len = 64;  // hard cap on emitted tokens
  Termination termination = Termination::kCount;
  ConditioningSource conditioning = ConditioningSource::kPredicted;
  double tau = 0.5;  // existence threshold for speaker counting

  void Validate() const;
};

struct DecodeResult {
  std::vector<int> tokens;
  std::vector<std::vector<int>> transcripts;
  int predicted_speakers = 0;
  double log_prob = 0.0;
  StopReason reason = StopReason::kLengthCap;
  bool count_coerced = false;  // S=0 from counting was lifted to 1
  // Conditioning segment index applied while emitting token n; equals the
  // number of SC tokens emitted strictly before n.
  std::vector<int> speaker_index_trace;
};

// Log-probabilities over the vocabulary for the next position, given the
// emitted prefix and the conditioning index of every input position (SOS
// plus each prefix token).
using StepFn = std::function<std::vector<double>(
    const std::vector<int>& prefix, const std::vector<int>& speaker_indices)>;

// Length-unnormalized log-probability beam search.  SOS is never expanded;
// count mode never emits EOS and finishes a hypothesis at its
// `forced_speakers`-th SC token; eos mode finishes at the first EOS.  Ties
// break toward the lexicographically smaller token sequence, which makes
// beam 1 identical to greedy argmax decoding.
DecodeResult BeamSearch(const StepFn& step, const TokenVocab& vocab,
                        const DecodeConfig& config, int forced_speakers);

// What the decoder is conditioned on, resolved from the requested source.
struct ConditioningInputs {
  std::optional<Tensor> attractors;  // [S, attractor_dim]
  Tensor activity;                   // [T', S]; empty when unused
  std::vector<double> existence;     // EDA probabilities, logged
  int speakers = 0;                  // count used by count termination
  bool count_coerced = false;
};

// predicted: EDA attractors, posterior activity, counted speakers.
// oracle: predicted attractors, oracle activity columns, true count.
// none: conditioning disabled; count still comes from the diar branch.
ConditioningInputs ChooseConditioning(ConditioningSource source,
                                      const ScSotModel& model,
                                      Value asr_encoder_out,
                                      const Mixture& mixture, double tau);

// Full autoregressive decode of one mixture.
DecodeResult Decode(const ScSotModel& model, const Mixture& mixture,
                    const DecodeConfig& config);

struct HypothesisRecord {
  std::string utt_id;
  StopReason reason = StopReason::kLengthCap;
  int predicted_speakers = 0;
  std::vector<std::vector<int>> transcripts;
};

// Line format: utt_id, reason, S, and the per-speaker transcripts joined by
// " | " with space-separated token surfaces, tab-delimited.
void WriteHypothesisFile(const std::string& path,
                         const std::vector<HypothesisRecord>& records,
                         const TokenVocab& vocab);
std::vector<HypothesisRecord> ReadHypothesisFile(const std::string& path,
                                                 const TokenVocab& vocab);

}  // namespace scsot

#endif  // SCSOT_DECODING_H_
