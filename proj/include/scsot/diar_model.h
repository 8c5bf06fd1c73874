// scsot/diar_model.h

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

#ifndef SCSOT_DIAR_MODEL_H_
#define SCSOT_DIAR_MODEL_H_

#include <optional>
#include <string>
#include <vector>

#include "scsot/asr_model.h"
#include "scsot/parameters.h"
#include "scsot/tape.h"
#include "scsot/tensor.h"

namespace scsot {

struct DiarConfig {
  bool shared_encoder = true;
  // Independent-encoder dimensions; its subsample factor always follows the
  // ASR encoder so activity columns align index-for-index with its frames.
  int layers = 1;
  int heads = 2;
  int hidden = 32;  // frame embedding dim == LSTM hidden == attractor dim
  int ffn = 64;
  int conv_kernel = 7;
  double tau = 0.5;  // existence threshold for speaker counting
  int max_attractors = 4;
  bool shuffle_frames = false;

  void Validate() const;
};

// EEND-EDA-style branch: frame embeddings, LSTM encoder-decoder attractors,
// existence probabilities, activity posteriors, and the FIFO-permuted loss.
class DiarModel {
 public:
  DiarModel(ParameterStore* store, const DiarConfig& config,
            const EncoderConfig& asr_encoder_config, int feature_dim,
            const std::string& prefix);

  // Shared mode projects the ASR encoder output; independent mode runs its
  // own conformer over the raw features at the same frame rate.
  Value Encode(Tape* tape, std::optional<Value> asr_encoder_out,
               const Tensor& features) const;

  struct AttractorSet {
    Value attractors;  // [K, hidden], emission order
    Value existence;   // [K, 1], sigmoid outputs
  };

  // LSTM encoder consumes the frames (optionally in shuffled order), the
  // decoder starts from its final state and turns `num` zero inputs into
  // attractors.
  AttractorSet Attractors(Tape* tape, Value frame_embs, int num,
                          std::optional<uint64_t> shuffle_seed = std::nullopt) const;

  // p[t][s] = sigmoid(e_t . a_s); columns follow the attractor order.
  Value Posterior(Tape* tape, Value frame_embs, Value attractors) const;

  // Mean activity BCE against FIFO-ordered labels plus mean existence BCE
  // against [1,...,1,0]; no permutation search.
  Value Loss(Tape* tape, Value posterior, const Tensor& labels,
             Value existence, int true_num_speakers) const;

  const DiarConfig& config() const { return config_; }

  // A downsampled label frame is active if any covered input frame is.
  static Tensor DownsampleLabels(const Tensor& labels, int subsample);

 private:
  DiarConfig config_;
  std::optional<ConformerEncoder> independent_encoder_;
  Parameter *proj_w_ = nullptr, *proj_b_ = nullptr;
  Parameter *enc_w_ih_, *enc_w_hh_, *enc_b_ih_, *enc_b_hh_;
  Parameter *dec_w_ih_, *dec_w_hh_, *dec_b_ih_, *dec_b_hh_;
  Parameter *exist_w_, *exist_b_;
};

// Leading run of probabilities >= tau; stops at the first one below.
int CountSpeakers(const std::vector<double>& existence_probs, double tau);

// Centered majority vote with edge replication; window must be odd.
std::vector<int> MedianFilter(const std::vector<int>& x, int window);

}  // namespace scsot

#endif  // SCSOT_DIAR_MODEL_H_
