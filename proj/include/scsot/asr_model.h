// scsot/asr_model.h

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

#ifndef SCSOT_ASR_MODEL_H_
#define SCSOT_ASR_MODEL_H_

#include <optional>
#include <string>
#include <vector>

#include "scsot/parameters.h"
#include "scsot/serialize.h"
#include "scsot/tape.h"
#include "scsot/tensor.h"

namespace scsot {

struct EncoderConfig {
  int layers = 2;
  int heads = 2;
  int hidden = 64;
  int ffn = 128;
  int conv_kernel = 7;
  int subsample = 2;  // frame rate reduction factor r

  void Validate() const;
};

struct DecoderConfig {
  int layers = 2;
  int heads = 2;
  int hidden = 64;
  int ffn = 128;
  int attractor_dim = 32;
  bool use_speaker_emb = false;
  bool use_activity_penalty = false;
  double penalty_c = 50.0;
  double theta = 0.5;

  void Validate() const;
};

// One recorded attention map.  type is "encoder_self", "decoder_self" or
// "source_target"; every row of `matrix` sums to 1.
struct AttentionTrace {
  int layer = 0;
  int head = 0;
  std::string type;
  Tensor matrix;
};

// Dump format, one block per matrix: a "layer,head,type,rows,cols" header
// line followed by `rows` CSV lines.
void WriteAttentionDump(const std::string& path,
                        const std::vector<AttentionTrace>& traces);
std::vector<AttentionTrace> ReadAttentionDump(const std::string& path);

struct PenalizedAttentionResult {
  Value context;    // [N, dk]
  Value attention;  // [N, T] softmax rows
};

// Single-head source-target attention with the activity penalty: logits are
// q k^T / sqrt(dk) minus c wherever the speaker's activity falls below
// theta; disabled means no penalty at all.
PenalizedAttentionResult PenalizedSourceTargetAttention(
    Tape* tape, Value q, Value k, Value v, const Tensor& activity_column,
    double c, double theta, bool enabled);

// Sinusoidal position table, [positions, dim].
Tensor SinusoidalPositions(int64_t positions, int64_t dim);

// Pre-norm conformer-lite encoder: frame stacking by the subsample factor,
// input projection plus sinusoidal positions, then per layer self-attention,
// depthwise convolution, and FFN sublayers, each residual.  The macaron FFN
// of the full conformer is omitted.
class ConformerEncoder {
 public:
  ConformerEncoder(ParameterStore* store, const EncoderConfig& config,
                   int feature_dim, const std::string& prefix);

  // features [T,F] with T >= subsample; output [ceil(T/r), hidden].
  Value Forward(Tape* tape, const Tensor& features,
                std::vector<AttentionTrace>* trace = nullptr) const;

  const EncoderConfig& config() const { return config_; }

 private:
  struct Layer {
    Parameter *ln1_g, *ln1_b, *wq, *bq, *wk, *bk, *wv, *bv, *wo, *bo;
    Parameter *ln2_g, *ln2_b, *conv_kernel, *conv_bias, *conv_pw, *conv_pw_b;
    Parameter *ln3_g, *ln3_b, *ffn_w1, *ffn_b1, *ffn_w2, *ffn_b2;
  };

  EncoderConfig config_;
  int feature_dim_;
  Parameter *input_w_, *input_b_;
  Parameter *final_ln_g_, *final_ln_b_;
  std::vector<Layer> layers_;
};

// Transformer decoder with the two speaker-conditioning mechanisms: an
// attractor term added into the first layer's FFN input, and an activity
// penalty subtracted from the scaled source-target attention logits of every
// layer and head.
class AsrDecoder {
 public:
  AsrDecoder(ParameterStore* store, const DecoderConfig& config,
             int vocab_total, const std::string& prefix);

  struct ForwardResult {
    Value logits;  // [N, vocab_total]
    Value loss;    // scalar mean cross entropy, only set by teacher forcing
  };

  // Scores every target position under teacher forcing.  `attractors`, when
  // engaged via use_speaker_emb, is a [S, attractor_dim] value whose row s
  // conditions every position with speaker index s.  `activity` is the
  // [T', S] matrix feeding the penalty indicator; only its numeric values
  // matter because the indicator has zero derivative almost everywhere.
  ForwardResult ForwardTeacherForced(
      Tape* tape, Value encoder_out, const SerializedTarget& target,
      std::optional<Value> attractors, const Tensor& activity,
      std::vector<AttentionTrace>* trace = nullptr) const;

  // Logits for the next token after an emitted prefix.  `speaker_indices`
  // has one entry per decoder input position (SOS plus each prefix token)
  // and equals the number of SC tokens strictly before that position.
  Value NextTokenLogits(Tape* tape, Value encoder_out,
                        const std::vector<int>& prefix,
                        const std::vector<int>& speaker_indices,
                        std::optional<Value> attractors,
                        const Tensor& activity) const;

  // The layer FFN with attractor conditioning.  Only the first layer adds
  // the projected attractor to its input; every other layer, and any call
  // with use_speaker_emb off, applies the plain FFN.
  Value ConditionedFfn(Tape* tape, Value z, int layer_index,
                       std::optional<Value> attractors,
                       const std::vector<int>& speaker_indices) const;

  const DecoderConfig& config() const { return config_; }
  int vocab_total() const { return vocab_total_; }
  int sos_id() const { return vocab_total_ - 1; }

 private:
  struct Layer {
    Parameter *ln1_g, *ln1_b, *sq_w, *sq_b, *sk_w, *sk_b, *sv_w, *sv_b, *so_w,
        *so_b;
    Parameter *ln2_g, *ln2_b, *cq_w, *cq_b, *ck_w, *ck_b, *cv_w, *cv_b, *co_w,
        *co_b;
    Parameter *ln3_g, *ln3_b, *ffn_w1, *ffn_b1, *ffn_w2, *ffn_b2;
  };

  // Shared body: runs the stack over the given input ids and returns
  // per-position logits [N, vocab_total].
  Value Decode(Tape* tape, Value encoder_out, const std::vector<int>& input_ids,
               const std::vector<int>& speaker_indices,
               std::optional<Value> attractors, const Tensor& activity,
               std::vector<AttentionTrace>* trace) const;

  DecoderConfig config_;
  int vocab_total_;
  Parameter *embedding_, *spk_w_;
  Parameter *final_ln_g_, *final_ln_b_, *out_w_, *out_b_;
  std::vector<Layer> layers_;
};

}  // namespace scsot

#endif  // SCSOT_ASR_MODEL_H_
