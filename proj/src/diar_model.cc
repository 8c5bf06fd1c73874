// scsot/diar_model.cc

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

#include "scsot/diar_model.h"

#include <algorithm>
#include <numeric>

#include "scsot/common.h"
#include "scsot/rng.h"

namespace scsot {

void DiarConfig::Validate() const {
  SCSOT_CHECK(layers >= 1 && heads >= 1 && hidden >= 1 && ffn >= 1,
              "diar config: dims must be positive");
  SCSOT_CHECK(hidden % heads == 0, "diar config: heads must divide hidden");
  SCSOT_CHECK(conv_kernel >= 1 && conv_kernel % 2 == 1,
              "diar config: conv kernel must be odd");
  SCSOT_CHECK(tau > 0.0 && tau < 1.0, "diar config: tau must be in (0,1)");
  SCSOT_CHECK(max_attractors >= 2, "diar config: max_attractors must be >= 2");
}

DiarModel::DiarModel(ParameterStore* store, const DiarConfig& config,
                     const EncoderConfig& asr_encoder_config, int feature_dim,
                     const std::string& prefix)
    : config_(config) {
  config_.Validate();
  int64_t d = config_.hidden;
  auto mat = [&](const std::string& name, int64_t rows, int64_t cols) {
    return store->Create(prefix + "." + name, {rows, cols},
                         InitScheme::kMatrixUniform);
  };
  auto vec = [&](const std::string& name, int64_t n) {
    return store->Create(prefix + "." + name, {n}, InitScheme::kZeros);
  };
  if (config_.shared_encoder) {
    proj_w_ = mat("proj.w", asr_encoder_config.hidden, d);
    proj_b_ = vec("proj.b", d);
  } else {
    EncoderConfig enc;
    enc.layers = config_.layers;
    enc.heads = config_.heads;
    enc.hidden = config_.hidden;
    enc.ffn = config_.ffn;
    enc.conv_kernel = config_.conv_kernel;
    enc.subsample = asr_encoder_config.subsample;
    independent_encoder_.emplace(store, enc, feature_dim, prefix + ".enc");
  }
  enc_w_ih_ = mat("eda.enc.w_ih", d, 4 * d);
  enc_w_hh_ = mat("eda.enc.w_hh", d, 4 * d);
  enc_b_ih_ = vec("eda.enc.b_ih", 4 * d);
  enc_b_hh_ = vec("eda.enc.b_hh", 4 * d);
  dec_w_ih_ = mat("eda.dec.w_ih", d, 4 * d);
  dec_w_hh_ = mat("eda.dec.w_hh", d, 4 * d);
  dec_b_ih_ = vec("eda.dec.b_ih", 4 * d);
  dec_b_hh_ = vec("eda.dec.b_hh", 4 * d);
  exist_w_ = mat("exist.w", d, 1);
  exist_b_ = vec("exist.b", 1);
}

Value DiarModel::Encode(Tape* tape, std::optional<Value> asr_encoder_out,
                        const Tensor& features) const {
  if (config_.shared_encoder) {
    SCSOT_CHECK(asr_encoder_out.has_value(),
                "diar encode: shared mode needs the ASR encoder output");
    return tape->Add(tape->MatMul(*asr_encoder_out, tape->Param(proj_w_)),
                     tape->Param(proj_b_));
  }
  return independent_encoder_->Forward(tape, features);
}

DiarModel::AttractorSet DiarModel::Attractors(
    Tape* tape, Value frame_embs, int num,
    std::optional<uint64_t> shuffle_seed) const {
  SCSOT_CHECK(num >= 1, "eda: attractor count must be >= 1");
  const Tensor& embs = frame_embs.Data();
  SCSOT_CHECK(embs.Rank() == 2 && embs.Dim(1) == config_.hidden,
              "eda: expected [T," + std::to_string(config_.hidden) +
                  "] embeddings, got " + embs.ShapeStr());
  int64_t frames = embs.Dim(0);

  std::vector<int64_t> order(static_cast<size_t>(frames));
  std::iota(order.begin(), order.end(), 0);
  if (config_.shuffle_frames && shuffle_seed.has_value()) {
    Rng rng(SplitMix64(*shuffle_seed ^ 0x65646131));
    rng.Shuffle(&order);
  }

  Value w_ih = tape->Param(enc_w_ih_);
  Value w_hh = tape->Param(enc_w_hh_);
  Value b_ih = tape->Param(enc_b_ih_);
  Value b_hh = tape->Param(enc_b_hh_);
  Tape::LstmState state{tape->Constant(Tensor::Zeros({1, config_.hidden})),
                        tape->Constant(Tensor::Zeros({1, config_.hidden}))};
  for (int64_t t = 0; t < frames; ++t) {
    Value x = tape->Slice(frame_embs, 0, order[static_cast<size_t>(t)],
                          order[static_cast<size_t>(t)] + 1);
    state = tape->LstmStep(x, state, w_ih, w_hh, b_ih, b_hh);
  }

  Value dw_ih = tape->Param(dec_w_ih_);
  Value dw_hh = tape->Param(dec_w_hh_);
  Value db_ih = tape->Param(dec_b_ih_);
  Value db_hh = tape->Param(dec_b_hh_);
  Value zero_in = tape->Constant(Tensor::Zeros({1, config_.hidden}));
  std::vector<Value> rows;
  rows.reserve(static_cast<size_t>(num));
  for (int k = 0; k < num; ++k) {
    state = tape->LstmStep(zero_in, state, dw_ih, dw_hh, db_ih, db_hh);
    rows.push_back(state.h);
  }
  AttractorSet out{(num == 1) ? rows[0] : tape->Concat(rows, 0), Value{}};
  out.existence = tape->Sigmoid(tape->Add(
      tape->MatMul(out.attractors, tape->Param(exist_w_)),
      tape->Param(exist_b_)));
  return out;
}

Value DiarModel::Posterior(Tape* tape, Value frame_embs, Value attractors) const {
  SCSOT_CHECK(frame_embs.Data().Dim(1) == attractors.Data().Dim(1),
              "posterior: embedding/attractor dim mismatch");
  return tape->Sigmoid(tape->MatMul(frame_embs, attractors, false, true));
}

Value DiarModel::Loss(Tape* tape, Value posterior, const Tensor& labels,
                      Value existence, int true_num_speakers) const {
  const Tensor& p = posterior.Data();
  SCSOT_CHECK(labels.Rank() == 2 && p.Rank() == 2 && labels.SameShape(p),
              "diar loss: posterior " + p.ShapeStr() + " vs labels " +
                  labels.ShapeStr());
  SCSOT_CHECK(p.Dim(1) == true_num_speakers,
              "diar loss: posterior must have one column per true speaker");
  int64_t k = existence.Data().Dim(0);
  SCSOT_CHECK(k == true_num_speakers + 1,
              StrPrintf("diar loss: need %d existence probs, got %ld",
                        true_num_speakers + 1, k));
  Value activity_bce = tape->BinaryCrossEntropy(posterior, labels);
  Tensor exist_targets = Tensor::Zeros({k, 1});
  for (int i = 0; i < true_num_speakers; ++i) exist_targets.At(i, 0) = 1.0;
  Value exist_bce = tape->BinaryCrossEntropy(existence, exist_targets);
  return tape->Add(activity_bce, exist_bce);
}

Tensor DiarModel::DownsampleLabels(const Tensor& labels, int subsample) {
  SCSOT_CHECK(labels.Rank() == 2, "DownsampleLabels: rank-2 labels required");
  SCSOT_CHECK(subsample >= 1, "DownsampleLabels: bad subsample factor");
  int64_t frames = labels.Dim(0), cols = labels.Dim(1);
  int64_t out_frames = (frames + subsample - 1) / subsample;
  Tensor out = Tensor::Zeros({out_frames, cols});
  for (int64_t t = 0; t < out_frames; ++t) {
    for (int64_t j = t * subsample; j < std::min((t + 1) * subsample, frames);
         ++j) {
      for (int64_t s = 0; s < cols; ++s) {
        if (labels.At(j, s) != 0.0) out.At(t, s) = 1.0;
      }
    }
  }
  return out;
}

int CountSpeakers(const std::vector<double>& existence_probs, double tau) {
  int count = 0;
  for (double q : existence_probs) {
    if (q < tau) break;
    ++count;
  }
  return count;
}

std::vector<int> MedianFilter(const std::vector<int>& x, int window) {
  SCSOT_CHECK(window >= 1 && window % 2 == 1, "median filter: window must be odd");
  if (x.empty()) return {};
  int64_t n = static_cast<int64_t>(x.size());
  int64_t half = window / 2;
  std::vector<int> out(x.size());
  for (int64_t i = 0; i < n; ++i) {
    int ones = 0;
    for (int64_t j = i - half; j <= i + half; ++j) {
      int64_t idx = std::clamp<int64_t>(j, 0, n - 1);  // edge replication
      ones += x[static_cast<size_t>(idx)];
    }
    out[static_cast<size_t>(i)] = (2 * ones > window) ? 1 : 0;
  }
  return out;
}

}  // namespace scsot
