// scsot/asr_model.cc

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

#include "scsot/asr_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scsot/common.h"

namespace scsot {

namespace {

constexpr double kMaskNegative = -1e9;

struct AttentionParams {
  Parameter *wq, *bq, *wk, *bk, *wv, *bv, *wo, *bo;
};

// Multi-head attention over a query [N,D] and memory [T,D].  `mask`, when
// present, is an [N,T] additive constant applied to the scaled logits of
// every head (causal mask, activity penalty, or their sum).
Value MultiHeadAttention(Tape* tape, Value query_in, Value memory,
                         const AttentionParams& p, int heads,
                         const Tensor* mask, int layer, const char* type,
                         std::vector<AttentionTrace>* trace) {
  int64_t d = query_in.Data().Dim(1);
  SCSOT_CHECK(d % heads == 0, "attention: heads must divide hidden dim");
  int64_t dk = d / heads;
  Value q = tape->Add(tape->MatMul(query_in, tape->Param(p.wq)), tape->Param(p.bq));
  Value k = tape->Add(tape->MatMul(memory, tape->Param(p.wk)), tape->Param(p.bk));
  Value v = tape->Add(tape->MatMul(memory, tape->Param(p.wv)), tape->Param(p.bv));
  std::optional<Value> mask_value;
  if (mask != nullptr) mask_value = tape->Constant(*mask);
  std::vector<Value> contexts;
  contexts.reserve(static_cast<size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    Value qh = tape->Slice(q, 1, h * dk, (h + 1) * dk);
    Value kh = tape->Slice(k, 1, h * dk, (h + 1) * dk);
    Value vh = tape->Slice(v, 1, h * dk, (h + 1) * dk);
    Value logits = tape->Scale(tape->MatMul(qh, kh, false, true),
                               1.0 / std::sqrt(static_cast<double>(dk)));
    if (mask_value) logits = tape->Add(logits, *mask_value);
    Value attn = tape->Softmax(logits, 1);
    if (trace != nullptr) {
      trace->push_back({layer, h, type, attn.Data()});
    }
    contexts.push_back(tape->MatMul(attn, vh));
  }
  Value merged = (heads == 1) ? contexts[0] : tape->Concat(contexts, 1);
  return tape->Add(tape->MatMul(merged, tape->Param(p.wo)), tape->Param(p.bo));
}

Value Ffn(Tape* tape, Value x, Parameter* w1, Parameter* b1, Parameter* w2,
          Parameter* b2) {
  Value h = tape->Gelu(tape->Add(tape->MatMul(x, tape->Param(w1)), tape->Param(b1)));
  return tape->Add(tape->MatMul(h, tape->Param(w2)), tape->Param(b2));
}

Tensor CausalMask(int64_t n) {
  Tensor mask = Tensor::Zeros({n, n});
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = i + 1; j < n; ++j) mask.At(i, j) = kMaskNegative;
  }
  return mask;
}

}  // namespace

void EncoderConfig::Validate() const {
  SCSOT_CHECK(layers >= 1 && heads >= 1 && hidden >= 1 && ffn >= 1,
              "encoder config: dims must be positive");
  SCSOT_CHECK(hidden % heads == 0, "encoder config: heads must divide hidden");
  SCSOT_CHECK(conv_kernel >= 1 && conv_kernel % 2 == 1,
              "encoder config: conv kernel must be odd");
  SCSOT_CHECK(subsample >= 1, "encoder config: subsample factor must be >= 1");
}

void DecoderConfig::Validate() const {
  SCSOT_CHECK(layers >= 1 && heads >= 1 && hidden >= 1 && ffn >= 1,
              "decoder config: dims must be positive");
  SCSOT_CHECK(hidden % heads == 0, "decoder config: heads must divide hidden");
  SCSOT_CHECK(attractor_dim >= 1, "decoder config: attractor dim must be >= 1");
  SCSOT_CHECK(penalty_c >= 0.0, "decoder config: penalty c must be >= 0");
  SCSOT_CHECK(theta > 0.0 && theta < 1.0, "decoder config: theta must be in (0,1)");
}

Tensor SinusoidalPositions(int64_t positions, int64_t dim) {
  Tensor pe({positions, dim});
  for (int64_t pos = 0; pos < positions; ++pos) {
    for (int64_t i = 0; i < dim; ++i) {
      double exponent = static_cast<double>(2 * (i / 2)) / static_cast<double>(dim);
      double angle = static_cast<double>(pos) / std::pow(10000.0, exponent);
      pe.At(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

PenalizedAttentionResult PenalizedSourceTargetAttention(
    Tape* tape, Value q, Value k, Value v, const Tensor& activity_column,
    double c, double theta, bool enabled) {
  int64_t dk = q.Data().Dim(1);
  int64_t frames = k.Data().Dim(0);
  SCSOT_CHECK(k.Data().Dim(1) == dk && v.Data().Dim(0) == frames,
              "penalized attention: shape mismatch");
  Value logits = tape->Scale(tape->MatMul(q, k, false, true),
                             1.0 / std::sqrt(static_cast<double>(dk)));
  if (enabled) {
    SCSOT_CHECK(activity_column.Rank() == 1 && activity_column.Dim(0) == frames,
                StrPrintf("penalized attention: activity length %ld vs %ld "
                          "encoder frames",
                          activity_column.Rank() == 1 ? activity_column.Dim(0)
                                                      : -1,
                          frames));
    Tensor penalty = Tensor::Zeros({q.Data().Dim(0), frames});
    for (int64_t i = 0; i < penalty.Dim(0); ++i) {
      for (int64_t t = 0; t < frames; ++t) {
        if (activity_column.At(t) < theta) penalty.At(i, t) = -c;
      }
    }
    logits = tape->Add(logits, tape->Constant(penalty));
  }
  PenalizedAttentionResult out;
  out.attention = tape->Softmax(logits, 1);
  out.context = tape->MatMul(out.attention, v);
  return out;
}

void WriteAttentionDump(const std::string& path,
                        const std::vector<AttentionTrace>& traces) {
  std::ofstream os(path, std::ios::trunc);
  SCSOT_CHECK(os.good(), "cannot open for writing: " + path);
  for (const AttentionTrace& t : traces) {
    SCSOT_CHECK(t.matrix.Rank() == 2, "attention trace must be a matrix");
    os << t.layer << ',' << t.head << ',' << t.type << ',' << t.matrix.Dim(0)
       << ',' << t.matrix.Dim(1) << '\n';
    for (int64_t i = 0; i < t.matrix.Dim(0); ++i) {
      for (int64_t j = 0; j < t.matrix.Dim(1); ++j) {
        if (j > 0) os << ',';
        os << StrPrintf("%.12g", t.matrix.At(i, j));
      }
      os << '\n';
    }
  }
  SCSOT_CHECK(os.good(), "write failed: " + path);
}

std::vector<AttentionTrace> ReadAttentionDump(const std::string& path) {
  std::ifstream is(path);
  SCSOT_CHECK(is.good(), "cannot open attention dump: " + path);
  std::vector<AttentionTrace> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    AttentionTrace t;
    int64_t rows = 0, cols = 0;
    {
      std::istringstream hs(line);
      std::string field;
      SCSOT_CHECK(std::getline(hs, field, ','), "dump: bad header");
      t.layer = std::stoi(field);
      SCSOT_CHECK(std::getline(hs, field, ','), "dump: bad header");
      t.head = std::stoi(field);
      SCSOT_CHECK(std::getline(hs, t.type, ','), "dump: bad header");
      SCSOT_CHECK(std::getline(hs, field, ','), "dump: bad header");
      rows = std::stoll(field);
      SCSOT_CHECK(std::getline(hs, field, ','), "dump: bad header");
      cols = std::stoll(field);
    }
    t.matrix = Tensor({rows, cols});
    for (int64_t i = 0; i < rows; ++i) {
      SCSOT_CHECK(std::getline(is, line), "dump: truncated matrix");
      std::istringstream rs(line);
      std::string field;
      for (int64_t j = 0; j < cols; ++j) {
        SCSOT_CHECK(std::getline(rs, field, ','), "dump: short row");
        t.matrix.At(i, j) = std::stod(field);
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

// --------------------------------------------------------------------------
// ConformerEncoder

ConformerEncoder::ConformerEncoder(ParameterStore* store,
                                   const EncoderConfig& config, int feature_dim,
                                   const std::string& prefix)
    : config_(config), feature_dim_(feature_dim) {
  config_.Validate();
  SCSOT_CHECK(feature_dim >= 1, "encoder: feature dim must be >= 1");
  int64_t d = config_.hidden;
  int64_t stacked = static_cast<int64_t>(feature_dim) * config_.subsample;
  auto mat = [&](const std::string& name, int64_t rows, int64_t cols) {
    return store->Create(prefix + "." + name, {rows, cols},
                         InitScheme::kMatrixUniform);
  };
  auto vec = [&](const std::string& name, int64_t n, InitScheme scheme) {
    return store->Create(prefix + "." + name, {n}, scheme);
  };
  input_w_ = mat("input.w", stacked, d);
  input_b_ = vec("input.b", d, InitScheme::kZeros);
  for (int l = 0; l < config_.layers; ++l) {
    std::string lp = StrPrintf("l%d.", l);
    Layer layer;
    layer.ln1_g = vec(lp + "ln1.g", d, InitScheme::kOnes);
    layer.ln1_b = vec(lp + "ln1.b", d, InitScheme::kZeros);
    layer.wq = mat(lp + "attn.wq", d, d);
    layer.bq = vec(lp + "attn.bq", d, InitScheme::kZeros);
    layer.wk = mat(lp + "attn.wk", d, d);
    layer.bk = vec(lp + "attn.bk", d, InitScheme::kZeros);
    layer.wv = mat(lp + "attn.wv", d, d);
    layer.bv = vec(lp + "attn.bv", d, InitScheme::kZeros);
    layer.wo = mat(lp + "attn.wo", d, d);
    layer.bo = vec(lp + "attn.bo", d, InitScheme::kZeros);
    layer.ln2_g = vec(lp + "ln2.g", d, InitScheme::kOnes);
    layer.ln2_b = vec(lp + "ln2.b", d, InitScheme::kZeros);
    layer.conv_kernel = mat(lp + "conv.kernel", config_.conv_kernel, d);
    layer.conv_bias = vec(lp + "conv.bias", d, InitScheme::kZeros);
    layer.conv_pw = mat(lp + "conv.pw", d, d);
    layer.conv_pw_b = vec(lp + "conv.pw_b", d, InitScheme::kZeros);
    layer.ln3_g = vec(lp + "ln3.g", d, InitScheme::kOnes);
    layer.ln3_b = vec(lp + "ln3.b", d, InitScheme::kZeros);
    layer.ffn_w1 = mat(lp + "ffn.w1", d, config_.ffn);
    layer.ffn_b1 = vec(lp + "ffn.b1", config_.ffn, InitScheme::kZeros);
    layer.ffn_w2 = mat(lp + "ffn.w2", config_.ffn, d);
    layer.ffn_b2 = vec(lp + "ffn.b2", d, InitScheme::kZeros);
    layers_.push_back(layer);
  }
  final_ln_g_ = vec("final_ln.g", d, InitScheme::kOnes);
  final_ln_b_ = vec("final_ln.b", d, InitScheme::kZeros);
}

Value ConformerEncoder::Forward(Tape* tape, const Tensor& features,
                                std::vector<AttentionTrace>* trace) const {
  SCSOT_CHECK(features.Rank() == 2 && features.Dim(1) == feature_dim_,
              "encoder: expected [T," + std::to_string(feature_dim_) +
                  "] features, got " + features.ShapeStr());
  int64_t frames = features.Dim(0);
  int r = config_.subsample;
  SCSOT_CHECK(frames >= r, StrPrintf("encoder: T=%ld shorter than subsample %d",
                                     frames, r));
  int64_t out_frames = (frames + r - 1) / r;

  // Stack r consecutive frames per output step, zero padded at the tail.
  Tensor stacked = Tensor::Zeros({out_frames, static_cast<int64_t>(feature_dim_) * r});
  for (int64_t t = 0; t < out_frames; ++t) {
    for (int j = 0; j < r; ++j) {
      int64_t src = t * r + j;
      if (src >= frames) break;
      std::copy(features.RowPtr(src), features.RowPtr(src) + feature_dim_,
                stacked.RowPtr(t) + static_cast<int64_t>(j) * feature_dim_);
    }
  }

  Value x = tape->Add(tape->MatMul(tape->Constant(stacked), tape->Param(input_w_)),
                      tape->Param(input_b_));
  x = tape->Add(x, tape->Constant(SinusoidalPositions(out_frames, config_.hidden)));

  for (int l = 0; l < config_.layers; ++l) {
    const Layer& layer = layers_[static_cast<size_t>(l)];
    Value h = tape->LayerNorm(x, tape->Param(layer.ln1_g), tape->Param(layer.ln1_b));
    AttentionParams ap{layer.wq, layer.bq, layer.wk, layer.bk,
                       layer.wv, layer.bv, layer.wo, layer.bo};
    x = tape->Add(x, MultiHeadAttention(tape, h, h, ap, config_.heads, nullptr,
                                        l, "encoder_self", trace));
    h = tape->LayerNorm(x, tape->Param(layer.ln2_g), tape->Param(layer.ln2_b));
    Value conv = tape->Gelu(tape->DepthwiseConv1d(h, tape->Param(layer.conv_kernel),
                                                  tape->Param(layer.conv_bias)));
    conv = tape->Add(tape->MatMul(conv, tape->Param(layer.conv_pw)),
                     tape->Param(layer.conv_pw_b));
    x = tape->Add(x, conv);
    h = tape->LayerNorm(x, tape->Param(layer.ln3_g), tape->Param(layer.ln3_b));
    x = tape->Add(x, Ffn(tape, h, layer.ffn_w1, layer.ffn_b1, layer.ffn_w2,
                         layer.ffn_b2));
  }
  return tape->LayerNorm(x, tape->Param(final_ln_g_), tape->Param(final_ln_b_));
}

// --------------------------------------------------------------------------
// AsrDecoder

AsrDecoder::AsrDecoder(ParameterStore* store, const DecoderConfig& config,
                       int vocab_total, const std::string& prefix)
    : config_(config), vocab_total_(vocab_total) {
  config_.Validate();
  SCSOT_CHECK(vocab_total >= 4, "decoder: vocabulary too small");
  int64_t d = config_.hidden;
  auto mat = [&](const std::string& name, int64_t rows, int64_t cols) {
    return store->Create(prefix + "." + name, {rows, cols},
                         InitScheme::kMatrixUniform);
  };
  auto vec = [&](const std::string& name, int64_t n, InitScheme scheme) {
    return store->Create(prefix + "." + name, {n}, scheme);
  };
  embedding_ = mat("embedding", vocab_total, d);
  spk_w_ = mat("spk_w", config_.attractor_dim, d);
  for (int l = 0; l < config_.layers; ++l) {
    std::string lp = StrPrintf("l%d.", l);
    Layer layer;
    layer.ln1_g = vec(lp + "ln1.g", d, InitScheme::kOnes);
    layer.ln1_b = vec(lp + "ln1.b", d, InitScheme::kZeros);
    layer.sq_w = mat(lp + "self.wq", d, d);
    layer.sq_b = vec(lp + "self.bq", d, InitScheme::kZeros);
    layer.sk_w = mat(lp + "self.wk", d, d);
    layer.sk_b = vec(lp + "self.bk", d, InitScheme::kZeros);
    layer.sv_w = mat(lp + "self.wv", d, d);
    layer.sv_b = vec(lp + "self.bv", d, InitScheme::kZeros);
    layer.so_w = mat(lp + "self.wo", d, d);
    layer.so_b = vec(lp + "self.bo", d, InitScheme::kZeros);
    layer.ln2_g = vec(lp + "ln2.g", d, InitScheme::kOnes);
    layer.ln2_b = vec(lp + "ln2.b", d, InitScheme::kZeros);
    layer.cq_w = mat(lp + "cross.wq", d, d);
    layer.cq_b = vec(lp + "cross.bq", d, InitScheme::kZeros);
    layer.ck_w = mat(lp + "cross.wk", d, d);
    layer.ck_b = vec(lp + "cross.bk", d, InitScheme::kZeros);
    layer.cv_w = mat(lp + "cross.wv", d, d);
    layer.cv_b = vec(lp + "cross.bv", d, InitScheme::kZeros);
    layer.co_w = mat(lp + "cross.wo", d, d);
    layer.co_b = vec(lp + "cross.bo", d, InitScheme::kZeros);
    layer.ln3_g = vec(lp + "ln3.g", d, InitScheme::kOnes);
    layer.ln3_b = vec(lp + "ln3.b", d, InitScheme::kZeros);
    layer.ffn_w1 = mat(lp + "ffn.w1", d, config_.ffn);
    layer.ffn_b1 = vec(lp + "ffn.b1", config_.ffn, InitScheme::kZeros);
    layer.ffn_w2 = mat(lp + "ffn.w2", config_.ffn, d);
    layer.ffn_b2 = vec(lp + "ffn.b2", d, InitScheme::kZeros);
    layers_.push_back(layer);
  }
  final_ln_g_ = vec("final_ln.g", d, InitScheme::kOnes);
  final_ln_b_ = vec("final_ln.b", d, InitScheme::kZeros);
  out_w_ = mat("out.w", d, vocab_total);
  out_b_ = vec("out.b", vocab_total, InitScheme::kZeros);
}

Value AsrDecoder::Decode(Tape* tape, Value encoder_out,
                         const std::vector<int>& input_ids,
                         const std::vector<int>& speaker_indices,
                         std::optional<Value> attractors,
                         const Tensor& activity,
                         std::vector<AttentionTrace>* trace) const {
  int64_t n = static_cast<int64_t>(input_ids.size());
  SCSOT_CHECK(n >= 1, "decoder: empty input");
  SCSOT_CHECK(speaker_indices.size() == input_ids.size(),
              "decoder: speaker index per input position required");
  int64_t enc_frames = encoder_out.Data().Dim(0);

  int max_spk = 0;
  for (int s : speaker_indices) {
    SCSOT_CHECK(s >= 0, "decoder: negative speaker index");
    max_spk = std::max(max_spk, s);
  }
  if (config_.use_speaker_emb) {
    SCSOT_CHECK(attractors.has_value(),
                "decoder: use_speaker_emb requires attractors");
    SCSOT_CHECK(max_spk < attractors->Data().Dim(0),
                StrPrintf("decoder: speaker index %d exceeds %ld attractors",
                          max_spk, attractors->Data().Dim(0)));
    SCSOT_CHECK(attractors->Data().Dim(1) == config_.attractor_dim,
                "decoder: attractor dim mismatch");
  }
  if (config_.use_activity_penalty) {
    SCSOT_CHECK(activity.Rank() == 2 && activity.Dim(0) == enc_frames,
                StrPrintf("decoder: activity rows (%ld) must equal encoder "
                          "frames (%ld)",
                          activity.Rank() == 2 ? activity.Dim(0) : -1,
                          enc_frames));
    SCSOT_CHECK(max_spk < activity.Dim(1),
                StrPrintf("decoder: speaker index %d exceeds %ld activity "
                          "columns",
                          max_spk, activity.Dim(1)));
  }

  // The penalty matrix depends on the activity only through a step
  // function, so it enters the graph as a constant.
  Tensor cross_mask = Tensor::Zeros({n, enc_frames});
  if (config_.use_activity_penalty) {
    for (int64_t i = 0; i < n; ++i) {
      int s = speaker_indices[static_cast<size_t>(i)];
      for (int64_t t = 0; t < enc_frames; ++t) {
        if (activity.At(t, s) < config_.theta) {
          cross_mask.At(i, t) = -config_.penalty_c;
        }
      }
    }
  }
  Tensor causal = CausalMask(n);

  Value x = tape->EmbeddingLookup(tape->Param(embedding_), input_ids);
  x = tape->Add(x, tape->Constant(SinusoidalPositions(n, config_.hidden)));

  for (int l = 0; l < config_.layers; ++l) {
    const Layer& layer = layers_[static_cast<size_t>(l)];
    Value h = tape->LayerNorm(x, tape->Param(layer.ln1_g), tape->Param(layer.ln1_b));
    AttentionParams self_p{layer.sq_w, layer.sq_b, layer.sk_w, layer.sk_b,
                           layer.sv_w, layer.sv_b, layer.so_w, layer.so_b};
    x = tape->Add(x, MultiHeadAttention(tape, h, h, self_p, config_.heads,
                                        &causal, l, "decoder_self", trace));
    h = tape->LayerNorm(x, tape->Param(layer.ln2_g), tape->Param(layer.ln2_b));
    AttentionParams cross_p{layer.cq_w, layer.cq_b, layer.ck_w, layer.ck_b,
                            layer.cv_w, layer.cv_b, layer.co_w, layer.co_b};
    x = tape->Add(x, MultiHeadAttention(
                         tape, h, encoder_out, cross_p, config_.heads,
                         config_.use_activity_penalty ? &cross_mask : nullptr,
                         l, "source_target", trace));
    h = tape->LayerNorm(x, tape->Param(layer.ln3_g), tape->Param(layer.ln3_b));
    x = tape->Add(x, ConditionedFfn(tape, h, l, attractors, speaker_indices));
  }
  x = tape->LayerNorm(x, tape->Param(final_ln_g_), tape->Param(final_ln_b_));
  return tape->Add(tape->MatMul(x, tape->Param(out_w_)), tape->Param(out_b_));
}

Value AsrDecoder::ConditionedFfn(Tape* tape, Value z, int layer_index,
                                 std::optional<Value> attractors,
                                 const std::vector<int>& speaker_indices) const {
  SCSOT_CHECK(layer_index >= 0 && layer_index < config_.layers,
              "ConditionedFfn: bad layer index");
  const Layer& layer = layers_[static_cast<size_t>(layer_index)];
  Value h = z;
  if (layer_index == 0 && config_.use_speaker_emb && attractors.has_value()) {
    SCSOT_CHECK(attractors->Data().Dim(1) == config_.attractor_dim,
                "ConditionedFfn: attractor dim mismatch");
    Value gathered = tape->EmbeddingLookup(*attractors, speaker_indices);
    h = tape->Add(h, tape->MatMul(gathered, tape->Param(spk_w_)));
  }
  return Ffn(tape, h, layer.ffn_w1, layer.ffn_b1, layer.ffn_w2, layer.ffn_b2);
}

AsrDecoder::ForwardResult AsrDecoder::ForwardTeacherForced(
    Tape* tape, Value encoder_out, const SerializedTarget& target,
    std::optional<Value> attractors, const Tensor& activity,
    std::vector<AttentionTrace>* trace) const {
  SCSOT_CHECK(!target.tokens.empty(), "teacher forcing: empty target");
  SCSOT_CHECK(target.speaker_index_per_token.size() == target.tokens.size(),
              "teacher forcing: malformed target");
  std::vector<int> input_ids;
  input_ids.reserve(target.tokens.size());
  input_ids.push_back(sos_id());
  input_ids.insert(input_ids.end(), target.tokens.begin(),
                   target.tokens.end() - 1);
  ForwardResult result;
  result.logits = Decode(tape, encoder_out, input_ids,
                         target.speaker_index_per_token, attractors, activity,
                         trace);
  result.loss = tape->CrossEntropyLogits(result.logits, target.tokens);
  return result;
}

Value AsrDecoder::NextTokenLogits(Tape* tape, Value encoder_out,
                                  const std::vector<int>& prefix,
                                  const std::vector<int>& speaker_indices,
                                  std::optional<Value> attractors,
                                  const Tensor& activity) const {
  std::vector<int> input_ids;
  input_ids.reserve(prefix.size() + 1);
  input_ids.push_back(sos_id());
  input_ids.insert(input_ids.end(), prefix.begin(), prefix.end());
  SCSOT_CHECK(speaker_indices.size() == input_ids.size(),
              "NextTokenLogits: one speaker index per input position");
  Value logits = Decode(tape, encoder_out, input_ids, speaker_indices,
                        attractors, activity, nullptr);
  int64_t n = logits.Data().Dim(0);
  return tape->Slice(logits, 0, n - 1, n);
}

}  // namespace scsot
