// scsot/src/training.cc

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

#include "scsot/training.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "scsot/common.h"
#include "scsot/rng.h"

namespace scsot {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
}  // namespace

const char* ActivitySourceName(ActivitySource s) {
  return s == ActivitySource::kOracle ? "oracle" : "predicted";
}

ActivitySource ActivitySourceFromName(const std::string& name) {
  if (name == "oracle") return ActivitySource::kOracle;
  if (name == "predicted") return ActivitySource::kPredicted;
  ThrowError(__FILE__, __LINE__, "unknown activity source: " + name);
}

const char* AttractorSourceName(AttractorSource s) {
  return s == AttractorSource::kPredicted ? "predicted" : "none";
}

AttractorSource AttractorSourceFromName(const std::string& name) {
  if (name == "predicted") return AttractorSource::kPredicted;
  if (name == "none") return AttractorSource::kNone;
  ThrowError(__FILE__, __LINE__, "unknown attractor source: " + name);
}

void TrainConfig::Validate() const {
  SCSOT_CHECK(std::isfinite(alpha) && alpha >= 0.0,
              "train config: alpha must be finite and >= 0");
  SCSOT_CHECK(lr > 0.0, "train config: lr must be positive");
  SCSOT_CHECK(warmup >= 1, "train config: warmup must be >= 1");
  SCSOT_CHECK(epochs >= 0 && max_steps >= 0,
              "train config: epochs and max_steps must be >= 0");
  SCSOT_CHECK(epochs > 0 || max_steps > 0,
              "train config: need an epoch or step bound");
  SCSOT_CHECK(frame_budget >= 1, "train config: frame_budget must be >= 1");
  SCSOT_CHECK(clip_norm > 0.0, "train config: clip_norm must be positive");
  SCSOT_CHECK(log_every >= 1, "train config: log_every must be >= 1");
  SCSOT_CHECK(eval_every >= 0, "train config: eval_every must be >= 0");
}

ScSotModel::ScSotModel(ParameterStore* store,
                       const EncoderConfig& encoder_config,
                       const DecoderConfig& decoder_config,
                       const DiarConfig& diar_config, const TokenVocab& vocab,
                       int feature_dim)
    : vocab_(vocab),
      feature_dim_(feature_dim),
      encoder_(store, encoder_config, feature_dim, "enc"),
      decoder_(store, decoder_config, vocab.TotalSize(), "dec"),
      diar_(store, diar_config, encoder_config, feature_dim, "diar") {}

SerializedTarget ScSotModel::TargetOf(const Mixture& mixture,
                                      TerminalMode mode) const {
  std::vector<int64_t> starts;
  starts.reserve(mixture.segments.size());
  for (const Segment& s : mixture.segments) starts.push_back(s.start_frame);
  return SerializeFifo(mixture.transcripts, starts, mode, vocab_);
}

Tensor ScSotModel::OracleActivityOf(const Mixture& mixture) const {
  ActivityLabels labels = ActivityLabelsOf(mixture, 100.0);
  return DiarModel::DownsampleLabels(labels.labels,
                                     encoder_.config().subsample);
}

Value JointLoss(Tape* tape, Value l_asr, std::optional<Value> l_diar,
                double alpha, bool mtl) {
  SCSOT_CHECK(l_asr.Data().NumElements() == 1, "joint loss: L_asr not scalar");
  SCSOT_CHECK(std::isfinite(l_asr.Data().At(0)),
              "joint loss: non-finite L_asr");
  if (!mtl) return l_asr;
  SCSOT_CHECK(l_diar.has_value(), "joint loss: mtl needs a diarization loss");
  SCSOT_CHECK(std::isfinite(l_diar->Data().At(0)),
              "joint loss: non-finite L_diar");
  return tape->Add(l_asr, tape->Scale(*l_diar, alpha));
}

double LearningRateAt(const TrainConfig& config, int64_t step) {
  SCSOT_CHECK(step >= 1, "learning rate: step must be >= 1");
  double t = static_cast<double>(step);
  double w = static_cast<double>(config.warmup);
  return config.lr * std::min(t / w, std::sqrt(w / t));
}

void TrainState::Init(const ParameterStore& store) {
  step = 0;
  epoch = 0;
  batch_cursor = 0;
  m.clear();
  v.clear();
  loss_history.clear();
  for (const auto& p : store.All()) {
    m.push_back(Tensor::Zeros(p->value.Shape()));
    v.push_back(Tensor::Zeros(p->value.Shape()));
  }
}

void TrainState::Save(const std::string& path,
                      const ParameterStore& store) const {
  const auto& params = store.All();
  SCSOT_CHECK(m.size() == params.size() && v.size() == params.size(),
              "train state: moment count does not match parameter count");
  Tensor step_t = Tensor::Scalar(static_cast<double>(step));
  Tensor epoch_t = Tensor::Scalar(static_cast<double>(epoch));
  Tensor cursor_t = Tensor::Scalar(static_cast<double>(batch_cursor));
  std::vector<std::pair<std::string, const Tensor*>> records;
  records.emplace_back("state.step", &step_t);
  records.emplace_back("state.epoch", &epoch_t);
  records.emplace_back("state.cursor", &cursor_t);
  for (size_t i = 0; i < params.size(); ++i) {
    records.emplace_back("adam.m." + params[i]->name, &m[i]);
    records.emplace_back("adam.v." + params[i]->name, &v[i]);
  }
  SaveTensorRecords(path, records);
}

void TrainState::Load(const std::string& path, const ParameterStore& store) {
  std::map<std::string, Tensor> records = LoadTensorRecords(path);
  auto take = [&](const std::string& name) {
    auto it = records.find(name);
    SCSOT_CHECK(it != records.end(), "train state: missing record " + name);
    Tensor t = std::move(it->second);
    records.erase(it);
    return t;
  };
  step = static_cast<int64_t>(take("state.step").At(0));
  epoch = static_cast<int64_t>(take("state.epoch").At(0));
  batch_cursor = static_cast<int64_t>(take("state.cursor").At(0));
  const auto& params = store.All();
  m.clear();
  v.clear();
  for (const auto& p : params) {
    Tensor mi = take("adam.m." + p->name);
    Tensor vi = take("adam.v." + p->name);
    SCSOT_CHECK(mi.SameShape(p->value) && vi.SameShape(p->value),
                "train state: moment shape mismatch for " + p->name);
    m.push_back(std::move(mi));
    v.push_back(std::move(vi));
  }
  SCSOT_CHECK(records.empty(), "train state: unknown records in " + path);
}

std::vector<std::vector<int>> AssembleBatches(
    const std::vector<const Mixture*>& order, int64_t frame_budget) {
  std::vector<std::vector<int>> batches;
  std::vector<int> cur;
  int64_t frames = 0;
  for (size_t i = 0; i < order.size(); ++i) {
    int64_t t = order[i]->features.Dim(0);
    if (!cur.empty() && frames + t > frame_budget) {
      batches.push_back(cur);
      cur.clear();
      frames = 0;
    }
    cur.push_back(static_cast<int>(i));
    frames += t;
  }
  if (!cur.empty()) batches.push_back(cur);
  return batches;
}

Trainer::Trainer(ParameterStore* store, ScSotModel* model,
                 const TrainConfig& config, const std::vector<Mixture>* corpus)
    : store_(store), model_(model), config_(config), corpus_(corpus) {
  config_.Validate();
  SCSOT_CHECK(corpus_ != nullptr && !corpus_->empty(),
              "trainer: empty training corpus");
  state_.Init(*store_);
  batches_ = BuildEpoch(state_.epoch);
}

std::vector<int> Trainer::EpochOrder(int64_t epoch) const {
  std::vector<int> order(corpus_->size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng(config_.seed).Fork(static_cast<uint64_t>(epoch) + 1);
  rng.Shuffle(&order);
  return order;
}

std::vector<std::vector<int>> Trainer::BuildEpoch(int64_t epoch) const {
  std::vector<int> order = EpochOrder(epoch);
  std::vector<const Mixture*> ptrs;
  ptrs.reserve(order.size());
  for (int idx : order) ptrs.push_back(&(*corpus_)[static_cast<size_t>(idx)]);
  std::vector<std::vector<int>> batches = AssembleBatches(ptrs, config_.frame_budget);
  // Batch entries index `order`, remap them to corpus indices.
  for (auto& b : batches) {
    for (int& i : b) i = order[static_cast<size_t>(i)];
  }
  return batches;
}

bool Trainer::Done() const {
  if (config_.max_steps > 0 && state_.step >= config_.max_steps) return true;
  if (config_.epochs > 0 && state_.epoch >= config_.epochs) return true;
  return false;
}

Trainer::BatchLoss Trainer::BatchLosses(
    Tape* tape, const std::vector<const Mixture*>& batch,
    int64_t step_for_seed) const {
  const DecoderConfig& dec_cfg = model_->decoder().config();
  bool need_diar =
      config_.mtl || config_.attractor_source == AttractorSource::kPredicted ||
      (dec_cfg.use_activity_penalty &&
       config_.activity_source == ActivitySource::kPredicted);

  std::optional<Value> asr_sum, diar_sum;
  auto accumulate = [&](std::optional<Value>* acc, Value x) {
    *acc = acc->has_value() ? tape->Add(**acc, x) : x;
  };

  for (size_t i = 0; i < batch.size(); ++i) {
    const Mixture& mix = *batch[i];
    SerializedTarget target = model_->TargetOf(mix, config_.terminal);
    Value enc_out = model_->encoder().Forward(tape, mix.features);
    int s = mix.num_speakers;

    std::optional<Value> attractors_s;  // [S, d], live diar graph
    Tensor activity;                    // numeric penalty input
    Tensor oracle;                      // downsampled oracle labels
    if (need_diar || dec_cfg.use_activity_penalty) {
      oracle = model_->OracleActivityOf(mix);
    }
    if (need_diar) {
      Value embs = model_->diar().Encode(tape, enc_out, mix.features);
      uint64_t shuffle_seed =
          SplitMix64(config_.seed ^
                     (0x7365ull * static_cast<uint64_t>(step_for_seed + 1) +
                      static_cast<uint64_t>(i)));
      DiarModel::AttractorSet set =
          model_->diar().Attractors(tape, embs, s + 1, shuffle_seed);
      Value att_s = tape->Slice(set.attractors, 0, 0, s);
      Value posterior = model_->diar().Posterior(tape, embs, att_s);
      if (config_.mtl) {
        Value d = model_->diar().Loss(tape, posterior, oracle, set.existence, s);
        accumulate(&diar_sum, d);
      }
      if (config_.attractor_source == AttractorSource::kPredicted) {
        // Without MTL the conditioning path must stay gradient-free for the
        // diarization branch, so the attractors enter as constants.
        attractors_s = config_.mtl ? att_s : tape->Constant(att_s.Data());
      }
      if (dec_cfg.use_activity_penalty &&
          config_.activity_source == ActivitySource::kPredicted) {
        activity = posterior.Data();
      }
    }
    if (dec_cfg.use_activity_penalty &&
        config_.activity_source == ActivitySource::kOracle) {
      activity = oracle;
    }

    AsrDecoder::ForwardResult res = model_->decoder().ForwardTeacherForced(
        tape, enc_out, target, attractors_s, activity);
    accumulate(&asr_sum, res.loss);
  }

  double inv = 1.0 / static_cast<double>(batch.size());
  BatchLoss out;
  out.l_asr = tape->Scale(*asr_sum, inv);
  if (diar_sum.has_value()) out.l_diar = tape->Scale(*diar_sum, inv);
  out.joint = JointLoss(tape, out.l_asr, out.l_diar, config_.alpha,
                        config_.mtl);
  return out;
}

StepStats Trainer::Step() {
  SCSOT_CHECK(!Done(), "trainer: stepping past the configured bound");
  if (state_.batch_cursor >= static_cast<int64_t>(batches_.size())) {
    ++state_.epoch;
    state_.batch_cursor = 0;
    SCSOT_CHECK(!Done(), "trainer: stepping past the configured bound");
    batches_ = BuildEpoch(state_.epoch);
  }
  const std::vector<int>& ids = batches_[static_cast<size_t>(state_.batch_cursor)];
  std::vector<const Mixture*> batch;
  batch.reserve(ids.size());
  for (int idx : ids) batch.push_back(&(*corpus_)[static_cast<size_t>(idx)]);

  Tape tape(true);
  BatchLoss loss = BatchLosses(&tape, batch, state_.step);
  double joint = loss.joint.Data().At(0);
  SCSOT_CHECK(std::isfinite(joint),
              StrPrintf("trainer: non-finite joint loss %g at step %ld",
                        joint, state_.step + 1));

  store_->ZeroGrads();
  tape.Backward(loss.joint);

  double norm = store_->GradNorm();
  if (norm > config_.clip_norm) {
    double scale = config_.clip_norm / norm;
    for (const auto& p : store_->All()) {
      double* g = p->grad.Data();
      for (int64_t i = 0; i < p->grad.NumElements(); ++i) g[i] *= scale;
    }
  }

  int64_t t = state_.step + 1;
  double lr_t = LearningRateAt(config_, t);
  double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
  double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
  const auto& params = store_->All();
  for (size_t i = 0; i < params.size(); ++i) {
    double* w = params[i]->value.Data();
    const double* g = params[i]->grad.Data();
    double* mi = state_.m[i].Data();
    double* vi = state_.v[i].Data();
    for (int64_t j = 0; j < params[i]->value.NumElements(); ++j) {
      mi[j] = kBeta1 * mi[j] + (1.0 - kBeta1) * g[j];
      vi[j] = kBeta2 * vi[j] + (1.0 - kBeta2) * g[j] * g[j];
      double mhat = mi[j] / bc1;
      double vhat = vi[j] / bc2;
      w[j] -= lr_t * mhat / (std::sqrt(vhat) + kAdamEps);
    }
  }

  ++state_.batch_cursor;
  state_.step = t;
  state_.loss_history.push_back(joint);

  StepStats stats;
  stats.step = t;
  stats.l_asr = loss.l_asr.Data().At(0);
  stats.l_diar = loss.l_diar ? loss.l_diar->Data().At(0) : 0.0;
  stats.joint = joint;
  stats.lr = lr_t;
  return stats;
}

StepStats Trainer::Evaluate(const std::vector<Mixture>& mixtures) const {
  SCSOT_CHECK(!mixtures.empty(), "trainer: empty evaluation set");
  Tape tape(false);
  std::vector<const Mixture*> batch;
  batch.reserve(mixtures.size());
  for (const Mixture& m : mixtures) batch.push_back(&m);
  BatchLoss loss = BatchLosses(&tape, batch, -1);
  StepStats stats;
  stats.step = state_.step;
  stats.l_asr = loss.l_asr.Data().At(0);
  stats.l_diar = loss.l_diar ? loss.l_diar->Data().At(0) : 0.0;
  stats.joint = loss.joint.Data().At(0);
  stats.lr = 0.0;
  return stats;
}

void Trainer::SaveState(const std::string& path) const {
  state_.Save(path, *store_);
}

void Trainer::LoadState(const std::string& path) {
  state_.Load(path, *store_);
  batches_ = BuildEpoch(state_.epoch);
  SCSOT_CHECK(state_.batch_cursor <= static_cast<int64_t>(batches_.size()),
              "train state: batch cursor out of range for this corpus");
}

RunResult RunExperiment(const std::vector<Mixture>& train_set,
                        const std::vector<Mixture>& eval_set,
                        const ExperimentSetup& setup,
                        const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  TokenVocab vocab = TokenVocab::Make(setup.num_text);
  ParameterStore store(setup.train.seed);
  ScSotModel model(&store, setup.encoder, setup.decoder, setup.diar, vocab,
                   setup.feature_dim);
  Trainer trainer(&store, &model, setup.train, &train_set);

  std::ofstream metrics(out_dir + "/metrics.csv", std::ios::trunc);
  SCSOT_CHECK(metrics.good(), "cannot open metrics file in " + out_dir);
  metrics << "step,L_asr,L_diar,lr,wall_time\n";
  std::ofstream eval_log;
  if (!eval_set.empty()) {
    eval_log.open(out_dir + "/eval.csv", std::ios::trunc);
    SCSOT_CHECK(eval_log.good(), "cannot open eval file in " + out_dir);
    eval_log << "step,L_asr,L_diar,joint\n";
  }

  auto t0 = std::chrono::steady_clock::now();
  StepStats last;
  while (!trainer.Done()) {
    last = trainer.Step();
    if (last.step % setup.train.log_every == 0) {
      double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      metrics << StrPrintf("%ld,%.12g,%.12g,%.12g,%.3f\n", last.step,
                           last.l_asr, last.l_diar, last.lr, wall);
    }
    if (!eval_set.empty() && setup.train.eval_every > 0 &&
        last.step % setup.train.eval_every == 0) {
      StepStats ev = trainer.Evaluate(eval_set);
      eval_log << StrPrintf("%ld,%.12g,%.12g,%.12g\n", ev.step, ev.l_asr,
                            ev.l_diar, ev.joint);
    }
  }
  if (!eval_set.empty()) {
    StepStats ev = trainer.Evaluate(eval_set);
    eval_log << StrPrintf("%ld,%.12g,%.12g,%.12g\n", ev.step, ev.l_asr,
                          ev.l_diar, ev.joint);
  }

  SaveCheckpoint(out_dir + "/checkpoint.bin", store);
  trainer.SaveState(out_dir + "/train_state.bin");

  RunResult result;
  result.steps = trainer.state().step;
  result.final_l_asr = last.l_asr;
  result.final_l_diar = last.l_diar;
  result.final_joint = last.joint;
  return result;
}

}  // namespace scsot
