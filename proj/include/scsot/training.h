// scsot/include/scsot/training.h

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

#ifndef SCSOT_TRAINING_H_
#define SCSOT_TRAINING_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scsot/asr_model.h"
#include "scsot/corpus.h"
#include "scsot/diar_model.h"
#include "scsot/parameters.h"
#include "scsot/serialize.h"

namespace scsot {

// Activity matrix fed to the attention penalty during training.
enum class ActivitySource { kOracle, kPredicted };
// Attractor rows fed to the first-layer FFN conditioning.
enum class AttractorSource { kPredicted, kNone };

const char* ActivitySourceName(ActivitySource s);
ActivitySource ActivitySourceFromName(const std::string& name);
const char* AttractorSourceName(AttractorSource s);
AttractorSource AttractorSourceFromName(const std::string& name);

struct TrainConfig {
  double alpha = 0.1;       // diarization loss weight
  double lr = 1e-3;         // peak learning rate
  int warmup = 200;         // linear warmup steps before inverse-sqrt decay
  int epochs = 0;           // 0: no epoch bound
  int max_steps = 2000;     // 0: no step bound (epochs must then be set)
  int64_t frame_budget = 2000;  // batch assembly bound on total frames
  uint64_t seed = 1;
  bool mtl = true;  // off: joint loss is L_asr and diar gets no gradient
  TerminalMode terminal = TerminalMode::kScTerminal;
  ActivitySource activity_source = ActivitySource::kOracle;
  AttractorSource attractor_source = AttractorSource::kPredicted;
  double clip_norm = 5.0;  // global gradient norm bound
  int log_every = 1;       // metrics row cadence
  int eval_every = 0;      // held-out evaluation cadence, 0: final only

  void Validate() const;
};

// The two branches plus everything needed to build targets from mixtures.
// Construction order (encoder, decoder, diar) fixes the parameter draw
// order, so equal seeds give bit-identical models.
class ScSotModel {
 public:
  ScSotModel(ParameterStore* store, const EncoderConfig& encoder_config,
             const DecoderConfig& decoder_config, const DiarConfig& diar_config,
             const TokenVocab& vocab, int feature_dim);

  const TokenVocab& vocab() const { return vocab_; }
  const ConformerEncoder& encoder() const { return encoder_; }
  const AsrDecoder& decoder() const { return decoder_; }
  const DiarModel& diar() const { return diar_; }
  int feature_dim() const { return feature_dim_; }

  // FIFO-ordered serialization target for one mixture.
  SerializedTarget TargetOf(const Mixture& mixture, TerminalMode mode) const;
  // Oracle activity at the decoder frame rate, FIFO columns.
  Tensor OracleActivityOf(const Mixture& mixture) const;

 private:
  TokenVocab vocab_;
  int feature_dim_;
  ConformerEncoder encoder_;
  AsrDecoder decoder_;
  DiarModel diar_;
};

// L = L_asr + alpha * L_diar when mtl is on, plain L_asr otherwise.  Both
// inputs must be finite scalars.
Value JointLoss(Tape* tape, Value l_asr, std::optional<Value> l_diar,
                double alpha, bool mtl);

struct StepStats {
  int64_t step = 0;  // 1-based, after the update
  double l_asr = 0.0;
  double l_diar = 0.0;  // 0 when the diar branch did not run
  double joint = 0.0;
  double lr = 0.0;
};

// Adam moments plus the counters that make a resumed run replay the exact
// batch order of an uninterrupted one.
struct TrainState {
  int64_t step = 0;
  int64_t epoch = 0;         // epochs fully started so far
  int64_t batch_cursor = 0;  // batches consumed within the current epoch
  std::vector<Tensor> m, v;  // parallel to ParameterStore::All()
  std::vector<double> loss_history;

  void Init(const ParameterStore& store);
  void Save(const std::string& path, const ParameterStore& store) const;
  void Load(const std::string& path, const ParameterStore& store);
};

// Linear warmup to the peak rate, then inverse square-root decay.
double LearningRateAt(const TrainConfig& config, int64_t step);

// Greedy frame-budget batching of a fixed shuffle; pure in (order, budget).
std::vector<std::vector<int>> AssembleBatches(
    const std::vector<const Mixture*>& order, int64_t frame_budget);

// Single-threaded trainer with deterministic batch order: the shuffle for
// epoch e is drawn from Fork(seed, e), so (config, corpus) fixes the whole
// trajectory and a state round-trip resumes it exactly.
class Trainer {
 public:
  Trainer(ParameterStore* store, ScSotModel* model, const TrainConfig& config,
          const std::vector<Mixture>* corpus);

  StepStats Step();
  bool Done() const;

  const TrainState& state() const { return state_; }
  void SaveState(const std::string& path) const;
  void LoadState(const std::string& path);

  // Teacher-forced losses without gradients; used for held-out tracking.
  StepStats Evaluate(const std::vector<Mixture>& mixtures) const;

 private:
  struct BatchLoss {
    Value l_asr;
    std::optional<Value> l_diar;
    Value joint;
  };

  std::vector<int> EpochOrder(int64_t epoch) const;
  std::vector<std::vector<int>> BuildEpoch(int64_t epoch) const;
  BatchLoss BatchLosses(Tape* tape, const std::vector<const Mixture*>& batch,
                        int64_t step_for_seed) const;

  ParameterStore* store_;
  ScSotModel* model_;
  TrainConfig config_;
  const std::vector<Mixture>* corpus_;
  TrainState state_;
  std::vector<std::vector<int>> batches_;  // of the current epoch
};

struct RunResult {
  int64_t steps = 0;
  double final_l_asr = 0.0;
  double final_l_diar = 0.0;
  double final_joint = 0.0;
};

struct ExperimentSetup {
  EncoderConfig encoder;
  DecoderConfig decoder;
  DiarConfig diar;
  TrainConfig train;
  int num_text = 16;
  int feature_dim = 8;
};

// Trains on `train_set`, periodically evaluates on `eval_set` when present,
// and leaves checkpoint.bin, train_state.bin, metrics.csv (step, L_asr,
// L_diar, lr, wall_time) and eval.csv under `out_dir`.
RunResult RunExperiment(const std::vector<Mixture>& train_set,
                        const std::vector<Mixture>& eval_set,
                        const ExperimentSetup& setup,
                        const std::string& out_dir);

}  // namespace scsot

#endif  // SCSOT_TRAINING_H_
