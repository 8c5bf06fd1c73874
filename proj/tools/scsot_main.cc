// scsot/tools/scsot_main.cc

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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scsot/common.h"
#include "scsot/config.h"
#include "scsot/corpus.h"
#include "scsot/decoding.h"
#include "scsot/metrics.h"
#include "scsot/training.h"

namespace scsot {
namespace {

// Every fourth mixture of each speaker-count group is held out for the test
// split, so train and test share one speaker pool but no mixtures.
constexpr int kHoldOutEvery = 4;

ExperimentConfig LoadOrDefault(const std::string& config_path) {
  if (config_path.empty()) return ExperimentConfig{};
  return ExperimentConfig::LoadFile(config_path);
}

void LogResolved(const ExperimentConfig& config) {
  SCSOT_INFO("resolved config:\n%s", config.ToMap().Serialize().c_str());
}

std::string SplitName(const std::string& dir) {
  std::string s = dir;
  while (!s.empty() && s.back() == '/') s.pop_back();
  return std::filesystem::path(s).filename().string();
}

std::vector<int> ParseRows(const std::string& text) {
  std::vector<int> rows;
  std::string cur;
  for (size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      SCSOT_CHECK(!cur.empty(), "ablate: empty entry in --rows");
      rows.push_back(AblationRowOf(std::stoi(cur)).id);
      cur.clear();
    } else {
      cur.push_back(text[i]);
    }
  }
  SCSOT_CHECK(!rows.empty(), "ablate: --rows selected nothing");
  return rows;
}

struct ModelBundle {
  ParameterStore store;
  TokenVocab vocab;
  ScSotModel model;

  ModelBundle(const ExperimentConfig& config, uint64_t store_seed)
      : store(store_seed),
        vocab(TokenVocab::Make(config.corpus.num_text)),
        model(&store, config.encoder, config.decoder, config.diar, vocab,
              config.corpus.feature_dim) {}
};

// Hypotheses for every mixture of a split, in corpus order.
std::vector<HypothesisRecord> DecodeSplit(const ScSotModel& model,
                                          const std::vector<Mixture>& mixtures,
                                          const DecodeConfig& config) {
  std::vector<HypothesisRecord> records;
  records.reserve(mixtures.size());
  for (const Mixture& mix : mixtures) {
    DecodeResult r = Decode(model, mix, config);
    SCSOT_DEBUG("decoded %s: S=%d reason=%s logp=%.4f", mix.id.c_str(),
                r.predicted_speakers, StopReasonName(r.reason), r.log_prob);
    records.push_back(
        {mix.id, r.reason, r.predicted_speakers, r.transcripts});
  }
  return records;
}

struct SplitScores {
  double wer = 0.0;
  double sca = 0.0;
  std::optional<double> der;
  ScoreAccumulator acc;
};

// WER and SCA against the reference transcripts; DER between the predicted
// activity the decoder would condition on and the oracle labels, when a
// model is available to produce it.
SplitScores ScoreSplit(const std::vector<Mixture>& refs,
                       const std::vector<HypothesisRecord>& hyps,
                       const ScSotModel* model, double tau) {
  std::map<std::string, const HypothesisRecord*> by_id;
  for (const HypothesisRecord& h : hyps) by_id[h.utt_id] = &h;

  SplitScores out;
  for (const Mixture& mix : refs) {
    auto it = by_id.find(mix.id);
    SCSOT_CHECK(it != by_id.end(), "score: no hypothesis for " + mix.id);
    const HypothesisRecord& hyp = *it->second;
    out.acc.AddWer(Wer(mix.transcripts, hyp.transcripts));
    out.acc.AddCount(mix.num_speakers, hyp.predicted_speakers);
    if (model != nullptr) {
      Tape tape(false);
      Value enc_out = model->encoder().Forward(&tape, mix.features);
      ConditioningInputs cond = ChooseConditioning(
          ConditioningSource::kPredicted, *model, enc_out, mix, tau);
      out.acc.AddDer(Der(model->OracleActivityOf(mix), cond.activity));
    }
  }
  out.wer = out.acc.Wer();
  out.sca = out.acc.Sca();
  if (model != nullptr) out.der = out.acc.Der();
  return out;
}

std::vector<ScoreRow> ScoreRowsOf(const SplitScores& s,
                                  const std::string& split) {
  std::vector<ScoreRow> rows;
  rows.push_back({"wer", split, s.wer,
                  StrPrintf("edits=%ld;ref_tokens=%ld", s.acc.wer_edits,
                            s.acc.wer_ref_tokens)});
  rows.push_back({"sca", split, s.sca,
                  StrPrintf("matches=%ld;total=%ld", s.acc.count_matches,
                            s.acc.count_total)});
  if (s.der.has_value()) {
    rows.push_back(
        {"der", split, *s.der,
         StrPrintf("miss=%ld;fa=%ld;conf=%ld;ref_frames=%ld", s.acc.der_miss,
                   s.acc.der_fa, s.acc.der_conf, s.acc.der_ref_frames)});
  }
  return rows;
}

int RunGenData(const std::string& config_path, uint64_t seed, bool seed_set,
               const std::string& out) {
  ExperimentConfig config = LoadOrDefault(config_path);
  if (seed_set) config.train.seed = seed;
  config.Validate();
  LogResolved(config);

  std::filesystem::create_directories(out);
  std::vector<Mixture> all = GenerateCorpus(config.corpus, config.train.seed);
  auto [train_set, test_set] = SplitCorpus(all, kHoldOutEvery);
  SaveCorpusDir(out + "/train", train_set);
  SaveCorpusDir(out + "/test", test_set);
  TokenVocab::Make(config.corpus.num_text).Save(out + "/vocab.tsv");
  config.SaveFile(out + "/resolved.cfg");
  SCSOT_INFO("wrote %zu train and %zu test mixtures under %s",
             train_set.size(), test_set.size(), out.c_str());
  return 0;
}

int RunTrain(const std::string& config_path, uint64_t seed, bool seed_set,
             const std::string& corpus, const std::string& out) {
  ExperimentConfig config = LoadOrDefault(config_path);
  if (seed_set) config.train.seed = seed;
  config.Validate();
  LogResolved(config);

  std::vector<Mixture> train_set = LoadCorpusDir(corpus + "/train");
  std::vector<Mixture> eval_set;
  if (std::filesystem::exists(corpus + "/test")) {
    eval_set = LoadCorpusDir(corpus + "/test");
  }
  std::filesystem::create_directories(out);
  config.SaveFile(out + "/resolved.cfg");
  RunResult r = RunExperiment(train_set, eval_set, config.Setup(), out);
  SCSOT_INFO("trained %ld steps, final L_asr=%.6f L_diar=%.6f joint=%.6f",
             r.steps, r.final_l_asr, r.final_l_diar, r.final_joint);
  return 0;
}

struct DecodeOverrides {
  std::optional<int> beam;
  std::optional<Termination> termination;
  std::optional<ConditioningSource> conditioning;
};

int RunDecode(const std::string& config_path, const std::string& checkpoint,
              const std::string& corpus, const std::string& out,
              const DecodeOverrides& overrides) {
  ExperimentConfig config = LoadOrDefault(config_path);
  if (overrides.beam) config.decode.beam = *overrides.beam;
  if (overrides.termination) config.decode.termination = *overrides.termination;
  if (overrides.conditioning) {
    config.decode.conditioning = *overrides.conditioning;
  }
  config.Validate();
  LogResolved(config);

  ModelBundle bundle(config, config.train.seed);
  LoadCheckpoint(checkpoint, &bundle.store);
  std::vector<Mixture> mixtures = LoadCorpusDir(corpus);
  std::vector<HypothesisRecord> records =
      DecodeSplit(bundle.model, mixtures, config.decode);
  WriteHypothesisFile(out, records, bundle.vocab);
  SCSOT_INFO("decoded %zu mixtures into %s", records.size(), out.c_str());
  return 0;
}

int RunScore(const std::string& config_path, const std::string& ref,
             const std::string& hyp, const std::string& out,
             const std::string& checkpoint) {
  ExperimentConfig config = LoadOrDefault(config_path);
  config.Validate();
  LogResolved(config);

  std::vector<Mixture> refs = LoadCorpusDir(ref);
  std::optional<ModelBundle> bundle;
  if (!checkpoint.empty()) {
    bundle.emplace(config, config.train.seed);
    LoadCheckpoint(checkpoint, &bundle->store);
  }
  std::vector<HypothesisRecord> hyps =
      ReadHypothesisFile(hyp, bundle ? bundle->vocab
                                     : TokenVocab::Make(config.corpus.num_text));
  SplitScores scores = ScoreSplit(refs, hyps,
                                  bundle ? &bundle->model : nullptr,
                                  config.decode.tau);
  std::string split = SplitName(ref);
  WriteScoreCsv(out, ScoreRowsOf(scores, split));
  if (scores.der.has_value()) {
    SCSOT_INFO("%s: wer=%.4f sca=%.4f der=%.4f", split.c_str(), scores.wer,
               scores.sca, *scores.der);
  } else {
    SCSOT_INFO("%s: wer=%.4f sca=%.4f", split.c_str(), scores.wer, scores.sca);
  }
  return 0;
}

int RunDumpAttention(const std::string& config_path,
                     const std::string& checkpoint, const std::string& corpus,
                     const std::string& utt, const std::string& out) {
  ExperimentConfig config = LoadOrDefault(config_path);
  config.Validate();
  LogResolved(config);

  ModelBundle bundle(config, config.train.seed);
  LoadCheckpoint(checkpoint, &bundle.store);
  std::vector<Mixture> mixtures = LoadCorpusDir(corpus);
  SCSOT_CHECK(!mixtures.empty(), "dump-attention: empty corpus");
  const Mixture* pick = &mixtures.front();
  if (!utt.empty()) {
    pick = nullptr;
    for (const Mixture& m : mixtures) {
      if (m.id == utt) pick = &m;
    }
    SCSOT_CHECK(pick != nullptr, "dump-attention: no mixture named " + utt);
  }

  // Teacher-forced replay with the decode-time conditioning source, so the
  // dumped source-target maps show the penalty actually applied.
  Tape tape(false);
  std::vector<AttentionTrace> traces;
  Value enc_out = bundle.model.encoder().Forward(&tape, pick->features, &traces);
  ConditioningInputs cond =
      ChooseConditioning(config.decode.conditioning, bundle.model, enc_out,
                         *pick, config.decode.tau);
  const DecoderConfig& dec_cfg = bundle.model.decoder().config();
  SCSOT_CHECK(!dec_cfg.use_speaker_emb || cond.attractors.has_value(),
              "dump-attention: a speaker-conditioned decoder needs "
              "attractors; conditioning source 'none' cannot drive it");
  std::optional<Value> attractors;
  if (dec_cfg.use_speaker_emb && cond.attractors.has_value()) {
    attractors = tape.Constant(*cond.attractors);
  }
  Tensor activity =
      dec_cfg.use_activity_penalty && cond.activity.Rank() == 2
          ? cond.activity
          : Tensor();
  SerializedTarget target =
      bundle.model.TargetOf(*pick, config.train.terminal);
  bundle.model.decoder().ForwardTeacherForced(&tape, enc_out, target,
                                              attractors, activity, &traces);
  WriteAttentionDump(out, traces);
  SCSOT_INFO("dumped %zu attention maps of %s into %s", traces.size(),
             pick->id.c_str(), out.c_str());
  return 0;
}

// The training signature: rows sharing it (7 and 8) reuse one trained model
// per seed, everything else trains from scratch with a fresh optimizer.
std::string TrainSignature(const ExperimentConfig& config) {
  return StrPrintf("spk%d_pen%d_mtl%d_%s",
                   config.decoder.use_speaker_emb ? 1 : 0,
                   config.decoder.use_activity_penalty ? 1 : 0,
                   config.train.mtl ? 1 : 0,
                   TerminalModeName(config.train.terminal));
}

int RunAblate(const std::string& config_path, uint64_t seed, bool seed_set,
              int num_seeds, const std::string& rows_text,
              const std::string& corpus, const std::string& out) {
  ExperimentConfig base = LoadOrDefault(config_path);
  if (seed_set) base.train.seed = seed;
  base.Validate();
  SCSOT_CHECK(num_seeds >= 1, "ablate: --seeds must be >= 1");
  LogResolved(base);

  std::vector<int> rows = ParseRows(rows_text);
  std::vector<Mixture> train_set = LoadCorpusDir(corpus + "/train");
  std::vector<Mixture> test_set = LoadCorpusDir(corpus + "/test");
  for (const Mixture& m : test_set) {
    SCSOT_CHECK(!m.segments.empty(),
                "ablate: mixture " + m.id + " carries no oracle labels");
  }
  std::filesystem::create_directories(out);
  base.SaveFile(out + "/resolved.cfg");

  std::map<std::string, std::string> trained;  // signature+seed -> run dir
  std::ofstream results(out + "/results.csv", std::ios::trunc);
  SCSOT_CHECK(results.good(), "ablate: cannot write results.csv");
  results << "row,name,seed,split,wer,sca,der\n";

  for (int row_id : rows) {
    const AblationRow& row = AblationRowOf(row_id);
    double wer_sum = 0.0, sca_sum = 0.0, der_sum = 0.0;
    for (int k = 0; k < num_seeds; ++k) {
      ExperimentConfig config = base;
      row.ApplyTo(&config);
      config.train.seed = base.train.seed + static_cast<uint64_t>(k);
      config.Validate();

      std::string key =
          TrainSignature(config) + StrPrintf("_seed%llu",
                                             (unsigned long long)config.train.seed);
      auto it = trained.find(key);
      if (it == trained.end()) {
        std::string run_dir = out + "/train_" + key;
        SCSOT_INFO("ablate: training %s (row %d seed %llu)", key.c_str(),
                   row_id, (unsigned long long)config.train.seed);
        RunExperiment(train_set, test_set, config.Setup(), run_dir);
        it = trained.emplace(key, run_dir).first;
      } else {
        SCSOT_INFO("ablate: row %d reuses the %s model", row_id, key.c_str());
      }

      ModelBundle bundle(config, config.train.seed);
      LoadCheckpoint(it->second + "/checkpoint.bin", &bundle.store);
      std::vector<HypothesisRecord> hyps =
          DecodeSplit(bundle.model, test_set, config.decode);
      std::string tag = StrPrintf("row%d_seed%d", row_id, k);
      WriteHypothesisFile(out + "/" + tag + ".hyp.txt", hyps, bundle.vocab);
      SplitScores scores =
          ScoreSplit(test_set, hyps, &bundle.model, config.decode.tau);
      results << StrPrintf("%d,%s,%llu,test,%.6f,%.6f,%.6f\n", row_id,
                           row.Name().c_str(),
                           (unsigned long long)config.train.seed, scores.wer,
                           scores.sca, *scores.der);
      wer_sum += scores.wer;
      sca_sum += scores.sca;
      der_sum += *scores.der;
      SCSOT_INFO("ablate: row %d seed %llu wer=%.4f sca=%.4f der=%.4f", row_id,
                 (unsigned long long)config.train.seed, scores.wer, scores.sca,
                 *scores.der);
    }
    results << StrPrintf("%d,%s,mean,test,%.6f,%.6f,%.6f\n", row_id,
                         row.Name().c_str(), wer_sum / num_seeds,
                         sca_sum / num_seeds, der_sum / num_seeds);
  }
  SCSOT_CHECK(results.good(), "ablate: failed writing results.csv");
  SCSOT_INFO("ablation table written to %s/results.csv", out.c_str());
  return 0;
}

}  // namespace
}  // namespace scsot

int main(int argc, char** argv) {
  CLI::App app{"speaker-conditioned serialized output training toolkit"};
  app.require_subcommand(1);

  std::string config_path, corpus, out, checkpoint, hyp, ref, utt;
  std::string rows = "2,3,4,5,6,7,8";
  std::string termination, conditioning;
  uint64_t seed = 0;
  int beam = 4, num_seeds = 3;

  CLI::App* gen = app.add_subcommand("gen-data", "generate a toy corpus");
  gen->add_option("--config", config_path, "experiment config file");
  CLI::Option* gen_seed = gen->add_option("--seed", seed, "corpus seed");
  gen->add_option("--out", out, "output directory")->required();

  CLI::App* train = app.add_subcommand("train", "train one model");
  train->add_option("--config", config_path, "experiment config file");
  CLI::Option* train_seed = train->add_option("--seed", seed, "training seed");
  train->add_option("--corpus", corpus, "corpus directory")->required();
  train->add_option("--out", out, "run directory")->required();

  CLI::App* dec = app.add_subcommand("decode", "decode one corpus split");
  dec->add_option("--config", config_path, "experiment config file");
  dec->add_option("--checkpoint", checkpoint, "model weights")->required();
  dec->add_option("--corpus", corpus, "split directory")->required();
  dec->add_option("--out", out, "hypothesis file")->required();
  CLI::Option* dec_beam = dec->add_option("--beam", beam, "beam size");
  dec->add_option("--termination", termination, "eos|count");
  dec->add_option("--conditioning", conditioning, "none|predicted|oracle");

  CLI::App* score = app.add_subcommand("score", "score a hypothesis file");
  score->add_option("--config", config_path, "experiment config file");
  score->add_option("--ref", ref, "reference split directory")->required();
  score->add_option("--hyp", hyp, "hypothesis file")->required();
  score->add_option("--out", out, "score csv")->required();
  score->add_option("--checkpoint", checkpoint,
                    "model weights; enables the DER row");

  CLI::App* dump = app.add_subcommand("dump-attention",
                                      "write attention maps of one mixture");
  dump->add_option("--config", config_path, "experiment config file");
  dump->add_option("--checkpoint", checkpoint, "model weights")->required();
  dump->add_option("--corpus", corpus, "split directory")->required();
  dump->add_option("--utt", utt, "mixture id, default first");
  dump->add_option("--out", out, "dump file")->required();

  CLI::App* ablate = app.add_subcommand("ablate", "run the ablation table");
  ablate->add_option("--config", config_path, "experiment config file");
  CLI::Option* ablate_seed = ablate->add_option("--seed", seed, "base seed");
  ablate->add_option("--seeds", num_seeds, "seeds per row");
  ablate->add_option("--rows", rows, "comma-separated row ids in 2..8");
  ablate->add_option("--corpus", corpus, "corpus directory")->required();
  ablate->add_option("--out", out, "results directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return scsot::RunGenData(config_path, seed, gen_seed->count() > 0, out);
    }
    if (train->parsed()) {
      return scsot::RunTrain(config_path, seed, train_seed->count() > 0,
                             corpus, out);
    }
    if (dec->parsed()) {
      scsot::DecodeOverrides overrides;
      if (dec_beam->count() > 0) overrides.beam = beam;
      if (!termination.empty()) {
        overrides.termination = scsot::TerminationFromName(termination);
      }
      if (!conditioning.empty()) {
        overrides.conditioning = scsot::ConditioningSourceFromName(conditioning);
      }
      return scsot::RunDecode(config_path, checkpoint, corpus, out, overrides);
    }
    if (score->parsed()) {
      return scsot::RunScore(config_path, ref, hyp, out, checkpoint);
    }
    if (dump->parsed()) {
      return scsot::RunDumpAttention(config_path, checkpoint, corpus, utt,
                                     out);
    }
    if (ablate->parsed()) {
      return scsot::RunAblate(config_path, seed, ablate_seed->count() > 0,
                              num_seeds, rows, corpus, out);
    }
  } catch (const scsot::Error& e) {
    std::fprintf(stderr, "scsot: error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "scsot: unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
