// scsot/src/decoding.cc

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

#include "scsot/decoding.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scsot/common.h"

namespace scsot {

const char* TerminationName(Termination t) {
  return t == Termination::kEos ? "eos" : "count";
}

Termination TerminationFromName(const std::string& name) {
  if (name == "eos") return Termination::kEos;
  if (name == "count" || name == "speaker_count") return Termination::kCount;
  ThrowError(__FILE__, __LINE__, "unknown termination mode: " + name);
}

const char* ConditioningSourceName(ConditioningSource s) {
  switch (s) {
    case ConditioningSource::kNone:
      return "none";
    case ConditioningSource::kPredicted:
      return "predicted";
    default:
      return "oracle";
  }
}

ConditioningSource ConditioningSourceFromName(const std::string& name) {
  if (name == "none") return ConditioningSource::kNone;
  if (name == "predicted") return ConditioningSource::kPredicted;
  if (name == "oracle") return ConditioningSource::kOracle;
  ThrowError(__FILE__, __LINE__, "unknown conditioning source: " + name);
}

const char* StopReasonName(StopReason r) {
  switch (r) {
    case StopReason::kTerminalToken:
      return "terminal_token";
    case StopReason::kCountReached:
      return "count_reached";
    default:
      return "length_cap";
  }
}

StopReason StopReasonFromName(const std::string& name) {
  if (name == "terminal_token") return StopReason::kTerminalToken;
  if (name == "count_reached") return StopReason::kCountReached;
  if (name == "length_cap") return StopReason::kLengthCap;
  ThrowError(__FILE__, __LINE__, "unknown stop reason: " + name);
}

void DecodeConfig::Validate() const {
  SCSOT_CHECK(beam >= 1, "decode config: beam must be >= 1");
  SCSOT_CHECK(max_len >= 1, "decode config: max_len must be >= 1");
  SCSOT_CHECK(tau > 0.0 && tau < 1.0, "decode config: tau must be in (0,1)");
}

namespace {

struct Hyp {
  std::vector<int> tokens;
  int sc_count = 0;
  double log_prob = 0.0;
  bool done = false;
  StopReason reason = StopReason::kLengthCap;
};

bool Better(const Hyp& a, const Hyp& b) {
  if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
  return a.tokens < b.tokens;  // deterministic tie-break
}

std::vector<int> SpeakerIndices(const std::vector<int>& tokens, int sc_id) {
  // One entry per decoder input position: SOS plus every prefix token.
  std::vector<int> idx(tokens.size() + 1, 0);
  int count = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    idx[i] = count;
    if (tokens[i] == sc_id) ++count;
  }
  idx[tokens.size()] = count;
  return idx;
}

}  // namespace

DecodeResult BeamSearch(const StepFn& step, const TokenVocab& vocab,
                        const DecodeConfig& config, int forced_speakers) {
  config.Validate();
  if (config.termination == Termination::kCount) {
    SCSOT_CHECK(forced_speakers >= 1,
                "beam search: count termination needs a speaker count >= 1");
  }
  const int vocab_size = vocab.TotalSize();

  std::vector<Hyp> beam = {Hyp{}};
  for (int pos = 0; pos < config.max_len; ++pos) {
    bool any_live = false;
    std::vector<Hyp> candidates;
    for (const Hyp& h : beam) {
      if (h.done) {
        candidates.push_back(h);
        continue;
      }
      any_live = true;
      std::vector<double> lp = step(h.tokens, SpeakerIndices(h.tokens, vocab.Sc()));
      SCSOT_CHECK(static_cast<int>(lp.size()) == vocab_size,
                  "beam search: step function returned a wrong-size row");
      for (int v = 0; v < vocab_size; ++v) {
        if (v == vocab.Sos()) continue;  // input-only token
        if (config.termination == Termination::kCount && v == vocab.Eos()) {
          continue;  // count mode replaces the terminal with SC
        }
        Hyp next = h;
        next.tokens.push_back(v);
        next.log_prob += lp[static_cast<size_t>(v)];
        if (v == vocab.Sc()) ++next.sc_count;
        if (config.termination == Termination::kEos && v == vocab.Eos()) {
          next.done = true;
          next.reason = StopReason::kTerminalToken;
        } else if (config.termination == Termination::kCount &&
                   next.sc_count == forced_speakers) {
          next.done = true;
          next.reason = StopReason::kCountReached;
        }
        candidates.push_back(std::move(next));
      }
    }
    if (!any_live) break;
    std::sort(candidates.begin(), candidates.end(), Better);
    if (static_cast<int>(candidates.size()) > config.beam) {
      candidates.resize(static_cast<size_t>(config.beam));
    }
    beam = std::move(candidates);
  }

  Hyp best = beam.front();
  for (const Hyp& h : beam) {
    if (Better(h, best)) best = h;
  }

  DecodeResult result;
  result.tokens = best.tokens;
  result.log_prob = best.log_prob;
  result.reason = best.done ? best.reason : StopReason::kLengthCap;
  TerminalMode mode = config.termination == Termination::kCount
                          ? TerminalMode::kScTerminal
                          : TerminalMode::kEosTerminal;
  result.transcripts = Deserialize(result.tokens, mode, vocab);
  result.predicted_speakers = config.termination == Termination::kCount
                                  ? forced_speakers
                                  : CountSegments(result.tokens, mode, vocab);
  std::vector<int> idx = SpeakerIndices(result.tokens, vocab.Sc());
  result.speaker_index_trace.assign(idx.begin(), idx.end() - 1);
  return result;
}

ConditioningInputs ChooseConditioning(ConditioningSource source,
                                      const ScSotModel& model,
                                      Value asr_encoder_out,
                                      const Mixture& mixture, double tau) {
  Tape* tape = asr_encoder_out.tape;
  ConditioningInputs out;

  // The diarization branch always runs: it supplies the count for
  // count-terminated decoding and the predicted conditioning inputs.
  Value embs = model.diar().Encode(tape, asr_encoder_out, mixture.features);
  DiarModel::AttractorSet set = model.diar().Attractors(
      tape, embs, model.diar().config().max_attractors);
  for (int64_t k = 0; k < set.existence.Data().Dim(0); ++k) {
    out.existence.push_back(set.existence.Data().At(k, 0));
  }

  if (source == ConditioningSource::kOracle) {
    SCSOT_CHECK(!mixture.segments.empty(),
                "conditioning: oracle requested without labels");
    out.speakers = mixture.num_speakers;
  } else {
    out.speakers = CountSpeakers(out.existence, tau);
    if (out.speakers == 0) {
      out.speakers = 1;
      out.count_coerced = true;
      SCSOT_WARN("counted 0 speakers in %s, coerced to 1", mixture.id.c_str());
    }
  }

  if (source == ConditioningSource::kNone) {
    // Plain SOT: no attractors; an all-active matrix makes a penalty-enabled
    // decoder behave exactly like an unpenalized one.
    out.activity = Tensor::Full(
        {embs.Data().Dim(0), model.diar().config().max_attractors}, 1.0);
    return out;
  }

  Tensor att = set.attractors.Data();
  Tensor att_s({out.speakers, att.Dim(1)});
  for (int64_t s = 0; s < out.speakers; ++s) {
    int64_t src = std::min<int64_t>(s, att.Dim(0) - 1);
    for (int64_t d = 0; d < att.Dim(1); ++d) att_s.At(s, d) = att.At(src, d);
  }
  out.attractors = att_s;

  if (source == ConditioningSource::kOracle) {
    out.activity = model.OracleActivityOf(mixture);
  } else {
    Value posterior =
        model.diar().Posterior(tape, embs, tape->Constant(att_s));
    out.activity = posterior.Data();
  }
  return out;
}

DecodeResult Decode(const ScSotModel& model, const Mixture& mixture,
                    const DecodeConfig& config) {
  config.Validate();
  Tape tape(false);
  Value enc_out = model.encoder().Forward(&tape, mixture.features);
  ConditioningInputs cond = ChooseConditioning(config.conditioning, model,
                                               enc_out, mixture, config.tau);

  const DecoderConfig& dec_cfg = model.decoder().config();
  SCSOT_CHECK(!dec_cfg.use_speaker_emb || cond.attractors.has_value(),
              "decode: a speaker-conditioned decoder needs attractors; "
              "conditioning source 'none' cannot drive it");
  bool use_attr = dec_cfg.use_speaker_emb && cond.attractors.has_value();
  bool use_act = dec_cfg.use_activity_penalty && cond.activity.Rank() == 2;
  std::optional<Value> attractors;
  if (use_attr) attractors = tape.Constant(*cond.attractors);
  Tensor activity = use_act ? cond.activity : Tensor();

  // Conditioning inputs index speakers by SC count; saturate at the last
  // available row so stray SC tokens in eos mode cannot run off the end.
  int64_t clamp = -1;
  if (use_attr) clamp = cond.attractors->Dim(0) - 1;
  if (use_act) {
    clamp = clamp < 0 ? activity.Dim(1) - 1
                      : std::min<int64_t>(clamp, activity.Dim(1) - 1);
  }

  StepFn step = [&](const std::vector<int>& prefix,
                    const std::vector<int>& speaker_indices) {
    std::vector<int> idx = speaker_indices;
    if (clamp >= 0) {
      for (int& v : idx) v = std::min<int>(v, static_cast<int>(clamp));
    }
    Value logits = model.decoder().NextTokenLogits(&tape, enc_out, prefix, idx,
                                                   attractors, activity);
    const Tensor& row = logits.Data();
    double max = row.At(0, 0);
    for (int64_t v = 1; v < row.Dim(1); ++v) max = std::max(max, row.At(0, v));
    double z = 0.0;
    for (int64_t v = 0; v < row.Dim(1); ++v) z += std::exp(row.At(0, v) - max);
    double log_z = max + std::log(z);
    std::vector<double> lp(static_cast<size_t>(row.Dim(1)));
    for (int64_t v = 0; v < row.Dim(1); ++v) {
      lp[static_cast<size_t>(v)] = row.At(0, v) - log_z;
    }
    return lp;
  };

  DecodeResult result = BeamSearch(step, model.vocab(), config, cond.speakers);
  result.count_coerced = cond.count_coerced;
  if (config.termination == Termination::kEos) {
    // Counting by segments stands in for the diar count in eos mode.
    result.predicted_speakers = CountSegments(
        result.tokens, TerminalMode::kEosTerminal, model.vocab());
  }
  if (clamp >= 0) {
    for (int& v : result.speaker_index_trace) {
      v = std::min<int>(v, static_cast<int>(clamp));
    }
  }
  return result;
}

void WriteHypothesisFile(const std::string& path,
                         const std::vector<HypothesisRecord>& records,
                         const TokenVocab& vocab) {
  std::ofstream out(path, std::ios::trunc);
  SCSOT_CHECK(out.good(), "cannot open hypothesis file for writing: " + path);
  for (const HypothesisRecord& r : records) {
    out << r.utt_id << '\t' << StopReasonName(r.reason) << '\t'
        << r.predicted_speakers << '\t';
    for (size_t s = 0; s < r.transcripts.size(); ++s) {
      if (s > 0) out << " | ";
      for (size_t i = 0; i < r.transcripts[s].size(); ++i) {
        if (i > 0) out << ' ';
        out << vocab.SurfaceOf(r.transcripts[s][i]);
      }
    }
    out << '\n';
  }
  SCSOT_CHECK(out.good(), "failed writing hypothesis file: " + path);
}

std::vector<HypothesisRecord> ReadHypothesisFile(const std::string& path,
                                                 const TokenVocab& vocab) {
  std::ifstream in(path);
  SCSOT_CHECK(in.good(), "cannot open hypothesis file: " + path);
  std::vector<HypothesisRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == '\t') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    SCSOT_CHECK(fields.size() == 4,
                "hypothesis file: expected 4 tab-separated fields, got " +
                    line);
    HypothesisRecord r;
    r.utt_id = fields[0];
    r.reason = StopReasonFromName(fields[1]);
    r.predicted_speakers = std::stoi(fields[2]);
    if (!fields[3].empty()) {
      std::string seg;
      size_t pos = 0;
      std::vector<std::string> segs;
      const std::string sep = " | ";
      while (true) {
        size_t next = fields[3].find(sep, pos);
        if (next == std::string::npos) {
          segs.push_back(fields[3].substr(pos));
          break;
        }
        segs.push_back(fields[3].substr(pos, next - pos));
        pos = next + sep.size();
      }
      for (const std::string& text : segs) {
        std::vector<int> ids;
        std::istringstream ss(text);
        std::string tok;
        while (ss >> tok) ids.push_back(vocab.IdOf(tok));
        r.transcripts.push_back(std::move(ids));
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace scsot
