// scsot/src/config.cc

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

#include "scsot/config.h"

#include <fstream>
#include <sstream>

#include "scsot/common.h"

namespace scsot {

namespace {

std::string Trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool ParseBool(const std::string& section, const std::string& key,
               const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  ThrowError(__FILE__, __LINE__,
             StrPrintf("config [%s] %s: expected a boolean, got '%s'",
                       section.c_str(), key.c_str(), value.c_str()));
}

int ParseInt(const std::string& section, const std::string& key,
             const std::string& value) {
  try {
    size_t used = 0;
    int v = std::stoi(value, &used);
    SCSOT_CHECK(used == value.size(), "trailing characters");
    return v;
  } catch (const std::exception&) {
    ThrowError(__FILE__, __LINE__,
               StrPrintf("config [%s] %s: expected an integer, got '%s'",
                         section.c_str(), key.c_str(), value.c_str()));
  }
}

double ParseDouble(const std::string& section, const std::string& key,
                   const std::string& value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    SCSOT_CHECK(used == value.size(), "trailing characters");
    return v;
  } catch (const std::exception&) {
    ThrowError(__FILE__, __LINE__,
               StrPrintf("config [%s] %s: expected a number, got '%s'",
                         section.c_str(), key.c_str(), value.c_str()));
  }
}

std::string BoolStr(bool b) { return b ? "true" : "false"; }

// Trailing zeros trimmed so resolved files stay diff-friendly while %.17g
// keeps round-trips exact for the values we write.
std::string NumStr(double v) { return StrPrintf("%.17g", v); }

}  // namespace

void ConfigMap::Set(const std::string& section, const std::string& key,
                    const std::string& value) {
  auto it = sections_.find(section);
  if (it == sections_.end()) {
    section_order_.push_back(section);
    it = sections_.emplace(section, std::vector<std::pair<std::string, std::string>>{})
             .first;
  }
  for (auto& kv : it->second) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  it->second.emplace_back(key, value);
}

bool ConfigMap::Has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return false;
  for (const auto& kv : it->second) {
    if (kv.first == key) return true;
  }
  return false;
}

const std::string& ConfigMap::Get(const std::string& section,
                                  const std::string& key) const {
  auto it = sections_.find(section);
  SCSOT_CHECK(it != sections_.end(), "config: no section [" + section + "]");
  for (const auto& kv : it->second) {
    if (kv.first == key) return kv.second;
  }
  ThrowError(__FILE__, __LINE__,
             "config: no key '" + key + "' in section [" + section + "]");
}

ConfigMap ConfigMap::Parse(const std::string& text) {
  ConfigMap map;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      SCSOT_CHECK(line.back() == ']',
                  StrPrintf("config line %d: unterminated section header",
                            lineno));
      section = Trim(line.substr(1, line.size() - 2));
      SCSOT_CHECK(!section.empty(),
                  StrPrintf("config line %d: empty section name", lineno));
      continue;
    }
    size_t eq = line.find('=');
    SCSOT_CHECK(eq != std::string::npos,
                StrPrintf("config line %d: expected key=value", lineno));
    SCSOT_CHECK(!section.empty(),
                StrPrintf("config line %d: key before any section", lineno));
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    SCSOT_CHECK(!key.empty(), StrPrintf("config line %d: empty key", lineno));
    map.Set(section, key, value);
  }
  return map;
}

ConfigMap ConfigMap::LoadFile(const std::string& path) {
  std::ifstream in(path);
  SCSOT_CHECK(in.good(), "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

std::string ConfigMap::Serialize() const {
  std::ostringstream out;
  for (size_t i = 0; i < section_order_.size(); ++i) {
    if (i > 0) out << '\n';
    out << '[' << section_order_[i] << "]\n";
    for (const auto& kv : sections_.at(section_order_[i])) {
      out << kv.first << " = " << kv.second << '\n';
    }
  }
  return out.str();
}

void ConfigMap::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  SCSOT_CHECK(out.good(), "cannot open config file for writing: " + path);
  out << Serialize();
  SCSOT_CHECK(out.good(), "failed writing config file: " + path);
}

std::vector<std::string> ConfigMap::Sections() const { return section_order_; }

std::vector<std::string> ConfigMap::Keys(const std::string& section) const {
  auto it = sections_.find(section);
  SCSOT_CHECK(it != sections_.end(), "config: no section [" + section + "]");
  std::vector<std::string> keys;
  for (const auto& kv : it->second) keys.push_back(kv.first);
  return keys;
}

void ExperimentConfig::Validate() const {
  corpus.Validate();
  encoder.Validate();
  decoder.Validate();
  diar.Validate();
  train.Validate();
  decode.Validate();
}

ExperimentSetup ExperimentConfig::Setup() const {
  ExperimentSetup setup;
  setup.encoder = encoder;
  setup.decoder = decoder;
  setup.diar = diar;
  setup.train = train;
  setup.num_text = corpus.num_text;
  setup.feature_dim = corpus.feature_dim;
  return setup;
}

ExperimentConfig ExperimentConfig::FromMap(const ConfigMap& map) {
  ExperimentConfig c;
  for (const std::string& section : map.Sections()) {
    for (const std::string& key : map.Keys(section)) {
      const std::string& value = map.Get(section, key);
      auto b = [&] { return ParseBool(section, key, value); };
      auto i = [&] { return ParseInt(section, key, value); };
      auto d = [&] { return ParseDouble(section, key, value); };
      bool known = true;
      if (section == "corpus") {
        if (key == "num_text") c.corpus.num_text = i();
        else if (key == "feature_dim") c.corpus.feature_dim = i();
        else if (key == "speaker_pool") c.corpus.speaker_pool = i();
        else if (key == "s_max") c.corpus.s_max = i();
        else if (key == "mixtures_per_count") c.corpus.mixtures_per_count = i();
        else if (key == "min_tokens") c.corpus.min_tokens = i();
        else if (key == "max_tokens") c.corpus.max_tokens = i();
        else if (key == "frames_per_token") c.corpus.frames_per_token = i();
        else if (key == "max_offset") c.corpus.max_offset = i();
        else if (key == "noise_scale") c.corpus.noise_scale = d();
        else if (key == "frame_rate") c.corpus.frame_rate = d();
        else known = false;
      } else if (section == "model") {
        if (key == "enc_layers") c.encoder.layers = i();
        else if (key == "enc_heads") c.encoder.heads = i();
        else if (key == "enc_hidden") c.encoder.hidden = i();
        else if (key == "enc_ffn") c.encoder.ffn = i();
        else if (key == "enc_conv_kernel") c.encoder.conv_kernel = i();
        else if (key == "subsample") c.encoder.subsample = i();
        else if (key == "dec_layers") c.decoder.layers = i();
        else if (key == "dec_heads") c.decoder.heads = i();
        else if (key == "dec_hidden") c.decoder.hidden = i();
        else if (key == "dec_ffn") c.decoder.ffn = i();
        else if (key == "attractor_dim") c.decoder.attractor_dim = i();
        else if (key == "use_speaker_emb") c.decoder.use_speaker_emb = b();
        else if (key == "use_activity_penalty")
          c.decoder.use_activity_penalty = b();
        else if (key == "penalty_c") c.decoder.penalty_c = d();
        else if (key == "theta") c.decoder.theta = d();
        else known = false;
      } else if (section == "diar") {
        if (key == "shared_encoder") c.diar.shared_encoder = b();
        else if (key == "layers") c.diar.layers = i();
        else if (key == "heads") c.diar.heads = i();
        else if (key == "hidden") c.diar.hidden = i();
        else if (key == "ffn") c.diar.ffn = i();
        else if (key == "conv_kernel") c.diar.conv_kernel = i();
        else if (key == "tau") c.diar.tau = d();
        else if (key == "max_attractors") c.diar.max_attractors = i();
        else if (key == "shuffle_frames") c.diar.shuffle_frames = b();
        else known = false;
      } else if (section == "train") {
        if (key == "alpha") c.train.alpha = d();
        else if (key == "lr") c.train.lr = d();
        else if (key == "warmup") c.train.warmup = i();
        else if (key == "epochs") c.train.epochs = i();
        else if (key == "max_steps") c.train.max_steps = i();
        else if (key == "frame_budget") c.train.frame_budget = i();
        else if (key == "seed") c.train.seed = static_cast<uint64_t>(
            std::stoull(value));
        else if (key == "mtl") c.train.mtl = b();
        else if (key == "terminal")
          c.train.terminal = TerminalModeFromName(value);
        else if (key == "activity_source")
          c.train.activity_source = ActivitySourceFromName(value);
        else if (key == "attractor_source")
          c.train.attractor_source = AttractorSourceFromName(value);
        else if (key == "clip_norm") c.train.clip_norm = d();
        else if (key == "log_every") c.train.log_every = i();
        else if (key == "eval_every") c.train.eval_every = i();
        else known = false;
      } else if (section == "decode") {
        if (key == "beam") c.decode.beam = i();
        else if (key == "max_len") c.decode.max_len = i();
        else if (key == "termination")
          c.decode.termination = TerminationFromName(value);
        else if (key == "conditioning")
          c.decode.conditioning = ConditioningSourceFromName(value);
        else if (key == "tau") c.decode.tau = d();
        else known = false;
      } else {
        ThrowError(__FILE__, __LINE__,
                   "config: unknown section [" + section + "]");
      }
      if (!known) {
        ThrowError(__FILE__, __LINE__, "config: unknown key '" + key +
                                           "' in section [" + section + "]");
      }
    }
  }
  c.Validate();
  return c;
}

ExperimentConfig ExperimentConfig::LoadFile(const std::string& path) {
  return FromMap(ConfigMap::LoadFile(path));
}

ConfigMap ExperimentConfig::ToMap() const {
  ConfigMap m;
  m.Set("corpus", "num_text", std::to_string(corpus.num_text));
  m.Set("corpus", "feature_dim", std::to_string(corpus.feature_dim));
  m.Set("corpus", "speaker_pool", std::to_string(corpus.speaker_pool));
  m.Set("corpus", "s_max", std::to_string(corpus.s_max));
  m.Set("corpus", "mixtures_per_count",
        std::to_string(corpus.mixtures_per_count));
  m.Set("corpus", "min_tokens", std::to_string(corpus.min_tokens));
  m.Set("corpus", "max_tokens", std::to_string(corpus.max_tokens));
  m.Set("corpus", "frames_per_token", std::to_string(corpus.frames_per_token));
  m.Set("corpus", "max_offset", std::to_string(corpus.max_offset));
  m.Set("corpus", "noise_scale", NumStr(corpus.noise_scale));
  m.Set("corpus", "frame_rate", NumStr(corpus.frame_rate));

  m.Set("model", "enc_layers", std::to_string(encoder.layers));
  m.Set("model", "enc_heads", std::to_string(encoder.heads));
  m.Set("model", "enc_hidden", std::to_string(encoder.hidden));
  m.Set("model", "enc_ffn", std::to_string(encoder.ffn));
  m.Set("model", "enc_conv_kernel", std::to_string(encoder.conv_kernel));
  m.Set("model", "subsample", std::to_string(encoder.subsample));
  m.Set("model", "dec_layers", std::to_string(decoder.layers));
  m.Set("model", "dec_heads", std::to_string(decoder.heads));
  m.Set("model", "dec_hidden", std::to_string(decoder.hidden));
  m.Set("model", "dec_ffn", std::to_string(decoder.ffn));
  m.Set("model", "attractor_dim", std::to_string(decoder.attractor_dim));
  m.Set("model", "use_speaker_emb", BoolStr(decoder.use_speaker_emb));
  m.Set("model", "use_activity_penalty",
        BoolStr(decoder.use_activity_penalty));
  m.Set("model", "penalty_c", NumStr(decoder.penalty_c));
  m.Set("model", "theta", NumStr(decoder.theta));

  m.Set("diar", "shared_encoder", BoolStr(diar.shared_encoder));
  m.Set("diar", "layers", std::to_string(diar.layers));
  m.Set("diar", "heads", std::to_string(diar.heads));
  m.Set("diar", "hidden", std::to_string(diar.hidden));
  m.Set("diar", "ffn", std::to_string(diar.ffn));
  m.Set("diar", "conv_kernel", std::to_string(diar.conv_kernel));
  m.Set("diar", "tau", NumStr(diar.tau));
  m.Set("diar", "max_attractors", std::to_string(diar.max_attractors));
  m.Set("diar", "shuffle_frames", BoolStr(diar.shuffle_frames));

  m.Set("train", "alpha", NumStr(train.alpha));
  m.Set("train", "lr", NumStr(train.lr));
  m.Set("train", "warmup", std::to_string(train.warmup));
  m.Set("train", "epochs", std::to_string(train.epochs));
  m.Set("train", "max_steps", std::to_string(train.max_steps));
  m.Set("train", "frame_budget", std::to_string(train.frame_budget));
  m.Set("train", "seed", std::to_string(train.seed));
  m.Set("train", "mtl", BoolStr(train.mtl));
  m.Set("train", "terminal", TerminalModeName(train.terminal));
  m.Set("train", "activity_source",
        ActivitySourceName(train.activity_source));
  m.Set("train", "attractor_source",
        AttractorSourceName(train.attractor_source));
  m.Set("train", "clip_norm", NumStr(train.clip_norm));
  m.Set("train", "log_every", std::to_string(train.log_every));
  m.Set("train", "eval_every", std::to_string(train.eval_every));

  m.Set("decode", "beam", std::to_string(decode.beam));
  m.Set("decode", "max_len", std::to_string(decode.max_len));
  m.Set("decode", "termination", TerminationName(decode.termination));
  m.Set("decode", "conditioning",
        ConditioningSourceName(decode.conditioning));
  m.Set("decode", "tau", NumStr(decode.tau));
  return m;
}

void ExperimentConfig::SaveFile(const std::string& path) const {
  ToMap().SaveFile(path);
}

std::string AblationRow::Name() const {
  switch (id) {
    case 2:
      return "sot";
    case 3:
      return "sot_mtl";
    case 4:
      return "scsot_spk";
    case 5:
      return "scsot_spk_mtl";
    case 6:
      return "scsot_act_mtl";
    case 7:
      return "scsot_both_mtl";
    default:
      return "scsot_both_mtl_oracle";
  }
}

void AblationRow::ApplyTo(ExperimentConfig* config) const {
  config->decoder.use_speaker_emb = use_speaker_emb;
  config->decoder.use_activity_penalty = use_activity_penalty;
  config->train.mtl = mtl;
  config->train.terminal = Terminal();
  config->train.activity_source = ActivitySource::kOracle;
  config->train.attractor_source = use_speaker_emb
                                       ? AttractorSource::kPredicted
                                       : AttractorSource::kNone;
  config->decode.termination =
      Terminal() == TerminalMode::kScTerminal ? Termination::kCount
                                              : Termination::kEos;
  if (oracle_activity) {
    config->decode.conditioning = ConditioningSource::kOracle;
  } else if (use_speaker_emb || use_activity_penalty) {
    config->decode.conditioning = ConditioningSource::kPredicted;
  } else {
    config->decode.conditioning = ConditioningSource::kNone;
  }
}

const std::vector<AblationRow>& AblationRows() {
  static const std::vector<AblationRow> rows = {
      {2, false, false, false, false},  // SOT baseline
      {3, false, false, true, false},   // SOT + MTL
      {4, true, false, false, false},   // speaker embeddings only
      {5, true, false, true, false},    // speaker embeddings + MTL
      {6, false, true, true, false},    // activity penalty + MTL
      {7, true, true, true, false},     // both conditionings + MTL
      {8, true, true, true, true},      // row 7 decoded with oracle activity
  };
  return rows;
}

const AblationRow& AblationRowOf(int id) {
  for (const AblationRow& row : AblationRows()) {
    if (row.id == id) return row;
  }
  ThrowError(__FILE__, __LINE__,
             StrPrintf("ablation row %d is not in 2..8", id));
}

}  // namespace scsot
