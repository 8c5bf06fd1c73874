// scsot/include/scsot/config.h

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

#ifndef SCSOT_CONFIG_H_
#define SCSOT_CONFIG_H_

#include <map>
#include <string>
#include <vector>

#include "scsot/corpus.h"
#include "scsot/decoding.h"
#include "scsot/training.h"

namespace scsot {

// Sectioned key=value text, '#' and ';' comments.  Sections and keys keep
// a stable order so a written file is byte-reproducible.
class ConfigMap {
 public:
  void Set(const std::string& section, const std::string& key,
           const std::string& value);
  bool Has(const std::string& section, const std::string& key) const;
  const std::string& Get(const std::string& section,
                         const std::string& key) const;

  static ConfigMap Parse(const std::string& text);
  static ConfigMap LoadFile(const std::string& path);
  std::string Serialize() const;
  void SaveFile(const std::string& path) const;

  // Sections and keys in insertion order.
  std::vector<std::string> Sections() const;
  std::vector<std::string> Keys(const std::string& section) const;

 private:
  std::vector<std::string> section_order_;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>>
      sections_;
};

// Everything one experiment needs, grouped by module.  Defaults describe
// the desk-scale setup the tests train in minutes.
struct ExperimentConfig {
  CorpusConfig corpus;
  EncoderConfig encoder;
  DecoderConfig decoder;
  DiarConfig diar;
  TrainConfig train;
  DecodeConfig decode;

  void Validate() const;
  ExperimentSetup Setup() const;

  // Unknown sections or keys are errors; missing entries keep defaults.
  static ExperimentConfig FromMap(const ConfigMap& map);
  static ExperimentConfig LoadFile(const std::string& path);
  ConfigMap ToMap() const;
  void SaveFile(const std::string& path) const;
};

// One conditioning configuration of the ablation table.  Row 2 is the
// unconditioned SOT baseline; rows 4..8 serialize with terminal SC and
// decode by speaker count; row 8 is row 7 decoded with oracle activity.
struct AblationRow {
  int id = 2;
  bool use_speaker_emb = false;
  bool use_activity_penalty = false;
  bool mtl = false;
  bool oracle_activity = false;  // decode-time conditioning source

  TerminalMode Terminal() const {
    return id >= 4 ? TerminalMode::kScTerminal : TerminalMode::kEosTerminal;
  }
  std::string Name() const;
  // Flags, serialization mode, and conditioning sources applied in place;
  // corpus and size settings are left untouched.
  void ApplyTo(ExperimentConfig* config) const;
};

const std::vector<AblationRow>& AblationRows();
const AblationRow& AblationRowOf(int id);

}  // namespace scsot

#endif  // SCSOT_CONFIG_H_
