// scsot/serialize.cc

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

#include "scsot/serialize.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "scsot/common.h"

namespace scsot {

const std::string& TokenVocab::SurfaceOf(int id) const {
  SCSOT_CHECK(id >= 0 && id < TotalSize(),
              StrPrintf("token id %d out of range [0,%d)", id, TotalSize()));
  return surface[static_cast<size_t>(id)];
}

int TokenVocab::IdOf(const std::string& s) const {
  for (size_t i = 0; i < surface.size(); ++i) {
    if (surface[i] == s) return static_cast<int>(i);
  }
  ThrowError(__FILE__, __LINE__, "unknown token surface: " + s);
}

TokenVocab TokenVocab::Make(int num_text) {
  SCSOT_CHECK(num_text >= 1, "vocabulary needs at least one text token");
  TokenVocab v;
  v.num_text = num_text;
  v.surface.reserve(static_cast<size_t>(num_text) + 3);
  for (int i = 0; i < num_text; ++i) v.surface.push_back("t" + std::to_string(i));
  v.surface.push_back("<eos>");
  v.surface.push_back("<sc>");
  v.surface.push_back("<sos>");
  return v;
}

void TokenVocab::Save(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  SCSOT_CHECK(os.good(), "cannot open for writing: " + path);
  for (int id = 0; id < TotalSize(); ++id) {
    const char* kind = "text";
    if (id == Eos()) kind = "eos";
    else if (id == Sc()) kind = "sc";
    else if (id == Sos()) kind = "sos";
    os << id << '\t' << surface[static_cast<size_t>(id)] << '\t' << kind << '\n';
  }
  SCSOT_CHECK(os.good(), "write failed: " + path);
}

TokenVocab TokenVocab::Load(const std::string& path) {
  std::ifstream is(path);
  SCSOT_CHECK(is.good(), "cannot open vocabulary: " + path);
  std::vector<std::string> surfaces;
  int eos = -1, sc = -1, sos = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id_str, surf, kind;
    SCSOT_CHECK(std::getline(ls, id_str, '\t') && std::getline(ls, surf, '\t') &&
                    std::getline(ls, kind),
                StrPrintf("%s:%d: expected id<TAB>surface<TAB>kind",
                          path.c_str(), line_no));
    int id = std::stoi(id_str);
    SCSOT_CHECK(id == static_cast<int>(surfaces.size()),
                StrPrintf("%s:%d: ids must be dense and ascending", path.c_str(),
                          line_no));
    surfaces.push_back(surf);
    if (kind == "eos") eos = id;
    else if (kind == "sc") sc = id;
    else if (kind == "sos") sos = id;
    else SCSOT_CHECK(kind == "text", StrPrintf("%s:%d: unknown kind '%s'",
                                               path.c_str(), line_no,
                                               kind.c_str()));
  }
  int total = static_cast<int>(surfaces.size());
  SCSOT_CHECK(total >= 4 && eos == total - 3 && sc == total - 2 && sos == total - 1,
              "vocabulary must end with eos, sc, sos in that order: " + path);
  TokenVocab v;
  v.num_text = total - 3;
  v.surface = std::move(surfaces);
  return v;
}

const char* TerminalModeName(TerminalMode mode) {
  return mode == TerminalMode::kEosTerminal ? "eos_terminal" : "sc_terminal";
}

TerminalMode TerminalModeFromName(const std::string& name) {
  if (name == "eos_terminal" || name == "eos") return TerminalMode::kEosTerminal;
  if (name == "sc_terminal" || name == "sc") return TerminalMode::kScTerminal;
  ThrowError(__FILE__, __LINE__, "unknown terminal mode: " + name);
}

std::vector<int> FifoOrder(const std::vector<int64_t>& start_frames) {
  SCSOT_CHECK(!start_frames.empty(), "FifoOrder: empty start list");
  std::vector<int> order(start_frames.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return start_frames[static_cast<size_t>(a)] <
           start_frames[static_cast<size_t>(b)];
  });
  return order;
}

SerializedTarget SerializeFifo(const std::vector<std::vector<int>>& transcripts,
                               const std::vector<int64_t>& start_frames,
                               TerminalMode mode, const TokenVocab& vocab) {
  SCSOT_CHECK(!transcripts.empty(), "SerializeFifo: no speakers");
  SCSOT_CHECK(transcripts.size() == start_frames.size(),
              "SerializeFifo: transcript/start count mismatch");
  for (size_t s = 0; s < transcripts.size(); ++s) {
    SCSOT_CHECK(!transcripts[s].empty(),
                StrPrintf("SerializeFifo: speaker %zu has an empty transcript", s));
    for (int id : transcripts[s]) {
      SCSOT_CHECK(vocab.IsText(id),
                  StrPrintf("SerializeFifo: non-text token id %d", id));
    }
  }
  std::vector<int> order = FifoOrder(start_frames);
  SerializedTarget target;
  target.mode = mode;
  int speaker_index = 0;
  for (size_t rank = 0; rank < order.size(); ++rank) {
    const std::vector<int>& tr = transcripts[static_cast<size_t>(order[rank])];
    for (int id : tr) {
      target.tokens.push_back(id);
      target.speaker_index_per_token.push_back(speaker_index);
    }
    bool last = (rank + 1 == order.size());
    if (mode == TerminalMode::kScTerminal) {
      target.tokens.push_back(vocab.Sc());
      target.speaker_index_per_token.push_back(speaker_index);
      ++speaker_index;
    } else if (!last) {
      target.tokens.push_back(vocab.Sc());
      target.speaker_index_per_token.push_back(speaker_index);
      ++speaker_index;
    } else {
      target.tokens.push_back(vocab.Eos());
      target.speaker_index_per_token.push_back(speaker_index);
    }
  }
  return target;
}

std::vector<std::vector<int>> Deserialize(const std::vector<int>& tokens,
                                          TerminalMode mode,
                                          const TokenVocab& vocab) {
  std::vector<std::vector<int>> segments;
  std::vector<int> current;
  if (mode == TerminalMode::kEosTerminal) {
    for (int id : tokens) {
      if (id == vocab.Eos()) break;
      if (id == vocab.Sc()) {
        segments.push_back(std::move(current));
        current.clear();
      } else if (id != vocab.Sos()) {
        current.push_back(id);
      }
    }
    // With or without the terminal, the trailing run is a segment.
    segments.push_back(std::move(current));
  } else {
    for (int id : tokens) {
      if (id == vocab.Sc()) {
        segments.push_back(std::move(current));
        current.clear();
      } else if (id != vocab.Sos() && id != vocab.Eos()) {
        current.push_back(id);
      }
    }
    if (!current.empty()) segments.push_back(std::move(current));
  }
  return segments;
}

int CountSegments(const std::vector<int>& tokens, TerminalMode mode,
                  const TokenVocab& vocab) {
  int sc = 0;
  for (int id : tokens) {
    if (id == vocab.Sc()) ++sc;
  }
  return mode == TerminalMode::kEosTerminal ? sc + 1 : sc;
}

}  // namespace scsot
