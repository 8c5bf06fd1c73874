// scsot/corpus.cc

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

#include "scsot/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "scsot/common.h"

namespace scsot {

namespace {

using nlohmann::json;

void WriteU32Le(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t ReadU32Le(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  SCSOT_CHECK(is.good(), "feature file: truncated header");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

constexpr char kFeaMagic[8] = {'S', 'C', 'S', 'O', 'T', 'F', 'E', 'A'};

}  // namespace

void CorpusConfig::Validate() const {
  SCSOT_CHECK(num_text >= 1, "corpus: empty vocabulary");
  SCSOT_CHECK(feature_dim >= 1, "corpus: zero feature dim");
  SCSOT_CHECK(s_max >= 1, "corpus: s_max must be >= 1");
  SCSOT_CHECK(speaker_pool >= s_max, "corpus: speaker pool smaller than s_max");
  SCSOT_CHECK(mixtures_per_count >= 1, "corpus: mixtures_per_count must be >= 1");
  SCSOT_CHECK(min_tokens >= 1 && max_tokens >= min_tokens, "corpus: bad token range");
  SCSOT_CHECK(frames_per_token >= 1, "corpus: frames_per_token must be >= 1");
  SCSOT_CHECK(max_offset >= 0, "corpus: negative max_offset");
  SCSOT_CHECK(noise_scale >= 0.0, "corpus: negative noise scale");
}

std::vector<SpeakerSpec> MakeSpeakerPool(const CorpusConfig& config,
                                         uint64_t seed) {
  config.Validate();
  Rng rng(SplitMix64(seed ^ 0x73706B72));
  Tensor prototypes({config.num_text, config.feature_dim});
  for (int64_t i = 0; i < prototypes.NumElements(); ++i) {
    prototypes.At(i) = rng.Normal();
  }
  std::vector<SpeakerSpec> pool;
  pool.reserve(static_cast<size_t>(config.speaker_pool));
  for (int s = 0; s < config.speaker_pool; ++s) {
    SpeakerSpec spec;
    spec.speaker_id = s;
    spec.prototype_table = prototypes;
    double norm = 0.0;
    while (norm == 0.0) {
      spec.identity_offset = Tensor({config.feature_dim});
      for (int64_t i = 0; i < config.feature_dim; ++i) {
        spec.identity_offset.At(i) = 0.5 * rng.Normal();
        norm += spec.identity_offset.At(i) * spec.identity_offset.At(i);
      }
    }
    pool.push_back(std::move(spec));
  }
  return pool;
}

Mixture Mix(const std::vector<UtteranceSpec>& utterances,
            const std::vector<SpeakerSpec>& speakers, double noise_scale,
            uint64_t seed, const std::string& id) {
  SCSOT_CHECK(!utterances.empty(), "Mix: no utterances");
  std::set<int> seen;
  int64_t total_frames = 0;
  for (const UtteranceSpec& u : utterances) {
    SCSOT_CHECK(u.speaker_id >= 0 &&
                    u.speaker_id < static_cast<int>(speakers.size()),
                StrPrintf("Mix: unknown speaker %d", u.speaker_id));
    SCSOT_CHECK(seen.insert(u.speaker_id).second,
                StrPrintf("Mix: duplicate speaker %d", u.speaker_id));
    SCSOT_CHECK(!u.token_ids.empty(), "Mix: empty utterance");
    SCSOT_CHECK(u.frames_per_token >= 1 && u.start_frame >= 0,
                "Mix: bad utterance spec");
    total_frames = std::max(total_frames, u.EndFrame());
  }
  int64_t feature_dim = speakers[0].prototype_table.Dim(1);

  Mixture mix;
  mix.id = id;
  mix.num_speakers = static_cast<int>(utterances.size());
  mix.features = Tensor::Zeros({total_frames, feature_dim});
  for (const UtteranceSpec& u : utterances) {
    const SpeakerSpec& spk = speakers[static_cast<size_t>(u.speaker_id)];
    SCSOT_CHECK(spk.prototype_table.Dim(1) == feature_dim,
                "Mix: inconsistent feature dims in speaker pool");
    for (size_t n = 0; n < u.token_ids.size(); ++n) {
      int token = u.token_ids[n];
      SCSOT_CHECK(token >= 0 && token < spk.prototype_table.Dim(0),
                  StrPrintf("Mix: token id %d outside prototype table", token));
      for (int rep = 0; rep < u.frames_per_token; ++rep) {
        int64_t t = u.start_frame +
                    static_cast<int64_t>(n) * u.frames_per_token + rep;
        double* row = mix.features.RowPtr(t);
        const double* proto = spk.prototype_table.RowPtr(token);
        for (int64_t f = 0; f < feature_dim; ++f) {
          row[f] += proto[f] + spk.identity_offset.At(f);
        }
      }
    }
    mix.segments.push_back({u.speaker_id, u.start_frame, u.EndFrame()});
    mix.transcripts.push_back(u.token_ids);
  }
  if (noise_scale > 0.0) {
    Rng rng(SplitMix64(seed ^ 0x6E6F6973));
    for (int64_t i = 0; i < mix.features.NumElements(); ++i) {
      mix.features.At(i) += noise_scale * rng.Normal();
    }
  }
  return mix;
}

std::vector<Mixture> GenerateCorpus(const CorpusConfig& config, uint64_t seed) {
  config.Validate();
  std::vector<SpeakerSpec> pool = MakeSpeakerPool(config, seed);
  Rng base(seed);
  std::vector<Mixture> corpus;
  int index = 0;
  for (int count = 1; count <= config.s_max; ++count) {
    for (int rep = 0; rep < config.mixtures_per_count; ++rep, ++index) {
      Rng rng = base.Fork(static_cast<uint64_t>(index));

      // Distinct speakers for this mixture.
      std::vector<int> ids(static_cast<size_t>(config.speaker_pool));
      for (int s = 0; s < config.speaker_pool; ++s) ids[static_cast<size_t>(s)] = s;
      rng.Shuffle(&ids);
      ids.resize(static_cast<size_t>(count));

      // Start times accumulate uniform increments in arrival order, so every
      // later utterance overlaps or follows the earlier ones (ties allowed).
      std::vector<int64_t> starts(static_cast<size_t>(count));
      int64_t cursor = 0;
      for (int k = 0; k < count; ++k) {
        if (k > 0) cursor += rng.UniformInt(0, config.max_offset);
        starts[static_cast<size_t>(k)] = cursor;
      }
      // Utterance list order is a separate shuffle, so FIFO order and list
      // order genuinely differ downstream.
      std::vector<int> arrival(static_cast<size_t>(count));
      for (int k = 0; k < count; ++k) arrival[static_cast<size_t>(k)] = k;
      rng.Shuffle(&arrival);

      std::vector<UtteranceSpec> utts(static_cast<size_t>(count));
      for (int k = 0; k < count; ++k) {
        UtteranceSpec u;
        u.speaker_id = ids[static_cast<size_t>(k)];
        u.frames_per_token = config.frames_per_token;
        u.start_frame = starts[static_cast<size_t>(arrival[static_cast<size_t>(k)])];
        int len = static_cast<int>(
            rng.UniformInt(config.min_tokens, config.max_tokens));
        for (int n = 0; n < len; ++n) {
          u.token_ids.push_back(
              static_cast<int>(rng.UniformInt(0, config.num_text - 1)));
        }
        utts[static_cast<size_t>(k)] = std::move(u);
      }
      corpus.push_back(Mix(utts, pool, config.noise_scale, rng.NextU64(),
                           StrPrintf("mix_%05d", index)));
    }
  }
  return corpus;
}

ActivityLabels ActivityLabelsOf(const Mixture& mixture, double frame_rate) {
  SCSOT_CHECK(!mixture.segments.empty(), "ActivityLabelsOf: no segments");
  int64_t num_frames = mixture.features.Dim(0);
  std::vector<int64_t> starts;
  starts.reserve(mixture.segments.size());
  for (const Segment& seg : mixture.segments) {
    SCSOT_CHECK(seg.end_frame <= num_frames, "segment extends past mixture");
    starts.push_back(seg.start_frame);
  }
  std::vector<int> order = FifoOrder(starts);

  ActivityLabels out;
  out.frame_rate = frame_rate;
  out.labels = Tensor::Zeros({num_frames, static_cast<int64_t>(order.size())});
  for (size_t col = 0; col < order.size(); ++col) {
    const Segment& seg = mixture.segments[static_cast<size_t>(order[col])];
    for (int64_t t = seg.start_frame; t < seg.end_frame; ++t) {
      out.labels.At(t, static_cast<int64_t>(col)) = 1.0;
    }
  }
  return out;
}

std::pair<std::vector<Mixture>, std::vector<Mixture>> SplitCorpus(
    const std::vector<Mixture>& mixtures, int hold_out_every) {
  SCSOT_CHECK(hold_out_every >= 2, "SplitCorpus: hold_out_every must be >= 2");
  std::pair<std::vector<Mixture>, std::vector<Mixture>> out;
  std::map<int, int> seen_per_count;
  for (const Mixture& mix : mixtures) {
    int rank = seen_per_count[mix.num_speakers]++;
    if (rank % hold_out_every == hold_out_every - 1) {
      out.second.push_back(mix);
    } else {
      out.first.push_back(mix);
    }
  }
  return out;
}

void WriteFeatureFile(const std::string& path, const Tensor& features) {
  SCSOT_CHECK(features.Rank() == 2, "WriteFeatureFile: rank-2 tensor required");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  SCSOT_CHECK(os.good(), "cannot open for writing: " + path);
  os.write(kFeaMagic, 8);
  WriteU32Le(os, static_cast<uint32_t>(features.Dim(0)));
  WriteU32Le(os, static_cast<uint32_t>(features.Dim(1)));
  for (int64_t i = 0; i < features.NumElements(); ++i) {
    float f = static_cast<float>(features.At(i));
    uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    WriteU32Le(os, bits);
  }
  SCSOT_CHECK(os.good(), "write failed: " + path);
}

Tensor ReadFeatureFile(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  SCSOT_CHECK(is.good(), "cannot open feature file: " + path);
  char magic[8];
  is.read(magic, 8);
  SCSOT_CHECK(is.good() && std::memcmp(magic, kFeaMagic, 8) == 0,
              "bad feature file magic in " + path);
  int64_t rows = ReadU32Le(is);
  int64_t cols = ReadU32Le(is);
  Tensor out({rows, cols});
  for (int64_t i = 0; i < out.NumElements(); ++i) {
    uint32_t bits = ReadU32Le(is);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    out.At(i) = static_cast<double>(f);
  }
  return out;
}

void SaveCorpusDir(const std::string& dir, const std::vector<Mixture>& mixtures) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir + "/manifest.jsonl", std::ios::trunc);
  SCSOT_CHECK(manifest.good(), "cannot open manifest for writing in " + dir);
  for (const Mixture& m : mixtures) {
    std::string fea_name = m.id + ".fea";
    WriteFeatureFile(dir + "/" + fea_name, m.features);
    json rec;
    rec["id"] = m.id;
    rec["T"] = m.features.Dim(0);
    rec["F"] = m.features.Dim(1);
    rec["num_speakers"] = m.num_speakers;
    json segs = json::array();
    for (const Segment& s : m.segments) {
      segs.push_back({s.speaker_id, s.start_frame, s.end_frame});
    }
    rec["segments"] = segs;
    rec["transcripts"] = m.transcripts;
    rec["features"] = fea_name;
    manifest << rec.dump() << '\n';
  }
  SCSOT_CHECK(manifest.good(), "manifest write failed in " + dir);
}

std::vector<Mixture> LoadCorpusDir(const std::string& dir) {
  std::ifstream manifest(dir + "/manifest.jsonl");
  SCSOT_CHECK(manifest.good(), "cannot open manifest in " + dir);
  std::vector<Mixture> out;
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    Mixture m;
    m.id = rec.at("id").get<std::string>();
    m.num_speakers = rec.at("num_speakers").get<int>();
    for (const auto& seg : rec.at("segments")) {
      m.segments.push_back({seg.at(0).get<int>(), seg.at(1).get<int64_t>(),
                            seg.at(2).get<int64_t>()});
    }
    m.transcripts = rec.at("transcripts").get<std::vector<std::vector<int>>>();
    m.features = ReadFeatureFile(dir + "/" + rec.at("features").get<std::string>());
    SCSOT_CHECK(m.features.Dim(0) == rec.at("T").get<int64_t>() &&
                    m.features.Dim(1) == rec.at("F").get<int64_t>(),
                "manifest/feature shape mismatch for " + m.id);
    SCSOT_CHECK(static_cast<int>(m.segments.size()) == m.num_speakers &&
                    static_cast<int>(m.transcripts.size()) == m.num_speakers,
                "manifest record inconsistent for " + m.id);
    out.push_back(std::move(m));
  }
  SCSOT_CHECK(!out.empty(), "empty corpus in " + dir);
  return out;
}

}  // namespace scsot
