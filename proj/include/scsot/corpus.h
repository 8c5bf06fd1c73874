// scsot/corpus.h

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

#ifndef SCSOT_CORPUS_H_
#define SCSOT_CORPUS_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "scsot/rng.h"
#include "scsot/serialize.h"
#include "scsot/tensor.h"

namespace scsot {

// Synthetic stand-in for a speaker: a per-token prototype table shared by
// the whole corpus plus a per-speaker identity offset added to every frame.
// Tokens stay recoverable across speakers while speakers stay separable.
struct SpeakerSpec {
  int speaker_id = -1;
  Tensor prototype_table;  // [num_text, F]
  Tensor identity_offset;  // [F], nonzero norm
};

struct UtteranceSpec {
  int speaker_id = -1;
  std::vector<int> token_ids;  // text ids, non-empty
  int frames_per_token = 1;
  int64_t start_frame = 0;

  int64_t NumFrames() const {
    return static_cast<int64_t>(token_ids.size()) * frames_per_token;
  }
  int64_t EndFrame() const { return start_frame + NumFrames(); }
};

struct Segment {
  int speaker_id = -1;
  int64_t start_frame = 0;
  int64_t end_frame = 0;
};

// One overlapped recording.  Segments and transcripts are stored in
// utterance order, which is not necessarily start-time order; FIFO sorting
// happens downstream where targets and label columns are built.
struct Mixture {
  std::string id;
  Tensor features;  // [T, F]
  std::vector<Segment> segments;
  std::vector<std::vector<int>> transcripts;
  int num_speakers = 0;
};

// Frame-level speaker activity, columns in FIFO (start-time) order.
struct ActivityLabels {
  Tensor labels;  // [T, S] of {0,1}
  double frame_rate = 100.0;
};

struct CorpusConfig {
  int num_text = 16;
  int feature_dim = 8;
  int speaker_pool = 6;
  int s_max = 3;
  int mixtures_per_count = 8;  // mixtures generated per speaker count 1..s_max
  int min_tokens = 3;
  int max_tokens = 8;
  int frames_per_token = 4;
  int64_t max_offset = 24;  // bound of each uniform start-time increment
  double noise_scale = 0.1;
  double frame_rate = 100.0;

  void Validate() const;
};

// Shared prototype table plus per-speaker offsets, all drawn from `seed`.
std::vector<SpeakerSpec> MakeSpeakerPool(const CorpusConfig& config,
                                         uint64_t seed);

// Additively mixes utterances into one recording and draws i.i.d. Gaussian
// noise with the given scale from `seed`.  At most one utterance per speaker.
Mixture Mix(const std::vector<UtteranceSpec>& utterances,
            const std::vector<SpeakerSpec>& speakers, double noise_scale,
            uint64_t seed, const std::string& id);

// Deterministic corpus: mixture i derives all of its randomness from
// (seed, i), so any generation order yields bit-identical results.
std::vector<Mixture> GenerateCorpus(const CorpusConfig& config, uint64_t seed);

ActivityLabels ActivityLabelsOf(const Mixture& mixture, double frame_rate);

// Held-out split.  Every hold_out_every-th mixture of each speaker-count
// group lands in the second (test) vector, so both splits cover every count
// and share the corpus speaker pool.  hold_out_every must be >= 2.
std::pair<std::vector<Mixture>, std::vector<Mixture>> SplitCorpus(
    const std::vector<Mixture>& mixtures, int hold_out_every);

// Feature file: magic "SCSOTFEA", u32 T, u32 F (little-endian), then T*F
// little-endian f32 values row-major.
void WriteFeatureFile(const std::string& path, const Tensor& features);
Tensor ReadFeatureFile(const std::string& path);

// Corpus directory: manifest.jsonl (one record per mixture) plus one
// feature file per mixture.  Loading goes through the f32 files, so saved
// and loaded corpora are bit-identical to each other across runs.
void SaveCorpusDir(const std::string& dir, const std::vector<Mixture>& mixtures);
std::vector<Mixture> LoadCorpusDir(const std::string& dir);

}  // namespace scsot

#endif  // SCSOT_CORPUS_H_
