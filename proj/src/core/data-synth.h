// core/data-synth.h

// Copyright 2026  The codert authors

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

#ifndef CODERT_CORE_DATA_SYNTH_H_
#define CODERT_CORE_DATA_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "core/tensor.h"

namespace codert {

// A pair of tokens whose acoustic prototypes are blended:
// proto_b = overlap * proto_a + (1 - overlap) * fresh. overlap = 1 makes
// the two tokens indistinguishable from features alone.
struct ConfusionPair {
  int32_t a = 0;
  int32_t b = 0;
  double overlap = 0.0;
};

// Generator settings for the synthetic token-acoustics task. Every token
// has a fixed prototype frame sequence; utterances concatenate prototypes
// and add iid Gaussian noise.
struct TaskSpec {
  int32_t vocab_size = 32;   // tokens 0..V-1; blank becomes index V
  int32_t feature_dim = 8;
  int32_t min_duration = 2;  // frames per token prototype
  int32_t max_duration = 5;
  double noise_sigma = 0.3;
  std::vector<ConfusionPair> confusion_pairs;
  int32_t min_utterance_tokens = 3;
  int32_t max_utterance_tokens = 8;
  uint64_t seed = 1;

  void Validate() const;
  std::string ToJson() const;
  static TaskSpec FromJson(const std::string& json_text);
};

struct Utterance {
  Tensor features;              // [T, d]
  std::vector<int32_t> tokens;  // length U
};

struct Corpus {
  TaskSpec spec;
  std::vector<Utterance> utterances;
};

// Padded minibatch. Padding regions are zero and never enter the loss:
// all per-utterance computation runs on the true lengths.
struct SequenceBatch {
  Tensor features;  // [B, T_max, d]
  std::vector<int64_t> feature_lengths;
  std::vector<std::vector<int32_t>> labels;
  std::vector<int64_t> label_lengths;

  int64_t BatchSize() const { return static_cast<int64_t>(feature_lengths.size()); }
  Tensor UtteranceFeatures(int64_t index) const;  // [T_i, d] slice copy
};

// Deterministic given spec.seed; prototypes first, then utterances, so
// corpora of different sizes share a prefix.
Corpus GenerateCorpus(const TaskSpec& spec, int64_t num_utterances);

// Shuffles by seed, then packs consecutive runs of batch_size (the last
// batch may be short). Throws on an empty corpus.
std::vector<SequenceBatch> MakeBatches(const Corpus& corpus, int64_t batch_size,
                                       uint64_t shuffle_seed);

SequenceBatch PackBatch(const Corpus& corpus, const std::vector<int64_t>& indices);

// Disjoint deterministic split (seeded by spec.seed); fractions must sum
// to 1.
void SplitCorpus(const Corpus& corpus, double train_frac, double dev_frac,
                 double test_frac, Corpus* train, Corpus* dev, Corpus* test);

// On-disk corpus layout inside a directory:
//   spec.json   - the TaskSpec
//   frames.bin  - u64 count, u32 feature_dim, u64 offsets[count+1] (in
//                 frames), then little-endian f32 frame data, row-major
//   labels.txt  - one utterance per line, space-separated integer tokens
void SaveCorpus(const Corpus& corpus, const std::string& dir);
Corpus LoadCorpus(const std::string& dir);

}  // namespace codert

#endif  // CODERT_CORE_DATA_SYNTH_H_
