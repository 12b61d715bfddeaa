// core/data-synth.cc

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

#include "core/data-synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "core/rng.h"
#include "json.hpp"

namespace codert {

void TaskSpec::Validate() const {
  if (vocab_size < 2) throw std::invalid_argument("task needs vocab_size >= 2");
  if (feature_dim < 1) throw std::invalid_argument("task needs feature_dim >= 1");
  if (min_duration < 1 || max_duration < min_duration)
    throw std::invalid_argument("bad duration range");
  if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");
  if (min_utterance_tokens < 0 || max_utterance_tokens < min_utterance_tokens)
    throw std::invalid_argument("bad utterance length range");
  for (const auto& p : confusion_pairs) {
    if (p.a < 0 || p.a >= vocab_size || p.b < 0 || p.b >= vocab_size || p.a == p.b)
      throw std::invalid_argument("confusion pair tokens out of range");
    if (p.overlap < 0.0 || p.overlap > 1.0)
      throw std::invalid_argument("confusion overlap must be in [0, 1]");
  }
}

std::string TaskSpec::ToJson() const {
  nlohmann::ordered_json j;
  j["vocab_size"] = vocab_size;
  j["feature_dim"] = feature_dim;
  j["duration_range"] = {min_duration, max_duration};
  j["noise_sigma"] = noise_sigma;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (const auto& p : confusion_pairs) pairs.push_back({p.a, p.b, p.overlap});
  j["confusion_pairs"] = pairs;
  j["utterance_len_range"] = {min_utterance_tokens, max_utterance_tokens};
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

TaskSpec TaskSpec::FromJson(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("task spec is not valid JSON: ") + e.what());
  }
  TaskSpec spec;
  spec.vocab_size = j.value("vocab_size", spec.vocab_size);
  spec.feature_dim = j.value("feature_dim", spec.feature_dim);
  if (j.contains("duration_range")) {
    spec.min_duration = j["duration_range"][0].get<int32_t>();
    spec.max_duration = j["duration_range"][1].get<int32_t>();
  }
  spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
  if (j.contains("confusion_pairs")) {
    for (const auto& p : j["confusion_pairs"]) {
      spec.confusion_pairs.push_back(
          {p[0].get<int32_t>(), p[1].get<int32_t>(), p[2].get<double>()});
    }
  }
  if (j.contains("utterance_len_range")) {
    spec.min_utterance_tokens = j["utterance_len_range"][0].get<int32_t>();
    spec.max_utterance_tokens = j["utterance_len_range"][1].get<int32_t>();
  }
  spec.seed = j.value("seed", spec.seed);
  spec.Validate();
  return spec;
}

namespace {

// Token prototypes: durations for every token, then entries token by token,
// then one fresh prototype per confusion pair, all from the "prototypes"
// stream in that order.
std::vector<Tensor> MakePrototypes(const TaskSpec& spec) {
  Rng rng = Rng::ForStream(spec.seed, "prototypes");
  std::vector<int64_t> durations(static_cast<size_t>(spec.vocab_size));
  for (auto& d : durations) d = rng.NextInt(spec.min_duration, spec.max_duration);

  std::vector<Tensor> protos(static_cast<size_t>(spec.vocab_size));
  for (int32_t v = 0; v < spec.vocab_size; ++v) {
    Tensor p({durations[static_cast<size_t>(v)], spec.feature_dim});
    for (int64_t i = 0; i < p.NumElements(); ++i) p(i) = rng.Gaussian();
    protos[static_cast<size_t>(v)] = std::move(p);
  }

  for (const auto& pair : spec.confusion_pairs) {
    const Tensor& pa = protos[static_cast<size_t>(pair.a)];
    Tensor fresh(pa.Dims());
    for (int64_t i = 0; i < fresh.NumElements(); ++i) fresh(i) = rng.Gaussian();
    Tensor pb(pa.Dims());
    for (int64_t i = 0; i < pb.NumElements(); ++i)
      pb(i) = pair.overlap * pa(i) + (1.0 - pair.overlap) * fresh(i);
    protos[static_cast<size_t>(pair.b)] = std::move(pb);
  }
  return protos;
}

}  // namespace

Corpus GenerateCorpus(const TaskSpec& spec, int64_t num_utterances) {
  spec.Validate();
  if (num_utterances < 0) throw std::invalid_argument("num_utterances must be >= 0");

  const std::vector<Tensor> protos = MakePrototypes(spec);

  Corpus corpus;
  corpus.spec = spec;
  corpus.utterances.reserve(static_cast<size_t>(num_utterances));

  Rng rng = Rng::ForStream(spec.seed, "utterances");
  for (int64_t i = 0; i < num_utterances; ++i) {
    Utterance utt;
    const int64_t n_tokens =
        rng.NextInt(spec.min_utterance_tokens, spec.max_utterance_tokens);
    utt.tokens.resize(static_cast<size_t>(n_tokens));
    int64_t total_frames = 0;
    for (auto& tok : utt.tokens) {
      tok = static_cast<int32_t>(rng.NextInt(0, spec.vocab_size - 1));
      total_frames += protos[static_cast<size_t>(tok)].Dim(0);
    }
    // A zero-token utterance still needs one frame to be a valid input.
    if (total_frames == 0) total_frames = 1;

    utt.features = Tensor({total_frames, spec.feature_dim});
    int64_t row = 0;
    for (int32_t tok : utt.tokens) {
      const Tensor& p = protos[static_cast<size_t>(tok)];
      for (int64_t r = 0; r < p.Dim(0); ++r) {
        for (int64_t j = 0; j < spec.feature_dim; ++j) utt.features(row, j) = p(r, j);
        ++row;
      }
    }
    for (int64_t j = 0; j < utt.features.NumElements(); ++j)
      utt.features(j) += spec.noise_sigma * rng.Gaussian();

    corpus.utterances.push_back(std::move(utt));
  }
  return corpus;
}

Tensor SequenceBatch::UtteranceFeatures(int64_t index) const {
  const int64_t t_len = feature_lengths[static_cast<size_t>(index)];
  const int64_t dim = features.Dim(2);
  Tensor out({t_len, dim});
  for (int64_t t = 0; t < t_len; ++t) {
    for (int64_t j = 0; j < dim; ++j) out(t, j) = features(index, t, j);
  }
  return out;
}

SequenceBatch PackBatch(const Corpus& corpus, const std::vector<int64_t>& indices) {
  SequenceBatch batch;
  const int64_t b_size = static_cast<int64_t>(indices.size());
  int64_t t_max = 1;
  for (int64_t idx : indices) {
    t_max = std::max(t_max, corpus.utterances[static_cast<size_t>(idx)].features.Dim(0));
  }
  batch.features = Tensor({b_size, t_max, corpus.spec.feature_dim});
  for (int64_t i = 0; i < b_size; ++i) {
    const Utterance& utt = corpus.utterances[static_cast<size_t>(indices[static_cast<size_t>(i)])];
    batch.feature_lengths.push_back(utt.features.Dim(0));
    batch.labels.push_back(utt.tokens);
    batch.label_lengths.push_back(static_cast<int64_t>(utt.tokens.size()));
    for (int64_t t = 0; t < utt.features.Dim(0); ++t) {
      for (int64_t j = 0; j < corpus.spec.feature_dim; ++j)
        batch.features(i, t, j) = utt.features(t, j);
    }
  }
  return batch;
}

std::vector<SequenceBatch> MakeBatches(const Corpus& corpus, int64_t batch_size,
                                       uint64_t shuffle_seed) {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (corpus.utterances.empty()) throw std::invalid_argument("empty corpus");

  std::vector<int64_t> order(corpus.utterances.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::ForStream(shuffle_seed, "shuffle");
  for (int64_t i = static_cast<int64_t>(order.size()) - 1; i > 0; --i) {
    const int64_t j = rng.NextInt(0, i);
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }

  std::vector<SequenceBatch> batches;
  for (size_t start = 0; start < order.size(); start += static_cast<size_t>(batch_size)) {
    const size_t end = std::min(order.size(), start + static_cast<size_t>(batch_size));
    batches.push_back(PackBatch(
        corpus, std::vector<int64_t>(order.begin() + static_cast<int64_t>(start),
                                     order.begin() + static_cast<int64_t>(end))));
  }
  return batches;
}

void SplitCorpus(const Corpus& corpus, double train_frac, double dev_frac,
                 double test_frac, Corpus* train, Corpus* dev, Corpus* test) {
  for (double f : {train_frac, dev_frac, test_frac}) {
    if (f < 0.0 || f > 1.0) throw std::invalid_argument("split fraction out of range");
  }
  if (std::abs(train_frac + dev_frac + test_frac - 1.0) > 1e-9)
    throw std::invalid_argument("split fractions must sum to 1");

  std::vector<int64_t> order(corpus.utterances.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::ForStream(corpus.spec.seed, "split");
  for (int64_t i = static_cast<int64_t>(order.size()) - 1; i > 0; --i) {
    const int64_t j = rng.NextInt(0, i);
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }

  const int64_t n = static_cast<int64_t>(order.size());
  const int64_t n_train = static_cast<int64_t>(std::floor(train_frac * static_cast<double>(n)));
  const int64_t n_dev = static_cast<int64_t>(std::floor(dev_frac * static_cast<double>(n)));

  train->spec = dev->spec = test->spec = corpus.spec;
  train->utterances.clear();
  dev->utterances.clear();
  test->utterances.clear();
  for (int64_t i = 0; i < n; ++i) {
    const Utterance& utt = corpus.utterances[static_cast<size_t>(order[static_cast<size_t>(i)])];
    if (i < n_train) {
      train->utterances.push_back(utt);
    } else if (i < n_train + n_dev) {
      dev->utterances.push_back(utt);
    } else {
      test->utterances.push_back(utt);
    }
  }
}

namespace {

template <typename T>
void WriteRaw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T ReadRaw(std::ifstream& in) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("corpus file truncated");
  return value;
}

}  // namespace

void SaveCorpus(const Corpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream spec_out(dir + "/spec.json", std::ios::binary);
    if (!spec_out) throw std::runtime_error("cannot write " + dir + "/spec.json");
    spec_out << corpus.spec.ToJson();
  }
  {
    std::ofstream bin(dir + "/frames.bin", std::ios::binary);
    if (!bin) throw std::runtime_error("cannot write " + dir + "/frames.bin");
    const uint64_t count = corpus.utterances.size();
    WriteRaw(bin, count);
    WriteRaw(bin, static_cast<uint32_t>(corpus.spec.feature_dim));
    uint64_t offset = 0;
    WriteRaw(bin, offset);
    for (const auto& utt : corpus.utterances) {
      offset += static_cast<uint64_t>(utt.features.Dim(0));
      WriteRaw(bin, offset);
    }
    for (const auto& utt : corpus.utterances) {
      for (int64_t i = 0; i < utt.features.NumElements(); ++i) {
        WriteRaw(bin, static_cast<float>(utt.features(i)));
      }
    }
  }
  {
    std::ofstream labels(dir + "/labels.txt", std::ios::binary);
    if (!labels) throw std::runtime_error("cannot write " + dir + "/labels.txt");
    for (const auto& utt : corpus.utterances) {
      for (size_t i = 0; i < utt.tokens.size(); ++i) {
        if (i) labels << ' ';
        labels << utt.tokens[i];
      }
      labels << '\n';
    }
  }
}

Corpus LoadCorpus(const std::string& dir) {
  Corpus corpus;
  {
    std::ifstream spec_in(dir + "/spec.json", std::ios::binary);
    if (!spec_in) throw std::runtime_error("cannot read " + dir + "/spec.json");
    std::stringstream ss;
    ss << spec_in.rdbuf();
    corpus.spec = TaskSpec::FromJson(ss.str());
  }

  std::ifstream bin(dir + "/frames.bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot read " + dir + "/frames.bin");
  const uint64_t count = ReadRaw<uint64_t>(bin);
  const uint32_t dim = ReadRaw<uint32_t>(bin);
  if (dim != static_cast<uint32_t>(corpus.spec.feature_dim))
    throw std::runtime_error("frames.bin feature dim does not match spec.json");
  std::vector<uint64_t> offsets(count + 1);
  for (auto& o : offsets) o = ReadRaw<uint64_t>(bin);

  std::ifstream labels(dir + "/labels.txt", std::ios::binary);
  if (!labels) throw std::runtime_error("cannot read " + dir + "/labels.txt");

  for (uint64_t i = 0; i < count; ++i) {
    Utterance utt;
    const int64_t frames = static_cast<int64_t>(offsets[i + 1] - offsets[i]);
    utt.features = Tensor({frames, corpus.spec.feature_dim});
    for (int64_t e = 0; e < utt.features.NumElements(); ++e)
      utt.features(e) = static_cast<double>(ReadRaw<float>(bin));

    std::string line;
    if (!std::getline(labels, line)) throw std::runtime_error("labels.txt truncated");
    std::istringstream ls(line);
    int32_t tok;
    while (ls >> tok) utt.tokens.push_back(tok);

    corpus.utterances.push_back(std::move(utt));
  }
  return corpus;
}

}  // namespace codert
