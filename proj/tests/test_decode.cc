// tests/test_decode.cc

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

#include "core/decode.h"

#include <cmath>
#include <map>

#include "core/edit-distance.h"
#include "core/rng.h"
#include "core/transducer-lattice.h"
#include "doctest.h"
#include "testing/test-util.h"

using namespace codert;

namespace {

struct TinyModel {
  EncoderConfig enc_cfg;
  DecoderConfig dec_cfg;
  ParamMap enc;
  ParamMap dec;
};

TinyModel MakeTinyModel(uint64_t seed, int32_t vocab_plus_blank = 4) {
  TinyModel m;
  m.enc_cfg = EncoderConfig{1, 4, 2, 0, 2, vocab_plus_blank};
  m.dec_cfg = DecoderConfig{2, 1, 3, vocab_plus_blank, 0.0};
  m.enc = InitEncoderParams(m.enc_cfg, seed);
  m.dec = InitDecoderParams(m.dec_cfg, seed + 1);
  return m;
}

Tensor RandomFrames(Rng* rng, int64_t t_len, int64_t dim, double scale = 2.0) {
  Tensor frames({t_len, dim});
  for (int64_t i = 0; i < frames.NumElements(); ++i)
    frames(i) = rng->Uniform(-scale, scale);
  return frames;
}

// Exhaustive hypothesis oracle: enumerate every token sequence up to
// max_len and score it exactly with the lattice forward algorithm (the sum
// over all alignments). Independent of the beam-search code path.
struct OracleBest {
  std::vector<int32_t> tokens;
  double log_prob;
};

OracleBest ExhaustiveBest(const TinyModel& m, const Tensor& frames, int64_t max_len) {
  const int32_t vocab = m.enc_cfg.output_dim;
  const Tensor enc = EncoderForward(m.enc_cfg, m.enc, frames, nullptr);
  OracleBest best{{}, -std::numeric_limits<double>::infinity()};

  std::vector<int32_t> seq;
  std::function<void()> visit = [&]() {
    const Tensor dec = DecoderForward(m.dec_cfg, m.dec, seq, nullptr, nullptr);
    JointLattice lat = JointLattice::FromLogits(JointForward(enc, dec));
    LabelSequence labels{seq, vocab - 1};
    const double score = -TransducerLoss(&lat, labels);
    if (score > best.log_prob ||
        (score == best.log_prob && seq.size() < best.tokens.size())) {
      best = {seq, score};
    }
    if (static_cast<int64_t>(seq.size()) == max_len) return;
    for (int32_t k = 0; k + 1 < vocab; ++k) {
      seq.push_back(k);
      visit();
      seq.pop_back();
    }
  };
  visit();
  return best;
}

}  // namespace

TEST_CASE("an all-blank model emits nothing") {
  TinyModel m = MakeTinyModel(100);
  // Push the encoder projection bias hard toward blank.
  m.enc.at("proj.b")(3) = 30.0;
  Rng rng(101);
  const Tensor frames = RandomFrames(&rng, 4, 2);
  const DecodeResult r =
      GreedyDecode(m.enc_cfg, m.dec_cfg, m.enc, m.dec, frames, DecodeOptions{});
  CHECK(r.tokens.empty());
  CHECK(r.emission_cap_hits == 0);
}

TEST_CASE("a forced single-token model emits that token then stops") {
  // Hand-built model on one frame: the start state prefers token 1; once
  // token 1 has passed through the prediction network, blank dominates.
  TinyModel m = MakeTinyModel(102);
  for (auto& [name, t] : m.enc) t.Fill(0.0);
  for (auto& [name, t] : m.dec) t.Fill(0.0);
  m.enc.at("proj.b")(1) = 2.0;  // encoder votes for token 1

  Tensor& b = m.dec.at("layer0.b");
  for (int64_t j = 0; j < 3; ++j) {
    b(j) = 20.0;       // input gate open
    b(3 + j) = -20.0;  // forget gate shut
    b(9 + j) = 20.0;   // output gate open
  }
  m.dec.at("layer0.W")(6, 0) = 20.0;      // candidate follows embedding dim 0
  m.dec.at("embedding")(1, 0) = 1.0;      // token 1 lights that dimension
  m.dec.at("proj.W")(3, 0) = 30.0;        // hidden unit 0 pushes blank

  Rng rng(103);
  const Tensor frames = RandomFrames(&rng, 1, 2, 0.1);
  const DecodeResult r =
      GreedyDecode(m.enc_cfg, m.dec_cfg, m.enc, m.dec, frames, DecodeOptions{});
  CHECK(r.tokens == std::vector<int32_t>{1});
  CHECK(r.emission_cap_hits == 0);
}

TEST_CASE("emission cap guards non-blank loops") {
  TinyModel m = MakeTinyModel(104);
  m.enc.at("proj.b")(0) = 30.0;  // token 0 always wins
  Rng rng(105);
  const Tensor frames = RandomFrames(&rng, 3, 2);
  DecodeOptions opts;
  opts.max_symbols_per_frame = 10;
  const DecodeResult r = GreedyDecode(m.enc_cfg, m.dec_cfg, m.enc, m.dec, frames, opts);
  CHECK(r.tokens.size() == 30);  // 10 per frame
  CHECK(r.emission_cap_hits == 3);
}

TEST_CASE("greedy equals beam(1) on random models, tokens bitwise") {
  Rng rng(106);
  for (int trial = 0; trial < 50; ++trial) {
    TinyModel m = MakeTinyModel(200 + static_cast<uint64_t>(trial));
    const Tensor frames = RandomFrames(&rng, rng.NextInt(1, 5), 2);
    DecodeOptions greedy_opts;
    DecodeOptions beam_opts;
    beam_opts.beam = 1;
    const DecodeResult g =
        GreedyDecode(m.enc_cfg, m.dec_cfg, m.enc, m.dec, frames, greedy_opts);
    const DecodeResult b =
        BeamDecode(m.enc_cfg, m.dec_cfg, m.enc, m.dec, frames, beam_opts);
    CHECK(g.tokens == b.tokens);
  }
}

TEST_CASE("wide beam matches the exhaustive-decode oracle on tiny models") {
  Rng rng(107);
  int nontrivial = 0;
  for (int trial = 0; trial < 30; ++trial) {
    TinyModel m = MakeTinyModel(300 + static_cast<uint64_t>(trial));
    // Half the trials push one token hard enough that the argmax sequence
    // is non-empty; near-uniform models always prefer the empty output.
    if (trial % 2 == 0) {
      m.enc.at("proj.b")(rng.NextInt(0, 2)) = 4.0;
      m.enc.at("proj.b")(3) = -1.0;
    }
    const Tensor frames = RandomFrames(&rng, rng.NextInt(1, 3), 2);
    DecodeOptions opts;
    opts.beam = 64;
    const DecodeResult beam =
        BeamDecode(m.enc_cfg, m.dec_cfg, m.enc, m.dec, frames, opts);
    const OracleBest oracle = ExhaustiveBest(m, frames, 6);
    CHECK(beam.tokens == oracle.tokens);
    CHECK(std::abs(beam.log_prob - oracle.log_prob) < 1e-6);
    if (!beam.tokens.empty()) ++nontrivial;
  }
  CHECK(nontrivial > 0);
}

TEST_CASE("a larger beam never returns a worse hypothesis score") {
  Rng rng(108);
  for (int trial = 0; trial < 20; ++trial) {
    TinyModel m = MakeTinyModel(400 + static_cast<uint64_t>(trial));
    const Tensor frames = RandomFrames(&rng, rng.NextInt(1, 4), 2);
    double prev = -std::numeric_limits<double>::infinity();
    for (int32_t beam : {1, 2, 4, 8, 16}) {
      DecodeOptions opts;
      opts.beam = beam;
      const DecodeResult r =
          BeamDecode(m.enc_cfg, m.dec_cfg, m.enc, m.dec, frames, opts);
      CHECK(r.log_prob >= prev - 1e-12);
      prev = r.log_prob;
    }
  }
}

TEST_CASE("decoding is deterministic") {
  TinyModel m = MakeTinyModel(109);
  Rng rng(110);
  const Tensor frames = RandomFrames(&rng, 4, 2);
  DecodeOptions opts;
  opts.beam = 4;
  const DecodeResult a = BeamDecode(m.enc_cfg, m.dec_cfg, m.enc, m.dec, frames, opts);
  const DecodeResult b = BeamDecode(m.enc_cfg, m.dec_cfg, m.enc, m.dec, frames, opts);
  CHECK(a.tokens == b.tokens);
  CHECK(a.log_prob == b.log_prob);
}

TEST_CASE("edit distance basics") {
  const std::vector<int32_t> abc = {1, 2, 3};
  const std::vector<int32_t> empty;
  const std::vector<int32_t> four = {7, 8, 9, 10};
  const std::vector<int32_t> edited = {1, 9, 3, 4};
  CHECK(EditDistance(abc, abc) == 0);
  CHECK(EditDistance(empty, four) == 4);
  CHECK(EditDistance(abc, edited) == 2);  // substitution + insertion
}

TEST_CASE("edit distance symmetry and triangle inequality") {
  Rng rng(111);
  for (int trial = 0; trial < 40; ++trial) {
    auto make = [&]() {
      std::vector<int32_t> s(static_cast<size_t>(rng.NextInt(0, 6)));
      for (auto& x : s) x = static_cast<int32_t>(rng.NextInt(0, 3));
      return s;
    };
    const auto a = make(), b = make(), c = make();
    CHECK(EditDistance(a, b) == EditDistance(b, a));
    CHECK(EditDistance(a, c) <= EditDistance(a, b) + EditDistance(b, c));
  }
}

TEST_CASE("wer: perfect output, paper WERR value, summation oracle") {
  const std::vector<std::vector<int32_t>> refs = {{1, 2}, {3}, {0, 1, 2}};
  CHECK(Wer(refs, refs) == 0.0);

  // Published relative reduction example: 9.7 -> 9.1 is 6.18%.
  CHECK(RelativeWerr(9.7, 9.1) == doctest::Approx(6.18556701).epsilon(1e-6));

  std::vector<std::vector<int32_t>> hyps = {{1, 2, 3}, {}, {0, 1, 2}};
  // errors: 1 insertion + 1 deletion = 2; ref tokens = 6.
  int64_t errors = 0, ref_len = 0;
  for (size_t i = 0; i < refs.size(); ++i) {
    errors += EditDistance(refs[i], hyps[i]);
    ref_len += static_cast<int64_t>(refs[i].size());
  }
  CHECK(Wer(refs, hyps) ==
        doctest::Approx(static_cast<double>(errors) / static_cast<double>(ref_len)));

  CHECK_THROWS_AS(Wer({{}, {}}, {{}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(Wer(refs, {{1}}), std::invalid_argument);
}
