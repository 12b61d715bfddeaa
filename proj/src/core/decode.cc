// core/decode.cc

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

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "core/numerics.h"

namespace codert {

namespace {

// Streaming prediction-network state for one hypothesis.
struct DecoderState {
  std::vector<LstmState> layers;
  Tensor out_row;  // [V+1] projection of the current hidden state
};

class DecoderStepper {
 public:
  DecoderStepper(const DecoderConfig& cfg, const ParamMap& params)
      : cfg_(cfg), params_(params) {}

  DecoderState Initial() const {
    DecoderState state;
    state.layers.resize(static_cast<size_t>(cfg_.num_layers));
    std::vector<double> x(static_cast<size_t>(cfg_.embed_dim), 0.0);  // <sos>
    Run(x, &state);
    return state;
  }

  void Advance(DecoderState* state, int32_t token) const {
    const Tensor& embedding = params_.at("embedding");
    if (token < 0 || token >= embedding.Dim(0))
      throw std::invalid_argument("decode: token out of embedding range");
    std::vector<double> x(static_cast<size_t>(cfg_.embed_dim));
    for (int64_t j = 0; j < cfg_.embed_dim; ++j) x[static_cast<size_t>(j)] = embedding(token, j);
    Run(x, state);
  }

 private:
  void Run(std::vector<double>& x, DecoderState* state) const {
    for (int32_t l = 0; l < cfg_.num_layers; ++l) {
      LstmWeights w{&params_.at("layer" + std::to_string(l) + ".W"),
                    &params_.at("layer" + std::to_string(l) + ".R"),
                    &params_.at("layer" + std::to_string(l) + ".b")};
      LstmStep(w, x, &state->layers[static_cast<size_t>(l)]);
      x.assign(state->layers[static_cast<size_t>(l)].h.Data(),
               state->layers[static_cast<size_t>(l)].h.Data() +
                   state->layers[static_cast<size_t>(l)].h.NumElements());
    }
    const Tensor& W = params_.at("proj.W");
    const Tensor& b = params_.at("proj.b");
    state->out_row = Tensor({cfg_.output_dim});
    for (int64_t v = 0; v < cfg_.output_dim; ++v) {
      double acc = b(v);
      for (int64_t j = 0; j < cfg_.hidden_units; ++j) acc += W(v, j) * x[static_cast<size_t>(j)];
      state->out_row(v) = acc;
    }
  }

  const DecoderConfig& cfg_;
  const ParamMap& params_;
};

std::vector<double> JointScores(const Tensor& enc_logits, int64_t t,
                                const Tensor& dec_row) {
  const int64_t vocab = enc_logits.Dim(1);
  std::vector<double> scores(static_cast<size_t>(vocab));
  for (int64_t k = 0; k < vocab; ++k)
    scores[static_cast<size_t>(k)] = std::tanh(enc_logits(t, k) + dec_row(k));
  LogSoftmax(scores, scores);
  return scores;
}

// Final-answer ordering: higher score, then fewer tokens, then
// lexicographically smaller.
bool BetterHyp(double lp_a, const std::vector<int32_t>& a, double lp_b,
               const std::vector<int32_t>& b) {
  if (lp_a != lp_b) return lp_a > lp_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

DecodeResult GreedyDecode(const EncoderConfig& enc_cfg, const DecoderConfig& dec_cfg,
                          const ParamMap& enc_params, const ParamMap& dec_params,
                          const Tensor& frames, const DecodeOptions& opts) {
  const Tensor enc_logits = EncoderForward(enc_cfg, enc_params, frames, nullptr);
  const int64_t t_len = enc_logits.Dim(0);
  const int32_t blank = enc_cfg.output_dim - 1;

  DecoderStepper stepper(dec_cfg, dec_params);
  DecoderState state = stepper.Initial();

  DecodeResult result;
  for (int64_t t = 0; t < t_len; ++t) {
    int32_t emitted = 0;
    for (;;) {
      const std::vector<double> scores = JointScores(enc_logits, t, state.out_row);
      const int32_t best = static_cast<int32_t>(
          std::max_element(scores.begin(), scores.end()) - scores.begin());
      if (best == blank) {
        result.log_prob += scores[static_cast<size_t>(best)];
        break;
      }
      result.tokens.push_back(best);
      result.log_prob += scores[static_cast<size_t>(best)];
      stepper.Advance(&state, best);
      if (++emitted >= opts.max_symbols_per_frame) {
        // Truncate this frame and move on.
        ++result.emission_cap_hits;
        break;
      }
    }
  }
  return result;
}

DecodeResult BeamDecode(const EncoderConfig& enc_cfg, const DecoderConfig& dec_cfg,
                        const ParamMap& enc_params, const ParamMap& dec_params,
                        const Tensor& frames, const DecodeOptions& opts) {
  if (opts.beam < 1) throw std::invalid_argument("beam must be >= 1");
  const Tensor enc_logits = EncoderForward(enc_cfg, enc_params, frames, nullptr);
  const int64_t t_len = enc_logits.Dim(0);
  const int32_t blank = enc_cfg.output_dim - 1;
  const int32_t vocab = enc_cfg.output_dim;

  DecoderStepper stepper(dec_cfg, dec_params);

  struct Hyp {
    std::vector<int32_t> tokens;
    double lp = 0.0;
    DecoderState state;
  };

  DecodeResult result;

  // Hypotheses entering the current frame.
  std::vector<Hyp> pool;
  pool.push_back(Hyp{{}, 0.0, stepper.Initial()});

  for (int64_t t = 0; t < t_len; ++t) {
    std::vector<Hyp> active = std::move(pool);
    pool.clear();
    // Sequences that already took blank at this frame. The decoder state is
    // a pure function of the token sequence, so merging by sequence is exact.
    std::map<std::vector<int32_t>, Hyp> frozen;

    for (int32_t step = 0; step <= opts.max_symbols_per_frame && !active.empty();
         ++step) {
      const bool at_cap = step == opts.max_symbols_per_frame;

      // Candidate expansions of the active set.
      std::map<std::vector<int32_t>, Hyp> expansions;  // merged by sequence
      for (Hyp& h : active) {
        if (at_cap) {
          // Truncate the frame for this hypothesis: freeze without blank.
          ++result.emission_cap_hits;
          auto it = frozen.find(h.tokens);
          if (it == frozen.end()) {
            std::vector<int32_t> key = h.tokens;
            frozen.emplace(std::move(key), std::move(h));
          } else {
            it->second.lp = LogAdd(it->second.lp, h.lp);
          }
          continue;
        }
        const std::vector<double> scores = JointScores(enc_logits, t, h.state.out_row);
        // Blank: this sequence is done with frame t.
        {
          const double lp = h.lp + scores[static_cast<size_t>(blank)];
          auto it = frozen.find(h.tokens);
          if (it == frozen.end()) {
            std::vector<int32_t> key = h.tokens;
            Hyp fh{h.tokens, lp, h.state};
            frozen.emplace(std::move(key), std::move(fh));
          } else {
            it->second.lp = LogAdd(it->second.lp, lp);
          }
        }
        // Non-blank emissions stay within the frame. Distinct parents can
        // never produce the same sequence, so no merge happens here; the
        // map just keeps the candidate set ordered.
        for (int32_t k = 0; k + 1 < vocab; ++k) {
          std::vector<int32_t> seq = h.tokens;
          seq.push_back(k);
          const double lp = h.lp + scores[static_cast<size_t>(k)];
          std::vector<int32_t> key = seq;
          Hyp nh{std::move(seq), lp, h.state};  // state advanced only if kept
          expansions.emplace(std::move(key), std::move(nh));
        }
      }
      if (at_cap) break;

      // One combined ranking over frozen sequences and fresh expansions;
      // only the overall top `beam` survive this step.
      struct Entry {
        const std::vector<int32_t>* tokens;
        double lp;
        bool is_frozen;
      };
      std::vector<Entry> ranking;
      ranking.reserve(frozen.size() + expansions.size());
      for (const auto& [seq, h] : frozen) ranking.push_back({&seq, h.lp, true});
      for (const auto& [seq, h] : expansions) ranking.push_back({&seq, h.lp, false});
      std::sort(ranking.begin(), ranking.end(), [](const Entry& a, const Entry& b) {
        if (a.lp != b.lp) return a.lp > b.lp;
        if (a.tokens->size() != b.tokens->size())
          return a.tokens->size() < b.tokens->size();
        return *a.tokens < *b.tokens;
      });
      if (static_cast<int32_t>(ranking.size()) > opts.beam)
        ranking.resize(static_cast<size_t>(opts.beam));

      std::map<std::vector<int32_t>, Hyp> next_frozen;
      std::vector<Hyp> next_active;
      for (const Entry& e : ranking) {
        if (e.is_frozen) {
          auto node = frozen.extract(*e.tokens);
          next_frozen.insert(std::move(node));
        } else {
          Hyp h = std::move(expansions.at(*e.tokens));
          // The expansion's last token has not yet passed through the
          // prediction network; do it only for survivors.
          stepper.Advance(&h.state, h.tokens.back());
          next_active.push_back(std::move(h));
        }
      }
      frozen = std::move(next_frozen);
      active = std::move(next_active);
    }

    pool.reserve(frozen.size());
    for (auto& [seq, h] : frozen) pool.push_back(std::move(h));
    if (pool.empty()) throw std::runtime_error("beam search lost all hypotheses");
  }

  const Hyp* best = &pool.front();
  for (const Hyp& h : pool) {
    if (BetterHyp(h.lp, h.tokens, best->lp, best->tokens)) best = &h;
  }
  result.tokens = best->tokens;
  result.log_prob = best->lp;
  return result;
}

}  // namespace codert
