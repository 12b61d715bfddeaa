// core/network.cc

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

#include "core/network.h"

#include <cmath>
#include <stdexcept>

namespace codert {

void EncoderConfig::Validate() const {
  if (num_layers < 1) throw std::invalid_argument("encoder needs num_layers >= 1");
  if (hidden_units < 1 || input_dim < 1 || output_dim < 2)
    throw std::invalid_argument("encoder dimensions out of range");
  if (time_reduction_after_layer < 0 || time_reduction_after_layer >= num_layers)
    throw std::invalid_argument("time reduction must come after an interior layer");
  if (time_reduction_after_layer > 0 && time_reduction_factor != 2)
    throw std::invalid_argument("only a time reduction factor of 2 is supported");
}

int64_t EncoderConfig::ReducedLength(int64_t frames) const {
  if (time_reduction_after_layer == 0) return frames;
  return (frames + 1) / 2;
}

void DecoderConfig::Validate() const {
  if (num_layers < 1) throw std::invalid_argument("decoder needs num_layers >= 1");
  if (embed_dim < 1 || hidden_units < 1 || output_dim < 2)
    throw std::invalid_argument("decoder dimensions out of range");
  if (dropout < 0.0 || dropout >= 1.0)
    throw std::invalid_argument("decoder dropout must be in [0, 1)");
}

namespace {

std::string LayerName(int32_t layer, const char* which) {
  return "layer" + std::to_string(layer) + "." + which;
}

Tensor UniformTensor(std::vector<int64_t> dims, uint64_t seed, const std::string& name) {
  Tensor t(std::move(dims));
  const int64_t fan_in = t.Dim(t.NumDims() - 1);
  const double a = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Rng rng = Rng::ForStream(seed, name);
  for (int64_t i = 0; i < t.NumElements(); ++i) t(i) = rng.Uniform(-a, a);
  return t;
}

Tensor LstmBias(int64_t hidden) {
  Tensor b({4 * hidden});
  for (int64_t j = 0; j < hidden; ++j) b(hidden + j) = 1.0;  // forget gate
  return b;
}

LstmWeights LayerWeights(const ParamMap& params, int32_t layer) {
  return LstmWeights{&params.at(LayerName(layer, "W")), &params.at(LayerName(layer, "R")),
                     &params.at(LayerName(layer, "b"))};
}

// logits[t] = W h[t] + b with W [out, H].
Tensor Project(const Tensor& W, const Tensor& b, const Tensor& h) {
  const int64_t t_len = h.Dim(0);
  const int64_t hidden = h.Dim(1);
  const int64_t out = W.Dim(0);
  if (W.Dim(1) != hidden) throw std::invalid_argument("projection input mismatch");
  Tensor logits({t_len, out});
  for (int64_t t = 0; t < t_len; ++t) {
    for (int64_t v = 0; v < out; ++v) {
      double acc = b(v);
      for (int64_t j = 0; j < hidden; ++j) acc += W(v, j) * h(t, j);
      logits(t, v) = acc;
    }
  }
  return logits;
}

void ProjectBackward(const Tensor& W, const Tensor& h, const Tensor& grad_logits,
                     Tensor* dW, Tensor* db, Tensor* dh) {
  const int64_t t_len = h.Dim(0);
  const int64_t hidden = h.Dim(1);
  const int64_t out = W.Dim(0);
  *dh = Tensor({t_len, hidden});
  for (int64_t t = 0; t < t_len; ++t) {
    for (int64_t v = 0; v < out; ++v) {
      const double g = grad_logits(t, v);
      if (g == 0.0) continue;
      (*db)(v) += g;
      for (int64_t j = 0; j < hidden; ++j) {
        (*dW)(v, j) += g * h(t, j);
        (*dh)(t, j) += g * W(v, j);
      }
    }
  }
}

}  // namespace

ParamMap InitEncoderParams(const EncoderConfig& config, uint64_t seed) {
  config.Validate();
  ParamMap params;
  int64_t in = config.input_dim;
  for (int32_t l = 0; l < config.num_layers; ++l) {
    if (config.time_reduction_after_layer > 0 && l == config.time_reduction_after_layer)
      in *= 2;
    const int64_t hidden = config.hidden_units;
    params[LayerName(l, "W")] = UniformTensor({4 * hidden, in}, seed, LayerName(l, "W"));
    params[LayerName(l, "R")] = UniformTensor({4 * hidden, hidden}, seed, LayerName(l, "R"));
    params[LayerName(l, "b")] = LstmBias(hidden);
    in = hidden;
  }
  params["proj.W"] =
      UniformTensor({config.output_dim, config.hidden_units}, seed, "proj.W");
  params["proj.b"] = Tensor({config.output_dim});
  return params;
}

ParamMap InitDecoderParams(const DecoderConfig& config, uint64_t seed) {
  config.Validate();
  ParamMap params;
  // Tokens 0..V-1 embed; blank (index V) never enters the decoder.
  params["embedding"] =
      UniformTensor({config.output_dim - 1, config.embed_dim}, seed, "embedding");
  int64_t in = config.embed_dim;
  for (int32_t l = 0; l < config.num_layers; ++l) {
    const int64_t hidden = config.hidden_units;
    params[LayerName(l, "W")] = UniformTensor({4 * hidden, in}, seed, LayerName(l, "W"));
    params[LayerName(l, "R")] = UniformTensor({4 * hidden, hidden}, seed, LayerName(l, "R"));
    params[LayerName(l, "b")] = LstmBias(hidden);
    in = hidden;
  }
  params["proj.W"] =
      UniformTensor({config.output_dim, config.hidden_units}, seed, "proj.W");
  params["proj.b"] = Tensor({config.output_dim});
  return params;
}

Tensor TimeReduce(const Tensor& frames) {
  const int64_t t_len = frames.Dim(0);
  const int64_t dim = frames.Dim(1);
  if (t_len < 1) throw std::invalid_argument("time_reduce needs T >= 1");
  const int64_t reduced = (t_len + 1) / 2;
  Tensor out({reduced, 2 * dim});
  for (int64_t r = 0; r < reduced; ++r) {
    for (int64_t j = 0; j < dim; ++j) out(r, j) = frames(2 * r, j);
    if (2 * r + 1 < t_len) {
      for (int64_t j = 0; j < dim; ++j) out(r, dim + j) = frames(2 * r + 1, j);
    }
  }
  return out;
}

Tensor TimeReduceBackward(const Tensor& grad_reduced, int64_t orig_frames, int64_t dim) {
  Tensor grad({orig_frames, dim});
  for (int64_t r = 0; r < grad_reduced.Dim(0); ++r) {
    for (int64_t j = 0; j < dim; ++j) grad(2 * r, j) = grad_reduced(r, j);
    if (2 * r + 1 < orig_frames) {
      for (int64_t j = 0; j < dim; ++j) grad(2 * r + 1, j) = grad_reduced(r, dim + j);
    }
  }
  return grad;
}

Tensor EncoderForward(const EncoderConfig& config, const ParamMap& params,
                      const Tensor& frames, EncoderCache* cache) {
  config.Validate();
  if (frames.NumDims() != 2 || frames.Dim(1) != config.input_dim)
    throw std::invalid_argument("encoder frames must be [T, input_dim]");
  if (frames.Dim(0) < 1) throw std::invalid_argument("encoder needs T >= 1");

  EncoderCache local;
  EncoderCache* c = cache ? cache : &local;
  c->layers.assign(static_cast<size_t>(config.num_layers), LstmCache{});

  Tensor cur = frames;
  for (int32_t l = 0; l < config.num_layers; ++l) {
    if (config.time_reduction_after_layer > 0 && l == config.time_reduction_after_layer)
      cur = TimeReduce(cur);
    LstmForward(LayerWeights(params, l), cur, &c->layers[static_cast<size_t>(l)]);
    cur = c->layers[static_cast<size_t>(l)].h;
  }
  return Project(params.at("proj.W"), params.at("proj.b"), cur);
}

void EncoderBackward(const EncoderConfig& config, const ParamMap& params,
                     const EncoderCache& cache, const Tensor& grad_logits,
                     ParamMap* grads) {
  const Tensor& last_h = cache.layers.back().h;
  Tensor grad_h;
  ProjectBackward(params.at("proj.W"), last_h, grad_logits, &(*grads)["proj.W"],
                  &(*grads)["proj.b"], &grad_h);

  for (int32_t l = config.num_layers - 1; l >= 0; --l) {
    Tensor grad_in;
    LstmBackward(LayerWeights(params, l), cache.layers[static_cast<size_t>(l)], grad_h,
                 &(*grads)[LayerName(l, "W")], &(*grads)[LayerName(l, "R")],
                 &(*grads)[LayerName(l, "b")], &grad_in);
    if (config.time_reduction_after_layer > 0 && l == config.time_reduction_after_layer) {
      // Undo the frame-pair concatenation.
      const int64_t orig =
          cache.layers[static_cast<size_t>(l - 1)].h.Dim(0);
      const int64_t dim = cache.layers[static_cast<size_t>(l - 1)].h.Dim(1);
      grad_in = TimeReduceBackward(grad_in, orig, dim);
    }
    grad_h = std::move(grad_in);
  }
}

Tensor DecoderForward(const DecoderConfig& config, const ParamMap& params,
                      const std::vector<int32_t>& tokens, DecoderCache* cache,
                      Rng* dropout_rng) {
  config.Validate();
  const int64_t u_len = static_cast<int64_t>(tokens.size()) + 1;
  const Tensor& embedding = params.at("embedding");
  for (int32_t tok : tokens) {
    if (tok < 0 || tok >= embedding.Dim(0))
      throw std::invalid_argument("decoder token out of range");
  }

  DecoderCache local;
  DecoderCache* c = cache ? cache : &local;
  c->layers.assign(static_cast<size_t>(config.num_layers), LstmCache{});

  // Row 0 is the start state: a zero embedding.
  c->embedded = Tensor({u_len, config.embed_dim});
  for (int64_t u = 1; u < u_len; ++u) {
    const int32_t tok = tokens[static_cast<size_t>(u - 1)];
    for (int64_t j = 0; j < config.embed_dim; ++j) c->embedded(u, j) = embedding(tok, j);
  }

  Tensor cur = c->embedded;
  for (int32_t l = 0; l < config.num_layers; ++l) {
    LstmForward(LayerWeights(params, l), cur, &c->layers[static_cast<size_t>(l)]);
    cur = c->layers[static_cast<size_t>(l)].h;
  }

  if (config.dropout > 0.0 && dropout_rng != nullptr) {
    // Inverted dropout on the LSTM output.
    const double keep = 1.0 - config.dropout;
    c->dropout_mask = Tensor(cur.Dims());
    for (int64_t i = 0; i < cur.NumElements(); ++i) {
      const double m = dropout_rng->NextDouble() < keep ? 1.0 / keep : 0.0;
      c->dropout_mask(i) = m;
      cur(i) *= m;
    }
  } else {
    c->dropout_mask = Tensor();
  }
  c->hidden = cur;
  return Project(params.at("proj.W"), params.at("proj.b"), cur);
}

void DecoderBackward(const DecoderConfig& config, const ParamMap& params,
                     const DecoderCache& cache, const std::vector<int32_t>& tokens,
                     const Tensor& grad_logits, ParamMap* grads) {
  Tensor grad_h;
  ProjectBackward(params.at("proj.W"), cache.hidden, grad_logits, &(*grads)["proj.W"],
                  &(*grads)["proj.b"], &grad_h);

  if (cache.dropout_mask.NumElements() > 0) {
    for (int64_t i = 0; i < grad_h.NumElements(); ++i) grad_h(i) *= cache.dropout_mask(i);
  }

  for (int32_t l = config.num_layers - 1; l >= 0; --l) {
    Tensor grad_in;
    LstmBackward(LayerWeights(params, l), cache.layers[static_cast<size_t>(l)], grad_h,
                 &(*grads)[LayerName(l, "W")], &(*grads)[LayerName(l, "R")],
                 &(*grads)[LayerName(l, "b")], &grad_in);
    grad_h = std::move(grad_in);
  }

  Tensor& d_embed = (*grads)["embedding"];
  for (size_t u = 0; u < tokens.size(); ++u) {
    const int32_t tok = tokens[u];
    for (int64_t j = 0; j < config.embed_dim; ++j)
      d_embed(tok, j) += grad_h(static_cast<int64_t>(u) + 1, j);
  }
}

Tensor JointForward(const Tensor& enc_logits, const Tensor& dec_logits) {
  if (enc_logits.Dim(1) != dec_logits.Dim(1))
    throw std::invalid_argument("joint: encoder/decoder output dims differ");
  const int64_t t_len = enc_logits.Dim(0);
  const int64_t u_len = dec_logits.Dim(0);
  const int64_t vocab = enc_logits.Dim(1);
  Tensor out({t_len, u_len, vocab});
  for (int64_t t = 0; t < t_len; ++t) {
    for (int64_t u = 0; u < u_len; ++u) {
      auto row = out.Row(t, u);
      for (int64_t k = 0; k < vocab; ++k)
        row[static_cast<size_t>(k)] = std::tanh(enc_logits(t, k) + dec_logits(u, k));
    }
  }
  return out;
}

void JointBackward(const Tensor& joint_out, const Tensor& grad_out, Tensor* grad_enc,
                   Tensor* grad_dec) {
  const int64_t t_len = joint_out.Dim(0);
  const int64_t u_len = joint_out.Dim(1);
  const int64_t vocab = joint_out.Dim(2);
  *grad_enc = Tensor({t_len, vocab});
  *grad_dec = Tensor({u_len, vocab});
  for (int64_t t = 0; t < t_len; ++t) {
    for (int64_t u = 0; u < u_len; ++u) {
      for (int64_t k = 0; k < vocab; ++k) {
        const double y = joint_out(t, u, k);
        const double g = grad_out(t, u, k) * (1.0 - y * y);
        (*grad_enc)(t, k) += g;
        (*grad_dec)(u, k) += g;
      }
    }
  }
}

UtteranceForward ModelForward(const EncoderConfig& enc_config,
                              const DecoderConfig& dec_config,
                              const ParamMap& enc_params, const ParamMap& dec_params,
                              const Tensor& frames, const std::vector<int32_t>& tokens,
                              bool with_grad, Rng* dropout_rng) {
  UtteranceForward fwd;
  fwd.labels.tokens = tokens;
  fwd.labels.blank_index = enc_config.output_dim - 1;
  fwd.enc_logits = EncoderForward(enc_config, enc_params, frames, &fwd.enc_cache);
  fwd.dec_logits =
      DecoderForward(dec_config, dec_params, tokens, &fwd.dec_cache, dropout_rng);
  fwd.lattice = JointLattice::FromLogits(JointForward(fwd.enc_logits, fwd.dec_logits));
  fwd.loss = with_grad ? TransducerLossWithGrad(&fwd.lattice, fwd.labels)
                       : TransducerLoss(&fwd.lattice, fwd.labels);
  return fwd;
}

void ModelBackward(const EncoderConfig& enc_config, const DecoderConfig& dec_config,
                   const ParamMap& enc_params, const ParamMap& dec_params,
                   const UtteranceForward& fwd, const Tensor& grad_enc_logits,
                   const Tensor& grad_dec_logits, ParamMap* enc_grads,
                   ParamMap* dec_grads) {
  EncoderBackward(enc_config, enc_params, fwd.enc_cache, grad_enc_logits, enc_grads);
  DecoderBackward(dec_config, dec_params, fwd.dec_cache, fwd.labels.tokens,
                  grad_dec_logits, dec_grads);
}

}  // namespace codert
