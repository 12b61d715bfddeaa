// core/lstm.cc

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

#include "core/lstm.h"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace codert {

namespace {

inline double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void LstmWeights::CheckShapes() const {
  const int64_t hidden = R->Dim(1);
  if (W->NumDims() != 2 || R->NumDims() != 2 || b->NumDims() != 1)
    throw std::invalid_argument("lstm weights must be W[4H,in], R[4H,H], b[4H]");
  if (W->Dim(0) != 4 * hidden || R->Dim(0) != 4 * hidden || b->Dim(0) != 4 * hidden)
    throw std::invalid_argument("lstm gate stack dimension mismatch");
}

void LstmCellForward(const LstmWeights& w, std::span<const double> x,
                     std::span<const double> h_prev, std::span<const double> c_prev,
                     std::span<double> gi, std::span<double> gf, std::span<double> gg,
                     std::span<double> go, std::span<double> c_out,
                     std::span<double> tanh_c_out, std::span<double> h_out) {
  w.CheckShapes();
  const int64_t hidden = w.HiddenSize();
  const int64_t in = w.InputSize();
  if (static_cast<int64_t>(x.size()) != in ||
      static_cast<int64_t>(h_prev.size()) != hidden ||
      static_cast<int64_t>(c_prev.size()) != hidden)
    throw std::invalid_argument("lstm cell input dimension mismatch");

  const Tensor& W = *w.W;
  const Tensor& R = *w.R;
  const Tensor& b = *w.b;

  // Pre-activations for the stacked gates.
  std::vector<double> pre(static_cast<size_t>(4 * hidden));
  for (int64_t r = 0; r < 4 * hidden; ++r) {
    double acc = b(r);
    for (int64_t j = 0; j < in; ++j) acc += W(r, j) * x[static_cast<size_t>(j)];
    for (int64_t j = 0; j < hidden; ++j) acc += R(r, j) * h_prev[static_cast<size_t>(j)];
    pre[static_cast<size_t>(r)] = acc;
  }

  for (int64_t j = 0; j < hidden; ++j) {
    const double i = Sigmoid(pre[static_cast<size_t>(j)]);
    const double f = Sigmoid(pre[static_cast<size_t>(hidden + j)]);
    const double g = std::tanh(pre[static_cast<size_t>(2 * hidden + j)]);
    const double o = Sigmoid(pre[static_cast<size_t>(3 * hidden + j)]);
    const double c = f * c_prev[static_cast<size_t>(j)] + i * g;
    const double tc = std::tanh(c);
    gi[static_cast<size_t>(j)] = i;
    gf[static_cast<size_t>(j)] = f;
    gg[static_cast<size_t>(j)] = g;
    go[static_cast<size_t>(j)] = o;
    c_out[static_cast<size_t>(j)] = c;
    tanh_c_out[static_cast<size_t>(j)] = tc;
    h_out[static_cast<size_t>(j)] = o * tc;
  }
}

void LstmForward(const LstmWeights& w, const Tensor& inputs, LstmCache* cache) {
  const int64_t t_len = inputs.Dim(0);
  const int64_t hidden = w.HiddenSize();

  cache->inputs = inputs;
  cache->gate_i = Tensor({t_len, hidden});
  cache->gate_f = Tensor({t_len, hidden});
  cache->gate_g = Tensor({t_len, hidden});
  cache->gate_o = Tensor({t_len, hidden});
  cache->c = Tensor({t_len, hidden});
  cache->tanh_c = Tensor({t_len, hidden});
  cache->h = Tensor({t_len, hidden});

  std::vector<double> zero(static_cast<size_t>(hidden), 0.0);
  for (int64_t t = 0; t < t_len; ++t) {
    std::span<const double> h_prev = t == 0 ? std::span<const double>(zero)
                                            : std::span<const double>(cache->h.Row(t - 1));
    std::span<const double> c_prev = t == 0 ? std::span<const double>(zero)
                                            : std::span<const double>(cache->c.Row(t - 1));
    LstmCellForward(w, inputs.Row(t), h_prev, c_prev, cache->gate_i.Row(t),
                    cache->gate_f.Row(t), cache->gate_g.Row(t), cache->gate_o.Row(t),
                    cache->c.Row(t), cache->tanh_c.Row(t), cache->h.Row(t));
  }
}

void LstmBackward(const LstmWeights& w, const LstmCache& cache, const Tensor& grad_h,
                  Tensor* dW, Tensor* dR, Tensor* db, Tensor* dx) {
  const int64_t t_len = cache.h.Dim(0);
  const int64_t hidden = w.HiddenSize();
  const int64_t in = w.InputSize();

  if (dx && dx->Dims() != cache.inputs.Dims()) *dx = Tensor(cache.inputs.Dims());

  std::vector<double> dh(static_cast<size_t>(hidden), 0.0);
  std::vector<double> dc(static_cast<size_t>(hidden), 0.0);
  std::vector<double> da(static_cast<size_t>(4 * hidden), 0.0);

  const Tensor& W = *w.W;
  const Tensor& R = *w.R;

  for (int64_t t = t_len - 1; t >= 0; --t) {
    for (int64_t j = 0; j < hidden; ++j) {
      const size_t js = static_cast<size_t>(j);
      const double i = cache.gate_i(t, j);
      const double f = cache.gate_f(t, j);
      const double g = cache.gate_g(t, j);
      const double o = cache.gate_o(t, j);
      const double tc = cache.tanh_c(t, j);
      const double c_prev = t == 0 ? 0.0 : cache.c(t - 1, j);

      const double dht = dh[js] + grad_h(t, j);
      const double dct = dc[js] + dht * o * (1.0 - tc * tc);

      da[js] = dct * g * i * (1.0 - i);                                   // input gate
      da[static_cast<size_t>(hidden + j)] = dct * c_prev * f * (1.0 - f);  // forget gate
      da[static_cast<size_t>(2 * hidden + j)] = dct * i * (1.0 - g * g);   // candidate
      da[static_cast<size_t>(3 * hidden + j)] = dht * tc * o * (1.0 - o);  // output gate

      dc[js] = dct * f;
    }

    // Parameter gradients: da outer x / h_prev, plus bias.
    for (int64_t r = 0; r < 4 * hidden; ++r) {
      const double dar = da[static_cast<size_t>(r)];
      if (dar == 0.0) continue;
      (*db)(r) += dar;
      const auto x_row = cache.inputs.Row(t);
      for (int64_t jj = 0; jj < in; ++jj) (*dW)(r, jj) += dar * x_row[static_cast<size_t>(jj)];
      if (t > 0) {
        const auto hp = cache.h.Row(t - 1);
        for (int64_t jj = 0; jj < hidden; ++jj)
          (*dR)(r, jj) += dar * hp[static_cast<size_t>(jj)];
      }
    }

    // Input and recurrent gradients: W^T da and R^T da.
    if (dx) {
      auto dx_row = dx->Row(t);
      for (int64_t jj = 0; jj < in; ++jj) {
        double acc = 0.0;
        for (int64_t r = 0; r < 4 * hidden; ++r) acc += W(r, jj) * da[static_cast<size_t>(r)];
        dx_row[static_cast<size_t>(jj)] = acc;
      }
    }
    for (int64_t jj = 0; jj < hidden; ++jj) {
      double acc = 0.0;
      for (int64_t r = 0; r < 4 * hidden; ++r) acc += R(r, jj) * da[static_cast<size_t>(r)];
      dh[static_cast<size_t>(jj)] = acc;
    }
  }
}

void LstmStep(const LstmWeights& w, std::span<const double> x, LstmState* state) {
  const int64_t hidden = w.HiddenSize();
  if (state->h.NumElements() != hidden) {
    state->h = Tensor({hidden});
    state->c = Tensor({hidden});
  }
  std::vector<double> gi(static_cast<size_t>(hidden)), gf(gi), gg(gi), go(gi),
      c_out(gi), tc(gi), h_out(gi);
  LstmCellForward(w, x, state->h.Flat(), state->c.Flat(), gi, gf, gg, go, c_out, tc, h_out);
  for (int64_t j = 0; j < hidden; ++j) {
    state->h(j) = h_out[static_cast<size_t>(j)];
    state->c(j) = c_out[static_cast<size_t>(j)];
  }
}

}  // namespace codert
