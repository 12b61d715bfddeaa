// core/lstm.h

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

#ifndef CODERT_CORE_LSTM_H_
#define CODERT_CORE_LSTM_H_

#include <cstdint>
#include <span>

#include "core/tensor.h"

namespace codert {

// Weights for one LSTM layer. W is [4H, in], R is [4H, H], b is [4H];
// the 4H axis is the gate stack [input; forget; candidate; output].
struct LstmWeights {
  const Tensor* W;
  const Tensor* R;
  const Tensor* b;

  int64_t HiddenSize() const { return R->Dim(1); }
  int64_t InputSize() const { return W->Dim(1); }
  void CheckShapes() const;
};

// Recurrent state for streaming use (decoding).
struct LstmState {
  Tensor h;  // [H]
  Tensor c;  // [H]
};

// Per-sequence activation cache for the backward pass.
struct LstmCache {
  Tensor inputs;  // [T, in]
  Tensor gate_i, gate_f, gate_g, gate_o;  // [T, H], post-activation
  Tensor c, tanh_c;  // [T, H]
  Tensor h;  // [T, H]
};

// One cell step. h_prev/c_prev of size H, x of size in. Post-activation
// gates and the new c/tanh(c)/h are written to the provided spans.
void LstmCellForward(const LstmWeights& w, std::span<const double> x,
                     std::span<const double> h_prev, std::span<const double> c_prev,
                     std::span<double> gi, std::span<double> gf, std::span<double> gg,
                     std::span<double> go, std::span<double> c_out,
                     std::span<double> tanh_c_out, std::span<double> h_out);

// Whole-sequence forward from zero initial state; fills the cache.
void LstmForward(const LstmWeights& w, const Tensor& inputs, LstmCache* cache);

// Reverse-mode pass. grad_h is [T, H] (d loss / d h_t). Accumulates into
// dW/dR/db (which must be pre-sized and may hold prior contributions) and
// writes d loss / d inputs into dx when non-null.
void LstmBackward(const LstmWeights& w, const LstmCache& cache, const Tensor& grad_h,
                  Tensor* dW, Tensor* dR, Tensor* db, Tensor* dx);

// Streaming step used by the decoder during search.
void LstmStep(const LstmWeights& w, std::span<const double> x, LstmState* state);

}  // namespace codert

#endif  // CODERT_CORE_LSTM_H_
