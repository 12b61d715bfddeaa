// core/optimizer.cc

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

#include "core/optimizer.h"

#include <cmath>
#include <stdexcept>

namespace codert {

double ClipGradients(const std::vector<ParamMap*>& grads, double max_norm) {
  double sum_squares = 0.0;
  for (const ParamMap* g : grads) {
    if (AnyNonFinite(*g)) throw std::runtime_error("diverged");
    sum_squares += GlobalSumSquares(*g);
  }
  const double norm = std::sqrt(sum_squares);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (ParamMap* g : grads) ScaleAll(g, scale);
  }
  return norm;
}

void AdamStep(ParamMap* params, const ParamMap& grads, AdamState* state, double lr,
              const AdamOptions& opts) {
  if (state->m.empty()) {
    state->m = ZerosLike(*params);
    state->v = ZerosLike(*params);
  }
  state->t += 1;
  const double bc1 = 1.0 - std::pow(opts.beta1, static_cast<double>(state->t));
  const double bc2 = 1.0 - std::pow(opts.beta2, static_cast<double>(state->t));

  for (auto& [name, p] : *params) {
    const Tensor& g = grads.at(name);
    Tensor& m = state->m.at(name);
    Tensor& v = state->v.at(name);
    if (!p.SameShape(g)) throw std::invalid_argument("adam: gradient shape mismatch");
    for (int64_t i = 0; i < p.NumElements(); ++i) {
      m(i) = opts.beta1 * m(i) + (1.0 - opts.beta1) * g(i);
      v(i) = opts.beta2 * v(i) + (1.0 - opts.beta2) * g(i) * g(i);
      const double m_hat = m(i) / bc1;
      const double v_hat = v(i) / bc2;
      p(i) -= lr * m_hat / (std::sqrt(v_hat) + opts.epsilon);
    }
  }
}

}  // namespace codert
