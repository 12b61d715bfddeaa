// core/optimizer.h

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

#ifndef CODERT_CORE_OPTIMIZER_H_
#define CODERT_CORE_OPTIMIZER_H_

#include <cstdint>
#include <vector>

#include "core/tensor.h"

namespace codert {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;  // global-norm clip applied before the update
};

// First/second-moment state, lazily sized against the parameter map.
struct AdamState {
  ParamMap m;
  ParamMap v;
  int64_t t = 0;
};

// Scales every gradient map by min(1, max_norm / global_norm) where the
// norm is taken jointly over all maps. Returns the pre-clip global norm.
// Throws "diverged" if any gradient is non-finite.
double ClipGradients(const std::vector<ParamMap*>& grads, double max_norm);

// One Adam update with bias correction; state->t advances by one.
void AdamStep(ParamMap* params, const ParamMap& grads, AdamState* state, double lr,
              const AdamOptions& opts);

}  // namespace codert

#endif  // CODERT_CORE_OPTIMIZER_H_
