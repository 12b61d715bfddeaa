// core/numerics.h

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

#ifndef CODERT_CORE_NUMERICS_H_
#define CODERT_CORE_NUMERICS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace codert {

// log(exp(a) + exp(b)), safe against -inf on either side.
double LogAdd(double a, double b);

// log sum_i exp(v_i) via max-shift. Throws on an empty vector.
double LogSumExp(std::span<const double> v);

// out_i = exp(v_i) / sum_j exp(v_j); max-shifted. out may alias v.
void Softmax(std::span<const double> v, std::span<double> out);
std::vector<double> Softmax(std::span<const double> v);

// out_i = v_i - LogSumExp(v); out may alias v.
void LogSoftmax(std::span<const double> v, std::span<double> out);

// -sum_i p_i ln p_i in nats, with 0 * ln 0 taken as 0. Requires entries
// >= 0 summing to 1 within 1e-4.
double Entropy(std::span<const double> p);

// Indices of the k largest entries, ranked by descending value; ties go to
// the lower index. Throws unless 1 <= k <= v.size().
std::vector<int32_t> TopKIndices(std::span<const double> v, int32_t k);

}  // namespace codert

#endif  // CODERT_CORE_NUMERICS_H_
