// core/numerics.cc

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

#include "core/numerics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace codert {

double LogAdd(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double LogSumExp(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("empty reduction");
  const double m = *std::max_element(v.begin(), v.end());
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

void Softmax(std::span<const double> v, std::span<double> out) {
  if (v.empty()) throw std::invalid_argument("empty reduction");
  if (out.size() != v.size()) throw std::invalid_argument("softmax: size mismatch");
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - m);
    s += out[i];
  }
  const double inv = 1.0 / s;
  for (size_t i = 0; i < out.size(); ++i) out[i] *= inv;
}

std::vector<double> Softmax(std::span<const double> v) {
  std::vector<double> out(v.size());
  Softmax(v, out);
  return out;
}

void LogSoftmax(std::span<const double> v, std::span<double> out) {
  if (out.size() != v.size()) throw std::invalid_argument("log_softmax: size mismatch");
  const double lse = LogSumExp(v);
  for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] - lse;
}

double Entropy(std::span<const double> p) {
  if (p.empty()) throw std::invalid_argument("empty reduction");
  double sum = 0.0;
  for (double x : p) {
    if (x < 0.0) throw std::invalid_argument("entropy: negative probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-4)
    throw std::invalid_argument("entropy: probabilities do not sum to 1");
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

std::vector<int32_t> TopKIndices(std::span<const double> v, int32_t k) {
  if (k < 1 || static_cast<size_t>(k) > v.size())
    throw std::invalid_argument("top_k: k out of range");
  std::vector<int32_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&v](int32_t a, int32_t b) {
                      if (v[static_cast<size_t>(a)] != v[static_cast<size_t>(b)])
                        return v[static_cast<size_t>(a)] > v[static_cast<size_t>(b)];
                      return a < b;
                    });
  idx.resize(static_cast<size_t>(k));
  return idx;
}

}  // namespace codert
