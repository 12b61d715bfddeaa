// core/tensor.cc

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

#include "core/tensor.h"

#include <cmath>
#include <stdexcept>

namespace codert {

Tensor::Tensor(std::vector<int64_t> dims) : dims_(std::move(dims)) {
  int64_t n = 1;
  for (int64_t d : dims_) {
    if (d < 0) throw std::invalid_argument("tensor dimension must be non-negative");
    n *= d;
  }
  values_.assign(static_cast<size_t>(n), 0.0);
}

std::span<double> Tensor::Row(int64_t i) {
  const int64_t w = dims_[1];
  return {values_.data() + i * w, static_cast<size_t>(w)};
}

std::span<const double> Tensor::Row(int64_t i) const {
  const int64_t w = dims_[1];
  return {values_.data() + i * w, static_cast<size_t>(w)};
}

std::span<double> Tensor::Row(int64_t i, int64_t j) {
  const int64_t w = dims_[2];
  return {values_.data() + (i * dims_[1] + j) * w, static_cast<size_t>(w)};
}

std::span<const double> Tensor::Row(int64_t i, int64_t j) const {
  const int64_t w = dims_[2];
  return {values_.data() + (i * dims_[1] + j) * w, static_cast<size_t>(w)};
}

void Tensor::Fill(double value) {
  for (auto& v : values_) v = value;
}

void Tensor::Scale(double value) {
  for (auto& v : values_) v *= value;
}

void Tensor::AddScaled(const Tensor& other, double scale) {
  if (!SameShape(other)) throw std::invalid_argument("AddScaled: shape mismatch");
  for (size_t i = 0; i < values_.size(); ++i) values_[i] += scale * other.values_[i];
}

double Tensor::SumSquares() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

bool Tensor::HasNonFinite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return true;
  }
  return false;
}

double GlobalSumSquares(const ParamMap& params) {
  double s = 0.0;
  for (const auto& [name, t] : params) s += t.SumSquares();
  return s;
}

bool AnyNonFinite(const ParamMap& params) {
  for (const auto& [name, t] : params) {
    if (t.HasNonFinite()) return true;
  }
  return false;
}

void ScaleAll(ParamMap* params, double scale) {
  for (auto& [name, t] : *params) t.Scale(scale);
}

ParamMap ZerosLike(const ParamMap& params) {
  ParamMap zeros;
  for (const auto& [name, t] : params) zeros[name] = Tensor(t.Dims());
  return zeros;
}

}  // namespace codert
