// core/tensor.h

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

#ifndef CODERT_CORE_TENSOR_H_
#define CODERT_CORE_TENSOR_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace codert {

// Dense row-major tensor. Values are kept in 64-bit floats so that lattice
// sums and finite-difference checks are not dominated by storage rounding;
// on-disk formats narrow to 32-bit floats.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int64_t> dims);

  static Tensor Zeros(std::vector<int64_t> dims) { return Tensor(std::move(dims)); }

  int64_t NumDims() const { return static_cast<int64_t>(dims_.size()); }
  int64_t Dim(int64_t i) const { return dims_[static_cast<size_t>(i)]; }
  const std::vector<int64_t>& Dims() const { return dims_; }
  int64_t NumElements() const { return static_cast<int64_t>(values_.size()); }

  double& operator()(int64_t i) { return values_[static_cast<size_t>(i)]; }
  double operator()(int64_t i) const { return values_[static_cast<size_t>(i)]; }
  double& operator()(int64_t i, int64_t j) {
    return values_[static_cast<size_t>(i * dims_[1] + j)];
  }
  double operator()(int64_t i, int64_t j) const {
    return values_[static_cast<size_t>(i * dims_[1] + j)];
  }
  double& operator()(int64_t i, int64_t j, int64_t k) {
    return values_[static_cast<size_t>((i * dims_[1] + j) * dims_[2] + k)];
  }
  double operator()(int64_t i, int64_t j, int64_t k) const {
    return values_[static_cast<size_t>((i * dims_[1] + j) * dims_[2] + k)];
  }

  double* Data() { return values_.data(); }
  const double* Data() const { return values_.data(); }

  // Contiguous row views for 2-D and 3-D tensors.
  std::span<double> Row(int64_t i);
  std::span<const double> Row(int64_t i) const;
  std::span<double> Row(int64_t i, int64_t j);
  std::span<const double> Row(int64_t i, int64_t j) const;

  std::span<double> Flat() { return values_; }
  std::span<const double> Flat() const { return values_; }

  void Fill(double value);
  void Scale(double value);
  // this += scale * other; shapes must agree.
  void AddScaled(const Tensor& other, double scale);

  double SumSquares() const;
  bool HasNonFinite() const;
  bool SameShape(const Tensor& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int64_t> dims_;
  std::vector<double> values_;
};

// Named parameter (or gradient) collection. std::map keeps iteration order
// deterministic, which the optimizer and checkpoint writer rely on.
using ParamMap = std::map<std::string, Tensor>;

double GlobalSumSquares(const ParamMap& params);
bool AnyNonFinite(const ParamMap& params);
void ScaleAll(ParamMap* params, double scale);
ParamMap ZerosLike(const ParamMap& params);

}  // namespace codert

#endif  // CODERT_CORE_TENSOR_H_
