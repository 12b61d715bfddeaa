// core/edit-distance.cc

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

#include "core/edit-distance.h"

#include <algorithm>
#include <stdexcept>

namespace codert {

int64_t EditDistance(std::span<const int32_t> ref, std::span<const int32_t> hyp) {
  const size_t n = ref.size();
  const size_t m = hyp.size();
  std::vector<int64_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      const int64_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double Wer(const std::vector<std::vector<int32_t>>& refs,
           const std::vector<std::vector<int32_t>>& hyps) {
  if (refs.size() != hyps.size())
    throw std::invalid_argument("wer: reference/hypothesis counts differ");
  int64_t errors = 0;
  int64_t ref_tokens = 0;
  for (size_t i = 0; i < refs.size(); ++i) {
    errors += EditDistance(refs[i], hyps[i]);
    ref_tokens += static_cast<int64_t>(refs[i].size());
  }
  if (ref_tokens == 0) throw std::invalid_argument("wer: zero total reference length");
  return static_cast<double>(errors) / static_cast<double>(ref_tokens);
}

double RelativeWerr(double base_wer, double current_wer) {
  if (base_wer <= 0.0) throw std::invalid_argument("werr: base rate must be positive");
  return (base_wer - current_wer) / base_wer * 100.0;
}

}  // namespace codert
