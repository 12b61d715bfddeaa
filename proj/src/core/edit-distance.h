// core/edit-distance.h

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

#ifndef CODERT_CORE_EDIT_DISTANCE_H_
#define CODERT_CORE_EDIT_DISTANCE_H_

#include <cstdint>
#include <span>
#include <vector>

namespace codert {

// Levenshtein distance with unit insertion/deletion/substitution costs.
int64_t EditDistance(std::span<const int32_t> ref, std::span<const int32_t> hyp);

// Corpus token error rate: sum of edit distances over sum of reference
// lengths. Throws on mismatched list sizes or zero total reference length.
double Wer(const std::vector<std::vector<int32_t>>& refs,
           const std::vector<std::vector<int32_t>>& hyps);

// Relative error-rate reduction in percent: (base - current) / base * 100.
double RelativeWerr(double base_wer, double current_wer);

}  // namespace codert

#endif  // CODERT_CORE_EDIT_DISTANCE_H_
