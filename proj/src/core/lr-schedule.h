// core/lr-schedule.h

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

#ifndef CODERT_CORE_LR_SCHEDULE_H_
#define CODERT_CORE_LR_SCHEDULE_H_

#include <cstdint>

namespace codert {

// Piecewise learning-rate policy: linear warmup from warmup_start to peak
// over warmup_steps, a constant hold for hold_steps, then exponential
// decay reaching final_lr at decay_end_step and clamped there after.
struct LrSchedule {
  double warmup_start = 1e-7;
  double peak = 5e-4;
  int64_t warmup_steps = 3000;
  int64_t hold_steps = 35000;
  int64_t decay_end_step = 75000;
  double final_lr = 1e-5;

  void Validate() const;
};

double LrAtStep(const LrSchedule& schedule, int64_t step);

}  // namespace codert

#endif  // CODERT_CORE_LR_SCHEDULE_H_
