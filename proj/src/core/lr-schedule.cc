// core/lr-schedule.cc

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

#include "core/lr-schedule.h"

#include <cmath>
#include <stdexcept>

namespace codert {

void LrSchedule::Validate() const {
  if (warmup_start <= 0.0 || peak <= 0.0 || final_lr <= 0.0)
    throw std::invalid_argument("learning rates must be positive");
  if (warmup_start >= peak) throw std::invalid_argument("warmup_start must be < peak");
  if (final_lr >= peak) throw std::invalid_argument("final_lr must be < peak");
  if (warmup_steps < 1 || hold_steps < 0)
    throw std::invalid_argument("bad warmup/hold step counts");
  if (decay_end_step <= warmup_steps + hold_steps)
    throw std::invalid_argument("decay_end_step must follow the hold stage");
}

double LrAtStep(const LrSchedule& s, int64_t step) {
  if (step < 0) throw std::invalid_argument("step must be >= 0");
  const int64_t hold_end = s.warmup_steps + s.hold_steps;
  if (step <= s.warmup_steps) {
    const double frac =
        static_cast<double>(step) / static_cast<double>(s.warmup_steps);
    return s.warmup_start + (s.peak - s.warmup_start) * frac;
  }
  if (step <= hold_end) return s.peak;
  if (step >= s.decay_end_step) return s.final_lr;
  const double frac = static_cast<double>(step - hold_end) /
                      static_cast<double>(s.decay_end_step - hold_end);
  return s.peak * std::pow(s.final_lr / s.peak, frac);
}

}  // namespace codert
