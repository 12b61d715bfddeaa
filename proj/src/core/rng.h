// core/rng.h

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

#ifndef CODERT_CORE_RNG_H_
#define CODERT_CORE_RNG_H_

#include <cstdint>
#include <string_view>

namespace codert {

// Portable deterministic generator: xoshiro256++ seeded through splitmix64.
// Every consumer derives its own stream via ForStream(seed, name) so that
// adding a new consumer never shifts the values another one sees.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  // Derives an independent stream from (seed, stream name). The name is
  // hashed with FNV-1a so the mapping is stable across platforms.
  static Rng ForStream(uint64_t seed, std::string_view stream);

  uint64_t NextUint64();

  // Uniform in [0, 1) with 53 random mantissa bits.
  double NextDouble();

  double Uniform(double lo, double hi);

  // Inclusive on both ends.
  int64_t NextInt(int64_t lo, int64_t hi);

  // Standard normal via Box-Muller; the second sample of each pair is
  // cached, so draws come in a fixed order regardless of the caller.
  double Gaussian();

 private:
  uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

uint64_t SplitMix64(uint64_t* state);
uint64_t Fnv1a64(std::string_view s);

}  // namespace codert

#endif  // CODERT_CORE_RNG_H_
