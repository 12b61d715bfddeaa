// core/decode.h

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

#ifndef CODERT_CORE_DECODE_H_
#define CODERT_CORE_DECODE_H_

#include <cstdint>
#include <vector>

#include "core/network.h"
#include "core/tensor.h"

namespace codert {

struct DecodeOptions {
  int32_t beam = 6;
  // Hard ceiling on non-blank emissions per frame; untrained models can
  // otherwise loop on a non-blank argmax forever.
  int32_t max_symbols_per_frame = 10;
};

struct DecodeResult {
  std::vector<int32_t> tokens;
  double log_prob = 0.0;
  int64_t emission_cap_hits = 0;
};

// Frame-by-frame argmax over softmax(tanh(enc_t + dec_u)): blank advances
// the frame, a token advances the decoder. log_prob is the score of the
// single alignment path taken.
DecodeResult GreedyDecode(const EncoderConfig& enc_cfg, const DecoderConfig& dec_cfg,
                          const ParamMap& enc_params, const ParamMap& dec_params,
                          const Tensor& frames, const DecodeOptions& opts);

// Time-synchronous transducer beam search. Hypotheses with equal token
// sequences are merged by log-adding their scores, so the returned
// log_prob is the explored-alignment mass of the best sequence. Ties are
// broken toward the shorter, then lexicographically smaller sequence.
// beam = 1 reproduces GreedyDecode's output tokens exactly.
DecodeResult BeamDecode(const EncoderConfig& enc_cfg, const DecoderConfig& dec_cfg,
                        const ParamMap& enc_params, const ParamMap& dec_params,
                        const Tensor& frames, const DecodeOptions& opts);

}  // namespace codert

#endif  // CODERT_CORE_DECODE_H_
