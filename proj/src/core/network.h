// core/network.h

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

#ifndef CODERT_CORE_NETWORK_H_
#define CODERT_CORE_NETWORK_H_

#include <cstdint>
#include <string>
#include <vector>

#include "core/lstm.h"
#include "core/rng.h"
#include "core/tensor.h"
#include "core/transducer-lattice.h"

namespace codert {

// Stacked-LSTM encoder. The optional time-reduction step runs after
// `time_reduction_after_layer` layers (1-based count; 0 disables it) and
// halves the frame rate by concatenating consecutive frame pairs.
struct EncoderConfig {
  int32_t num_layers = 2;
  int32_t hidden_units = 32;
  int32_t input_dim = 8;
  int32_t time_reduction_after_layer = 1;  // 0 = no reduction
  int32_t time_reduction_factor = 2;
  int32_t output_dim = 33;  // V + 1

  void Validate() const;
  int64_t ReducedLength(int64_t frames) const;
};

// Embedding + stacked-LSTM prediction network with a projection to V+1.
struct DecoderConfig {
  int32_t embed_dim = 16;
  int32_t num_layers = 1;
  int32_t hidden_units = 48;
  int32_t output_dim = 33;  // V + 1
  double dropout = 0.0;     // applied at the LSTM output during training

  void Validate() const;
};

// Pair of parameter maps for a standalone transducer.
struct RnntParams {
  ParamMap encoder;
  ParamMap decoder;
};

struct EncoderCache {
  std::vector<LstmCache> layers;
};

struct DecoderCache {
  std::vector<LstmCache> layers;
  Tensor embedded;      // [U+1, E]
  Tensor dropout_mask;  // [U+1, H]; empty when dropout is off
  Tensor hidden;        // [U+1, H], post-dropout input to the projection
};

// Deterministic initialization: uniform(-a, a) with a = 1/sqrt(fan_in) per
// matrix (fan_in = trailing dimension), zero biases except the LSTM forget
// gate at 1.0. The stream for each tensor is derived from (seed, name), so
// values do not depend on creation order.
ParamMap InitEncoderParams(const EncoderConfig& config, uint64_t seed);
ParamMap InitDecoderParams(const DecoderConfig& config, uint64_t seed);

// Concatenates consecutive frame pairs: [T, d] -> [ceil(T/2), 2d]; an odd
// tail frame is paired with zeros.
Tensor TimeReduce(const Tensor& frames);
Tensor TimeReduceBackward(const Tensor& grad_reduced, int64_t orig_frames, int64_t dim);

// frames [T, input_dim] -> logits [T', V+1]. cache may be null for
// inference-only use.
Tensor EncoderForward(const EncoderConfig& config, const ParamMap& params,
                      const Tensor& frames, EncoderCache* cache);
void EncoderBackward(const EncoderConfig& config, const ParamMap& params,
                     const EncoderCache& cache, const Tensor& grad_logits,
                     ParamMap* grads);

// tokens (length U, teacher-forced) -> logits [U+1, V+1]; row 0 is the
// start state fed with a zero embedding. dropout_rng enables the decoder
// dropout mask; pass null for evaluation.
Tensor DecoderForward(const DecoderConfig& config, const ParamMap& params,
                      const std::vector<int32_t>& tokens, DecoderCache* cache,
                      Rng* dropout_rng);
void DecoderBackward(const DecoderConfig& config, const ParamMap& params,
                     const DecoderCache& cache, const std::vector<int32_t>& tokens,
                     const Tensor& grad_logits, ParamMap* grads);

// out[t, u, k] = tanh(enc[t, k] + dec[u, k]).
Tensor JointForward(const Tensor& enc_logits, const Tensor& dec_logits);
void JointBackward(const Tensor& joint_out, const Tensor& grad_out,
                   Tensor* grad_enc, Tensor* grad_dec);

// Full forward for one utterance: encoder, decoder, joint, lattice loss.
struct UtteranceForward {
  Tensor enc_logits;  // [T', V+1]
  Tensor dec_logits;  // [U+1, V+1]
  JointLattice lattice;
  LabelSequence labels;
  EncoderCache enc_cache;
  DecoderCache dec_cache;
  double loss = 0.0;  // negative log-likelihood
};

UtteranceForward ModelForward(const EncoderConfig& enc_config,
                              const DecoderConfig& dec_config,
                              const ParamMap& enc_params, const ParamMap& dec_params,
                              const Tensor& frames, const std::vector<int32_t>& tokens,
                              bool with_grad, Rng* dropout_rng);

// Pushes grad_enc_logits / grad_dec_logits (gradients at the projection
// outputs) down through the networks, accumulating parameter gradients.
void ModelBackward(const EncoderConfig& enc_config, const DecoderConfig& dec_config,
                   const ParamMap& enc_params, const ParamMap& dec_params,
                   const UtteranceForward& fwd, const Tensor& grad_enc_logits,
                   const Tensor& grad_dec_logits, ParamMap* enc_grads,
                   ParamMap* dec_grads);

}  // namespace codert

#endif  // CODERT_CORE_NETWORK_H_
