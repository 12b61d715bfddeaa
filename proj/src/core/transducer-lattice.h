// core/transducer-lattice.h

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

#ifndef CODERT_CORE_TRANSDUCER_LATTICE_H_
#define CODERT_CORE_TRANSDUCER_LATTICE_H_

#include <cstdint>
#include <vector>

#include "core/tensor.h"

namespace codert {

// Label sequence for one utterance. The blank symbol is always the last
// vocabulary index and never appears among the tokens.
struct LabelSequence {
  std::vector<int32_t> tokens;
  int32_t blank_index = 0;

  int64_t NumTokens() const { return static_cast<int64_t>(tokens.size()); }
  void Validate() const;
};

// The T' x (U+1) transduction grid for one utterance. Node (t, u) means
// "t frames consumed, u labels emitted"; from it the path either emits
// blank (advance t) or the next reference label (advance u). logits and
// log_probs are [T', U+1, V+1]; alpha/beta are log-space [T', U+1].
struct JointLattice {
  Tensor logits;
  Tensor log_probs;
  Tensor alpha;
  Tensor beta;
  Tensor grad_logits;

  int64_t NumFrames() const { return logits.Dim(0); }
  int64_t NumLabelSlots() const { return logits.Dim(1); }  // U + 1
  int64_t VocabSize() const { return logits.Dim(2); }      // V + 1

  static JointLattice FromLogits(Tensor logits);
};

// Fills lattice->log_probs with per-node log-softmax of the logits.
void ComputeLogProbs(JointLattice* lattice);

// Forward pass: alpha[t][u] = log P(consume t frames, emit first u labels).
// Requires log_probs. Returns the total log-likelihood
// alpha[T'-1][U] + log P_blank(T'-1, U).
double ForwardAlphas(JointLattice* lattice, const LabelSequence& labels);

// Backward pass: beta[t][u] = log P(complete the alignment from (t, u)).
// Returns beta[0][0], which equals the total log-likelihood.
double BackwardBetas(JointLattice* lattice, const LabelSequence& labels);

// Negative log-likelihood of the label sequence. Fills log_probs and alpha.
double TransducerLoss(JointLattice* lattice, const LabelSequence& labels);

// Loss plus d(loss)/d(logits) into lattice->grad_logits. Fills log_probs,
// alpha and beta as a side effect.
double TransducerLossWithGrad(JointLattice* lattice, const LabelSequence& labels);

// Exhaustive-enumeration oracle: sums the probability of every valid
// alignment path (all C(T'+U-1, U) emission interleavings followed by the
// final blank) in 64-bit and returns the negative log. Guarded to
// T' <= 6, U <= 4. Requires log_probs; num_paths_out is optional.
double BruteForceLoss(const JointLattice& lattice, const LabelSequence& labels,
                      int64_t* num_paths_out = nullptr);

}  // namespace codert

#endif  // CODERT_CORE_TRANSDUCER_LATTICE_H_
