// core/transducer-lattice.cc

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

#include "core/transducer-lattice.h"

#include <cmath>
#include <stdexcept>

#include "core/numerics.h"

namespace codert {

void LabelSequence::Validate() const {
  if (blank_index < 1) throw std::invalid_argument("blank index must be positive");
  for (int32_t tok : tokens) {
    if (tok < 0 || tok >= blank_index)
      throw std::invalid_argument("label token out of range [0, blank)");
  }
}

JointLattice JointLattice::FromLogits(Tensor logits) {
  if (logits.NumDims() != 3)
    throw std::invalid_argument("lattice logits must be [T', U+1, V+1]");
  JointLattice lat;
  lat.logits = std::move(logits);
  return lat;
}

static void CheckLatticeShape(const JointLattice& lat, const LabelSequence& labels) {
  if (lat.logits.NumDims() != 3)
    throw std::invalid_argument("lattice logits must be [T', U+1, V+1]");
  if (lat.NumFrames() < 1) throw std::invalid_argument("lattice needs T' >= 1");
  if (lat.NumLabelSlots() != labels.NumTokens() + 1)
    throw std::invalid_argument("lattice U+1 axis does not match label count");
  if (labels.blank_index != lat.VocabSize() - 1)
    throw std::invalid_argument("blank must be the last vocabulary index");
  labels.Validate();
}

void ComputeLogProbs(JointLattice* lattice) {
  const int64_t t_len = lattice->NumFrames();
  const int64_t u_len = lattice->NumLabelSlots();
  if (lattice->log_probs.Dims() != lattice->logits.Dims())
    lattice->log_probs = Tensor(lattice->logits.Dims());
  for (int64_t t = 0; t < t_len; ++t) {
    for (int64_t u = 0; u < u_len; ++u) {
      LogSoftmax(lattice->logits.Row(t, u), lattice->log_probs.Row(t, u));
    }
  }
}

double ForwardAlphas(JointLattice* lattice, const LabelSequence& labels) {
  CheckLatticeShape(*lattice, labels);
  if (lattice->log_probs.Dims() != lattice->logits.Dims()) ComputeLogProbs(lattice);

  const int64_t t_len = lattice->NumFrames();
  const int64_t u_len = lattice->NumLabelSlots();
  const int32_t blank = labels.blank_index;
  const Tensor& lp = lattice->log_probs;

  Tensor& alpha = lattice->alpha;
  alpha = Tensor({t_len, u_len});

  alpha(0, 0) = 0.0;
  for (int64_t t = 1; t < t_len; ++t)
    alpha(t, 0) = alpha(t - 1, 0) + lp(t - 1, 0, blank);
  for (int64_t u = 1; u < u_len; ++u)
    alpha(0, u) = alpha(0, u - 1) + lp(0, u - 1, labels.tokens[static_cast<size_t>(u - 1)]);
  for (int64_t t = 1; t < t_len; ++t) {
    for (int64_t u = 1; u < u_len; ++u) {
      const double from_blank = alpha(t - 1, u) + lp(t - 1, u, blank);
      const double from_emit =
          alpha(t, u - 1) + lp(t, u - 1, labels.tokens[static_cast<size_t>(u - 1)]);
      alpha(t, u) = LogAdd(from_blank, from_emit);
    }
  }
  return alpha(t_len - 1, u_len - 1) + lp(t_len - 1, u_len - 1, blank);
}

double BackwardBetas(JointLattice* lattice, const LabelSequence& labels) {
  CheckLatticeShape(*lattice, labels);
  if (lattice->log_probs.Dims() != lattice->logits.Dims()) ComputeLogProbs(lattice);

  const int64_t t_len = lattice->NumFrames();
  const int64_t u_len = lattice->NumLabelSlots();
  const int32_t blank = labels.blank_index;
  const Tensor& lp = lattice->log_probs;

  Tensor& beta = lattice->beta;
  beta = Tensor({t_len, u_len});

  beta(t_len - 1, u_len - 1) = lp(t_len - 1, u_len - 1, blank);
  for (int64_t t = t_len - 2; t >= 0; --t)
    beta(t, u_len - 1) = beta(t + 1, u_len - 1) + lp(t, u_len - 1, blank);
  for (int64_t u = u_len - 2; u >= 0; --u)
    beta(t_len - 1, u) =
        beta(t_len - 1, u + 1) + lp(t_len - 1, u, labels.tokens[static_cast<size_t>(u)]);
  for (int64_t t = t_len - 2; t >= 0; --t) {
    for (int64_t u = u_len - 2; u >= 0; --u) {
      const double via_blank = beta(t + 1, u) + lp(t, u, blank);
      const double via_emit =
          beta(t, u + 1) + lp(t, u, labels.tokens[static_cast<size_t>(u)]);
      beta(t, u) = LogAdd(via_blank, via_emit);
    }
  }
  return beta(0, 0);
}

double TransducerLoss(JointLattice* lattice, const LabelSequence& labels) {
  return -ForwardAlphas(lattice, labels);
}

double TransducerLossWithGrad(JointLattice* lattice, const LabelSequence& labels) {
  const double ll = ForwardAlphas(lattice, labels);
  BackwardBetas(lattice, labels);

  const int64_t t_len = lattice->NumFrames();
  const int64_t u_len = lattice->NumLabelSlots();
  const int64_t vocab = lattice->VocabSize();
  const int32_t blank = labels.blank_index;
  const Tensor& lp = lattice->log_probs;
  const Tensor& alpha = lattice->alpha;
  const Tensor& beta = lattice->beta;

  lattice->grad_logits = Tensor(lattice->logits.Dims());
  Tensor& grad = lattice->grad_logits;

  for (int64_t t = 0; t < t_len; ++t) {
    for (int64_t u = 0; u < u_len; ++u) {
      // Total path mass through this node.
      const double occupancy = std::exp(alpha(t, u) + beta(t, u) - ll);

      // Mass of the blank edge out of (t, u). Blank from the last frame is
      // only valid once all labels are emitted (the terminating transition).
      double w_blank = 0.0;
      if (t < t_len - 1) {
        w_blank = std::exp(alpha(t, u) + lp(t, u, blank) + beta(t + 1, u) - ll);
      } else if (u == u_len - 1) {
        w_blank = std::exp(alpha(t, u) + lp(t, u, blank) - ll);
      }

      // Mass of the emit edge (next reference label).
      double w_emit = 0.0;
      int32_t emit_tok = -1;
      if (u < u_len - 1) {
        emit_tok = labels.tokens[static_cast<size_t>(u)];
        w_emit = std::exp(alpha(t, u) + lp(t, u, emit_tok) + beta(t, u + 1) - ll);
      }

      for (int64_t v = 0; v < vocab; ++v) {
        double w = 0.0;
        if (v == blank) {
          w = w_blank;
        } else if (v == emit_tok) {
          w = w_emit;
        }
        grad(t, u, v) = occupancy * std::exp(lp(t, u, v)) - w;
      }
    }
  }
  return -ll;
}

namespace {

struct BruteForceState {
  const Tensor* lp;
  const LabelSequence* labels;
  int64_t t_len, u_len;
  double total_prob = 0.0;
  int64_t num_paths = 0;
};

void EnumeratePaths(BruteForceState* st, int64_t t, int64_t u, double logp) {
  const int32_t blank = st->labels->blank_index;
  if (t == st->t_len - 1 && u == st->u_len - 1) {
    // Terminating blank.
    st->total_prob += std::exp(logp + (*st->lp)(t, u, blank));
    st->num_paths += 1;
    return;
  }
  if (u < st->u_len - 1) {
    const int32_t tok = st->labels->tokens[static_cast<size_t>(u)];
    EnumeratePaths(st, t, u + 1, logp + (*st->lp)(t, u, tok));
  }
  if (t < st->t_len - 1) {
    EnumeratePaths(st, t + 1, u, logp + (*st->lp)(t, u, blank));
  }
}

}  // namespace

double BruteForceLoss(const JointLattice& lattice, const LabelSequence& labels,
                      int64_t* num_paths_out) {
  CheckLatticeShape(lattice, labels);
  if (lattice.log_probs.Dims() != lattice.logits.Dims())
    throw std::invalid_argument("brute force oracle requires log_probs");
  const int64_t t_len = lattice.NumFrames();
  const int64_t u_len = lattice.NumLabelSlots();
  if (t_len > 6 || u_len - 1 > 4) throw std::runtime_error("oracle size limit");

  BruteForceState st;
  st.lp = &lattice.log_probs;
  st.labels = &labels;
  st.t_len = t_len;
  st.u_len = u_len;
  EnumeratePaths(&st, 0, 0, 0.0);
  if (num_paths_out) *num_paths_out = st.num_paths;
  return -std::log(st.total_prob);
}

}  // namespace codert
