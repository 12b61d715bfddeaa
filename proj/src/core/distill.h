// core/distill.h

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

#ifndef CODERT_CORE_DISTILL_H_
#define CODERT_CORE_DISTILL_H_

#include <cstdint>

#include "core/data-synth.h"
#include "core/network.h"
#include "core/tensor.h"

namespace codert {

enum class DistillMode {
  kColearnSharedDecoder,    // teacher + student encoders, one decoder
  kStaticTeacherSeparate,   // frozen pre-trained teacher, separate models
  kColearnNoDistill,        // shared decoder, lambda forced to 0
};

enum class TopKSource { kTeacher, kStudent };

struct DistillConfig {
  double lambda = 1.0;
  int32_t top_k = 0;  // 0 selects all V+1 logit dimensions
  TopKSource topk_source = TopKSource::kTeacher;
  DistillMode mode = DistillMode::kColearnSharedDecoder;
};

// Loss components for one step. total composes as
// rnnt_student + rnnt_teacher + lambda * distill, with the teacher term
// zero in static-teacher mode.
struct LossBundle {
  double rnnt_student = 0.0;
  double rnnt_teacher = 0.0;
  double distill = 0.0;
  double total = 0.0;
};

// Mean squared difference between student and teacher encoder logits over
// the first valid_len frames and all V+1 logit dimensions. The teacher is
// a constant for gradient purposes: only grad_student is produced.
double EncoderDistillLoss(const Tensor& student_enc, const Tensor& teacher_enc,
                          int64_t valid_len, Tensor* grad_student);

// Same loss restricted per frame to the top-k logit indices of the chosen
// side (teacher by default), normalized by valid_len * k. k = V+1
// reproduces EncoderDistillLoss exactly (it is the same code path).
double TopKMaskedDistillLoss(const Tensor& student_enc, const Tensor& teacher_enc,
                             int64_t valid_len, int32_t k, TopKSource source,
                             Tensor* grad_student);

LossBundle ComposeTotalLoss(double rnnt_student, double rnnt_teacher, double distill,
                            const DistillConfig& config);

// Lattice-collapse baseline: at each (t, u) the V+1 posteriors are bucketed
// into {next label, blank, everything else} and KL(teacher || student) is
// averaged over lattice nodes. Inputs are per-node log-softmax tensors
// [T', U+1, V+1]. A zero student bucket is clamped to 1e-12.
double CollapsedKlDistill(const Tensor& student_log_probs,
                          const Tensor& teacher_log_probs, const LabelSequence& labels);

// Gradients and losses for one optimization step over a batch. Loss terms
// are means over the utterances in the batch.
struct StepResult {
  LossBundle loss;
  ParamMap grad_student_encoder;
  ParamMap grad_teacher_encoder;  // empty in static/baseline modes
  ParamMap grad_decoder;          // shared decoder, or the student's own
  double ts_encoder_mse = 0.0;    // full-logit teacher/student MSE metric
  int64_t num_utterances = 0;
};

// Shared-decoder co-learning step: both encoders feed the same decoder
// output, the decoder accumulates gradient from both transducer losses,
// and only the student encoder receives the distillation gradient.
StepResult ColearnStep(const EncoderConfig& student_cfg, const EncoderConfig& teacher_cfg,
                       const DecoderConfig& dec_cfg, const ParamMap& student_enc,
                       const ParamMap& teacher_enc, const ParamMap& shared_dec,
                       const SequenceBatch& batch, const DistillConfig& config,
                       uint64_t dropout_seed, int64_t step, int32_t threads);

// Frozen-teacher step: the student is a standalone transducer; the teacher
// contributes encoder logits only and receives no gradients.
StepResult StaticTeacherStep(const EncoderConfig& student_cfg,
                             const DecoderConfig& student_dec_cfg,
                             const ParamMap& student_enc, const ParamMap& student_dec,
                             const EncoderConfig& teacher_cfg,
                             const ParamMap& frozen_teacher_enc,
                             const SequenceBatch& batch, const DistillConfig& config,
                             uint64_t dropout_seed, int64_t step, int32_t threads);

// Plain transducer training step (no teacher anywhere).
StepResult BaselineStep(const EncoderConfig& enc_cfg, const DecoderConfig& dec_cfg,
                        const ParamMap& enc_params, const ParamMap& dec_params,
                        const SequenceBatch& batch, uint64_t dropout_seed, int64_t step,
                        int32_t threads);

}  // namespace codert

#endif  // CODERT_CORE_DISTILL_H_
