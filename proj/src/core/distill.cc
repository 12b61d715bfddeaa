// core/distill.cc

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

#include "core/distill.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "core/numerics.h"
#include "core/rng.h"
#include "core/threading.h"

namespace codert {

double TopKMaskedDistillLoss(const Tensor& student_enc, const Tensor& teacher_enc,
                             int64_t valid_len, int32_t k, TopKSource source,
                             Tensor* grad_student) {
  if (!student_enc.SameShape(teacher_enc))
    throw std::invalid_argument("distill: student/teacher encoder shape mismatch");
  if (valid_len < 0 || valid_len > student_enc.Dim(0))
    throw std::invalid_argument("distill: valid_len out of range");
  const int64_t vocab = student_enc.Dim(1);
  if (k < 1 || k > vocab) throw std::invalid_argument("distill: top-k out of range");

  if (grad_student && grad_student->Dims() != student_enc.Dims())
    *grad_student = Tensor(student_enc.Dims());

  if (valid_len == 0) return 0.0;
  const double denom = static_cast<double>(valid_len) * static_cast<double>(k);
  const double grad_scale = 2.0 / denom;

  double sum = 0.0;
  std::vector<int32_t> mask;
  for (int64_t t = 0; t < valid_len; ++t) {
    mask = TopKIndices(
        source == TopKSource::kTeacher ? teacher_enc.Row(t) : student_enc.Row(t), k);
    std::sort(mask.begin(), mask.end());
    for (int32_t idx : mask) {
      const double diff = student_enc(t, idx) - teacher_enc(t, idx);
      sum += diff * diff;
      if (grad_student) (*grad_student)(t, idx) = grad_scale * diff;
    }
  }
  return sum / denom;
}

double EncoderDistillLoss(const Tensor& student_enc, const Tensor& teacher_enc,
                          int64_t valid_len, Tensor* grad_student) {
  return TopKMaskedDistillLoss(student_enc, teacher_enc, valid_len,
                               static_cast<int32_t>(student_enc.Dim(1)),
                               TopKSource::kTeacher, grad_student);
}

LossBundle ComposeTotalLoss(double rnnt_student, double rnnt_teacher, double distill,
                            const DistillConfig& config) {
  LossBundle bundle;
  bundle.rnnt_student = rnnt_student;
  bundle.distill = distill;
  const double lambda =
      config.mode == DistillMode::kColearnNoDistill ? 0.0 : config.lambda;
  switch (config.mode) {
    case DistillMode::kColearnSharedDecoder:
    case DistillMode::kColearnNoDistill:
      bundle.rnnt_teacher = rnnt_teacher;
      bundle.total = rnnt_student + rnnt_teacher + lambda * distill;
      break;
    case DistillMode::kStaticTeacherSeparate:
      bundle.rnnt_teacher = 0.0;
      bundle.total = rnnt_student + lambda * distill;
      break;
  }
  return bundle;
}

double CollapsedKlDistill(const Tensor& student_log_probs,
                          const Tensor& teacher_log_probs, const LabelSequence& labels) {
  if (!student_log_probs.SameShape(teacher_log_probs))
    throw std::invalid_argument("collapsed KL: lattice shape mismatch");
  const int64_t t_len = student_log_probs.Dim(0);
  const int64_t u_len = student_log_probs.Dim(1);
  const int32_t blank = labels.blank_index;

  auto buckets = [&](const Tensor& lp, int64_t t, int64_t u, double out[3]) {
    const double p_blank = std::exp(lp(t, u, blank));
    double p_next = 0.0;
    if (u < u_len - 1) p_next = std::exp(lp(t, u, labels.tokens[static_cast<size_t>(u)]));
    out[0] = p_next;
    out[1] = p_blank;
    out[2] = std::max(0.0, 1.0 - p_next - p_blank);
  };

  double total = 0.0;
  for (int64_t t = 0; t < t_len; ++t) {
    for (int64_t u = 0; u < u_len; ++u) {
      double pt[3], ps[3];
      buckets(teacher_log_probs, t, u, pt);
      buckets(student_log_probs, t, u, ps);
      double kl = 0.0;
      for (int i = 0; i < 3; ++i) {
        if (pt[i] <= 0.0) continue;
        const double s = std::max(ps[i], 1e-12);
        kl += pt[i] * std::log(pt[i] / s);
      }
      total += kl;
    }
  }
  return total / static_cast<double>(t_len * u_len);
}

namespace {

uint64_t DropoutStreamSeed(uint64_t dropout_seed, int64_t step, int64_t utt) {
  uint64_t s = dropout_seed;
  s ^= SplitMix64(&s) + static_cast<uint64_t>(step);
  s ^= SplitMix64(&s) + static_cast<uint64_t>(utt);
  return s;
}

// Per-utterance partial results, reduced in batch order afterwards so the
// result is independent of the thread count.
struct UttPartial {
  ParamMap grad_student_enc;
  ParamMap grad_teacher_enc;
  ParamMap grad_decoder;
  double loss_s = 0.0;
  double loss_t = 0.0;
  double distill = 0.0;
  double mse = 0.0;
};

void ReduceInto(StepResult* result, std::vector<UttPartial>& partials,
                const DistillConfig& config, bool has_teacher_grads) {
  const int64_t b_size = static_cast<int64_t>(partials.size());
  double loss_s = 0.0, loss_t = 0.0, distill = 0.0, mse = 0.0;
  for (int64_t i = 0; i < b_size; ++i) {
    UttPartial& p = partials[static_cast<size_t>(i)];
    loss_s += p.loss_s;
    loss_t += p.loss_t;
    distill += p.distill;
    mse += p.mse;
    for (auto& [name, g] : p.grad_student_enc)
      result->grad_student_encoder[name].AddScaled(g, 1.0);
    if (has_teacher_grads) {
      for (auto& [name, g] : p.grad_teacher_enc)
        result->grad_teacher_encoder[name].AddScaled(g, 1.0);
    }
    for (auto& [name, g] : p.grad_decoder) result->grad_decoder[name].AddScaled(g, 1.0);
  }
  const double inv_b = 1.0 / static_cast<double>(b_size);
  result->loss = ComposeTotalLoss(loss_s * inv_b, loss_t * inv_b, distill * inv_b, config);
  result->ts_encoder_mse = mse * inv_b;
  result->num_utterances = b_size;
}

}  // namespace

StepResult ColearnStep(const EncoderConfig& student_cfg, const EncoderConfig& teacher_cfg,
                       const DecoderConfig& dec_cfg, const ParamMap& student_enc,
                       const ParamMap& teacher_enc, const ParamMap& shared_dec,
                       const SequenceBatch& batch, const DistillConfig& config,
                       uint64_t dropout_seed, int64_t step, int32_t threads) {
  if (student_cfg.output_dim != teacher_cfg.output_dim)
    throw std::invalid_argument("colearn: student/teacher output dims differ");
  const int64_t b_size = batch.BatchSize();
  if (b_size < 1) throw std::invalid_argument("colearn: empty batch");

  const double lambda =
      config.mode == DistillMode::kColearnNoDistill ? 0.0 : config.lambda;
  const int32_t vocab = student_cfg.output_dim;
  const int32_t k = config.top_k > 0 ? config.top_k : vocab;
  const double inv_b = 1.0 / static_cast<double>(b_size);

  std::vector<UttPartial> partials(static_cast<size_t>(b_size));
  ParallelFor(b_size, threads, [&](int64_t i) {
    UttPartial& p = partials[static_cast<size_t>(i)];
    p.grad_student_enc = ZerosLike(student_enc);
    p.grad_teacher_enc = ZerosLike(teacher_enc);
    p.grad_decoder = ZerosLike(shared_dec);

    const Tensor frames = batch.UtteranceFeatures(i);
    const std::vector<int32_t>& tokens = batch.labels[static_cast<size_t>(i)];

    Rng dropout_rng(DropoutStreamSeed(dropout_seed, step, i));
    Rng* rng = dec_cfg.dropout > 0.0 ? &dropout_rng : nullptr;

    // One decoder pass serves both transducers.
    DecoderCache dec_cache;
    const Tensor dec_logits = DecoderForward(dec_cfg, shared_dec, tokens, &dec_cache, rng);

    EncoderCache enc_cache_s, enc_cache_t;
    const Tensor enc_s = EncoderForward(student_cfg, student_enc, frames, &enc_cache_s);
    const Tensor enc_t = EncoderForward(teacher_cfg, teacher_enc, frames, &enc_cache_t);
    if (enc_s.Dim(0) != enc_t.Dim(0))
      throw std::invalid_argument("colearn: teacher/student frame rates diverge");

    LabelSequence labels{tokens, vocab - 1};

    JointLattice lat_s = JointLattice::FromLogits(JointForward(enc_s, dec_logits));
    p.loss_s = TransducerLossWithGrad(&lat_s, labels);
    JointLattice lat_t = JointLattice::FromLogits(JointForward(enc_t, dec_logits));
    p.loss_t = TransducerLossWithGrad(&lat_t, labels);

    lat_s.grad_logits.Scale(inv_b);
    lat_t.grad_logits.Scale(inv_b);

    Tensor grad_enc_s, grad_dec_from_s, grad_enc_t, grad_dec_from_t;
    JointBackward(lat_s.logits, lat_s.grad_logits, &grad_enc_s, &grad_dec_from_s);
    JointBackward(lat_t.logits, lat_t.grad_logits, &grad_enc_t, &grad_dec_from_t);

    // Distillation pulls the student toward the (stop-gradient) teacher.
    Tensor distill_grad;
    p.distill = TopKMaskedDistillLoss(enc_s, enc_t, enc_s.Dim(0), k,
                                      config.topk_source, &distill_grad);
    p.mse = k == vocab ? p.distill
                       : TopKMaskedDistillLoss(enc_s, enc_t, enc_s.Dim(0), vocab,
                                               config.topk_source, nullptr);
    if (lambda != 0.0) grad_enc_s.AddScaled(distill_grad, lambda * inv_b);

    EncoderBackward(student_cfg, student_enc, enc_cache_s, grad_enc_s,
                    &p.grad_student_enc);
    EncoderBackward(teacher_cfg, teacher_enc, enc_cache_t, grad_enc_t,
                    &p.grad_teacher_enc);
    grad_dec_from_s.AddScaled(grad_dec_from_t, 1.0);
    DecoderBackward(dec_cfg, shared_dec, dec_cache, tokens, grad_dec_from_s,
                    &p.grad_decoder);
  });

  StepResult result;
  result.grad_student_encoder = ZerosLike(student_enc);
  result.grad_teacher_encoder = ZerosLike(teacher_enc);
  result.grad_decoder = ZerosLike(shared_dec);
  ReduceInto(&result, partials, config, /*has_teacher_grads=*/true);
  return result;
}

StepResult StaticTeacherStep(const EncoderConfig& student_cfg,
                             const DecoderConfig& student_dec_cfg,
                             const ParamMap& student_enc, const ParamMap& student_dec,
                             const EncoderConfig& teacher_cfg,
                             const ParamMap& frozen_teacher_enc,
                             const SequenceBatch& batch, const DistillConfig& config,
                             uint64_t dropout_seed, int64_t step, int32_t threads) {
  const int64_t b_size = batch.BatchSize();
  if (b_size < 1) throw std::invalid_argument("static step: empty batch");
  const int32_t vocab = student_cfg.output_dim;
  const int32_t k = config.top_k > 0 ? config.top_k : vocab;
  const double inv_b = 1.0 / static_cast<double>(b_size);

  std::vector<UttPartial> partials(static_cast<size_t>(b_size));
  ParallelFor(b_size, threads, [&](int64_t i) {
    UttPartial& p = partials[static_cast<size_t>(i)];
    p.grad_student_enc = ZerosLike(student_enc);
    p.grad_decoder = ZerosLike(student_dec);

    const Tensor frames = batch.UtteranceFeatures(i);
    const std::vector<int32_t>& tokens = batch.labels[static_cast<size_t>(i)];

    Rng dropout_rng(DropoutStreamSeed(dropout_seed, step, i));
    Rng* rng = student_dec_cfg.dropout > 0.0 ? &dropout_rng : nullptr;

    UtteranceForward fwd = ModelForward(student_cfg, student_dec_cfg, student_enc,
                                        student_dec, frames, tokens,
                                        /*with_grad=*/true, rng);
    p.loss_s = fwd.loss;

    const Tensor enc_t = EncoderForward(teacher_cfg, frozen_teacher_enc, frames, nullptr);
    if (fwd.enc_logits.Dim(0) != enc_t.Dim(0))
      throw std::invalid_argument("static step: teacher/student frame rates diverge");

    fwd.lattice.grad_logits.Scale(inv_b);
    Tensor grad_enc, grad_dec;
    JointBackward(fwd.lattice.logits, fwd.lattice.grad_logits, &grad_enc, &grad_dec);

    Tensor distill_grad;
    p.distill = TopKMaskedDistillLoss(fwd.enc_logits, enc_t, fwd.enc_logits.Dim(0), k,
                                      config.topk_source, &distill_grad);
    p.mse = k == vocab
                ? p.distill
                : TopKMaskedDistillLoss(fwd.enc_logits, enc_t, fwd.enc_logits.Dim(0),
                                        vocab, config.topk_source, nullptr);
    if (config.lambda != 0.0) grad_enc.AddScaled(distill_grad, config.lambda * inv_b);

    ModelBackward(student_cfg, student_dec_cfg, student_enc, student_dec, fwd, grad_enc,
                  grad_dec, &p.grad_student_enc, &p.grad_decoder);
  });

  StepResult result;
  result.grad_student_encoder = ZerosLike(student_enc);
  result.grad_decoder = ZerosLike(student_dec);
  ReduceInto(&result, partials, config, /*has_teacher_grads=*/false);
  return result;
}

StepResult BaselineStep(const EncoderConfig& enc_cfg, const DecoderConfig& dec_cfg,
                        const ParamMap& enc_params, const ParamMap& dec_params,
                        const SequenceBatch& batch, uint64_t dropout_seed, int64_t step,
                        int32_t threads) {
  const int64_t b_size = batch.BatchSize();
  if (b_size < 1) throw std::invalid_argument("baseline step: empty batch");
  const double inv_b = 1.0 / static_cast<double>(b_size);

  std::vector<UttPartial> partials(static_cast<size_t>(b_size));
  ParallelFor(b_size, threads, [&](int64_t i) {
    UttPartial& p = partials[static_cast<size_t>(i)];
    p.grad_student_enc = ZerosLike(enc_params);
    p.grad_decoder = ZerosLike(dec_params);

    const Tensor frames = batch.UtteranceFeatures(i);
    const std::vector<int32_t>& tokens = batch.labels[static_cast<size_t>(i)];

    Rng dropout_rng(DropoutStreamSeed(dropout_seed, step, i));
    Rng* rng = dec_cfg.dropout > 0.0 ? &dropout_rng : nullptr;

    UtteranceForward fwd = ModelForward(enc_cfg, dec_cfg, enc_params, dec_params, frames,
                                        tokens, /*with_grad=*/true, rng);
    p.loss_s = fwd.loss;

    fwd.lattice.grad_logits.Scale(inv_b);
    Tensor grad_enc, grad_dec;
    JointBackward(fwd.lattice.logits, fwd.lattice.grad_logits, &grad_enc, &grad_dec);
    ModelBackward(enc_cfg, dec_cfg, enc_params, dec_params, fwd, grad_enc, grad_dec,
                  &p.grad_student_enc, &p.grad_decoder);
  });

  StepResult result;
  result.grad_student_encoder = ZerosLike(enc_params);
  result.grad_decoder = ZerosLike(dec_params);
  DistillConfig baseline_cfg;
  baseline_cfg.mode = DistillMode::kStaticTeacherSeparate;
  baseline_cfg.lambda = 0.0;
  ReduceInto(&result, partials, baseline_cfg, /*has_teacher_grads=*/false);
  return result;
}

}  // namespace codert
