// core/selfcheck.cc

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

#include "core/selfcheck.h"

#include <cmath>
#include <sstream>

#include "core/decode.h"
#include "core/distill.h"
#include "core/lr-schedule.h"
#include "core/network.h"
#include "core/numerics.h"
#include "core/optimizer.h"
#include "core/rng.h"
#include "core/transducer-lattice.h"

namespace codert {

namespace {

double GuardedRelError(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-2});
}

JointLattice RandomLattice(Rng* rng, int64_t t_len, int64_t u_len, int64_t vocab,
                           double scale = 2.0) {
  Tensor logits({t_len, u_len, vocab});
  for (int64_t i = 0; i < logits.NumElements(); ++i)
    logits(i) = rng->Uniform(-scale, scale);
  return JointLattice::FromLogits(std::move(logits));
}

LabelSequence RandomLabels(Rng* rng, int64_t u_max, int64_t vocab) {
  LabelSequence labels;
  labels.blank_index = static_cast<int32_t>(vocab - 1);
  for (int64_t u = 0; u < u_max; ++u)
    labels.tokens.push_back(static_cast<int32_t>(rng->NextInt(0, vocab - 2)));
  return labels;
}

void DumpLattice(std::ostream& out, const JointLattice& lat, const LabelSequence& labels) {
  out << "  lattice T'=" << lat.NumFrames() << " U=" << labels.NumTokens()
      << " V+1=" << lat.VocabSize() << "\n  labels:";
  for (int32_t tok : labels.tokens) out << ' ' << tok;
  out << "\n  logits:";
  for (int64_t i = 0; i < lat.logits.NumElements(); ++i) out << ' ' << lat.logits(i);
  out << '\n';
}

SuiteResult LatticeOracleSuite(std::ostream& out) {
  SuiteResult result{"lattice_oracle", true, ""};
  Rng rng(20260101);
  double worst = 0.0;
  for (int trial = 0; trial < 150; ++trial) {
    const int64_t t_len = rng.NextInt(1, 4);
    const int64_t u_max = rng.NextInt(0, 3);
    const int64_t vocab = rng.NextInt(2, 4);
    JointLattice lat = RandomLattice(&rng, t_len, u_max + 1, vocab);
    LabelSequence labels = RandomLabels(&rng, u_max, vocab);
    const double loss = TransducerLoss(&lat, labels);
    const double oracle = BruteForceLoss(lat, labels);
    worst = std::max(worst, std::abs(loss - oracle));
    if (std::abs(loss - oracle) >= 1e-6) {
      result.passed = false;
      out << "lattice_oracle mismatch: dp " << loss << " vs enumeration " << oracle
          << '\n';
      DumpLattice(out, lat, labels);
      break;
    }
  }
  std::ostringstream detail;
  detail << "150 random lattices, max |dp - enumeration| = " << worst;
  result.detail = detail.str();
  return result;
}

SuiteResult LatticeGradientSuite(std::ostream& out, bool inject_flip) {
  SuiteResult result{"lattice_gradient", true, ""};
  Rng rng(20260202);
  const double h = 1e-3;
  double worst = 0.0;
  for (int trial = 0; trial < 40 && result.passed; ++trial) {
    const int64_t t_len = rng.NextInt(1, 3);
    const int64_t u_max = rng.NextInt(0, 2);
    const int64_t vocab = rng.NextInt(2, 4);
    JointLattice lat = RandomLattice(&rng, t_len, u_max + 1, vocab);
    LabelSequence labels = RandomLabels(&rng, u_max, vocab);
    TransducerLossWithGrad(&lat, labels);
    if (inject_flip && trial == 0) lat.grad_logits(0) = -lat.grad_logits(0) - 1.0;

    for (int64_t i = 0; i < lat.logits.NumElements() && result.passed; ++i) {
      JointLattice plus = JointLattice::FromLogits(lat.logits);
      plus.logits(i) += h;
      JointLattice minus = JointLattice::FromLogits(lat.logits);
      minus.logits(i) -= h;
      const double fd =
          (TransducerLoss(&plus, labels) - TransducerLoss(&minus, labels)) / (2 * h);
      const double err = GuardedRelError(lat.grad_logits(i), fd);
      worst = std::max(worst, err);
      if (err >= 1e-4) {
        result.passed = false;
        out << "lattice_gradient mismatch at flat index " << i << ": analytic "
            << lat.grad_logits(i) << " vs fd " << fd << '\n';
        DumpLattice(out, lat, labels);
      }
    }
  }
  std::ostringstream detail;
  detail << "40 random lattices, max rel err = " << worst;
  result.detail = detail.str();
  return result;
}

SuiteResult NetworkGradientSuite(std::ostream& out) {
  SuiteResult result{"network_gradient", true, ""};
  Rng rng(20260303);

  EncoderConfig enc_cfg;
  enc_cfg.num_layers = 2;
  enc_cfg.hidden_units = 6;
  enc_cfg.input_dim = 3;
  enc_cfg.time_reduction_after_layer = 1;
  enc_cfg.output_dim = 4;
  DecoderConfig dec_cfg;
  dec_cfg.embed_dim = 3;
  dec_cfg.num_layers = 1;
  dec_cfg.hidden_units = 5;
  dec_cfg.output_dim = 4;

  const ParamMap enc_params = InitEncoderParams(enc_cfg, 11);
  const ParamMap dec_params = InitDecoderParams(dec_cfg, 12);

  Tensor frames({5, 3});
  for (int64_t i = 0; i < frames.NumElements(); ++i) frames(i) = rng.Uniform(-1, 1);
  const std::vector<int32_t> tokens = {1, 0};

  auto loss_of = [&](const ParamMap& e, const ParamMap& d) {
    UtteranceForward fwd =
        ModelForward(enc_cfg, dec_cfg, e, d, frames, tokens, false, nullptr);
    return fwd.loss;
  };

  UtteranceForward fwd =
      ModelForward(enc_cfg, dec_cfg, enc_params, dec_params, frames, tokens, true, nullptr);
  Tensor grad_enc, grad_dec;
  JointBackward(fwd.lattice.logits, fwd.lattice.grad_logits, &grad_enc, &grad_dec);
  ParamMap enc_grads = ZerosLike(enc_params);
  ParamMap dec_grads = ZerosLike(dec_params);
  ModelBackward(enc_cfg, dec_cfg, enc_params, dec_params, fwd, grad_enc, grad_dec,
                &enc_grads, &dec_grads);

  const double h = 1e-4;
  double worst = 0.0;
  // Every fourth element keeps the suite under the time budget while still
  // covering all tensors.
  auto check_map = [&](const ParamMap& params, const ParamMap& grads, bool is_enc) {
    for (const auto& [name, tensor] : params) {
      for (int64_t i = 0; i < tensor.NumElements() && result.passed; i += 4) {
        ParamMap e = enc_params;
        ParamMap d = dec_params;
        ParamMap& target = is_enc ? e : d;
        target.at(name)(i) += h;
        const double plus = loss_of(e, d);
        target.at(name)(i) -= 2 * h;
        const double minus = loss_of(e, d);
        const double fd = (plus - minus) / (2 * h);
        const double err = GuardedRelError(grads.at(name)(i), fd);
        worst = std::max(worst, err);
        if (err >= 1e-4) {
          result.passed = false;
          out << "network_gradient mismatch in " << (is_enc ? "encoder " : "decoder ")
              << name << "[" << i << "]: analytic " << grads.at(name)(i) << " vs fd "
              << fd << '\n';
        }
      }
      if (!result.passed) break;
    }
  };
  check_map(enc_params, enc_grads, true);
  if (result.passed) check_map(dec_params, dec_grads, false);

  std::ostringstream detail;
  detail << "toy end-to-end model, max rel err = " << worst;
  result.detail = detail.str();
  return result;
}

SuiteResult DistillIdentitySuite(std::ostream& out) {
  SuiteResult result{"distill_identities", true, ""};
  Rng rng(20260404);

  Tensor student({4, 5}), teacher({4, 5});
  for (int64_t i = 0; i < student.NumElements(); ++i) {
    student(i) = rng.Uniform(-3, 3);
    teacher(i) = rng.Uniform(-3, 3);
  }
  const double full = EncoderDistillLoss(student, teacher, 4, nullptr);
  const double topk_all =
      TopKMaskedDistillLoss(student, teacher, 4, 5, TopKSource::kTeacher, nullptr);
  if (full != topk_all) {
    result.passed = false;
    out << "distill_identities: top-k(all) " << topk_all << " != full " << full << '\n';
  }
  if (EncoderDistillLoss(student, student, 4, nullptr) != 0.0) {
    result.passed = false;
    out << "distill_identities: identical tensors gave a nonzero loss\n";
  }

  // Teacher-encoder gradients must be bitwise independent of lambda.
  TaskSpec task;
  task.vocab_size = 5;
  task.feature_dim = 3;
  task.min_duration = 1;
  task.max_duration = 2;
  task.min_utterance_tokens = 1;
  task.max_utterance_tokens = 2;
  task.seed = 99;
  const Corpus corpus = GenerateCorpus(task, 3);
  const SequenceBatch batch = PackBatch(corpus, {0, 1, 2});

  EncoderConfig s_cfg{1, 4, 3, 0, 2, 6};
  EncoderConfig t_cfg{1, 6, 3, 0, 2, 6};
  DecoderConfig d_cfg{3, 1, 4, 6, 0.0};
  const ParamMap s_enc = InitEncoderParams(s_cfg, 21);
  const ParamMap t_enc = InitEncoderParams(t_cfg, 22);
  const ParamMap dec = InitDecoderParams(d_cfg, 23);

  DistillConfig cfg_a;
  cfg_a.lambda = 0.0;
  DistillConfig cfg_b;
  cfg_b.lambda = 7.5;
  const StepResult ra = ColearnStep(s_cfg, t_cfg, d_cfg, s_enc, t_enc, dec, batch, cfg_a,
                                    1, 1, 1);
  const StepResult rb = ColearnStep(s_cfg, t_cfg, d_cfg, s_enc, t_enc, dec, batch, cfg_b,
                                    1, 1, 1);
  for (const auto& [name, ga] : ra.grad_teacher_encoder) {
    const Tensor& gb = rb.grad_teacher_encoder.at(name);
    for (int64_t i = 0; i < ga.NumElements(); ++i) {
      if (ga(i) != gb(i)) {
        result.passed = false;
        out << "distill_identities: teacher gradient " << name << "[" << i
            << "] depends on lambda\n";
        break;
      }
    }
    if (!result.passed) break;
  }

  result.detail = "top-k identity, zero-loss identity, lambda stop-gradient";
  return result;
}

SuiteResult DecodeEquivalenceSuite(std::ostream& out) {
  SuiteResult result{"decode_equivalence", true, ""};
  Rng rng(20260505);
  for (int trial = 0; trial < 20 && result.passed; ++trial) {
    EncoderConfig enc_cfg{1, 4, 2, 0, 2, 4};
    DecoderConfig dec_cfg{2, 1, 3, 4, 0.0};
    const ParamMap enc = InitEncoderParams(enc_cfg, 1000 + static_cast<uint64_t>(trial));
    const ParamMap dec = InitDecoderParams(dec_cfg, 2000 + static_cast<uint64_t>(trial));
    Tensor frames({rng.NextInt(1, 4), 2});
    for (int64_t i = 0; i < frames.NumElements(); ++i) frames(i) = rng.Uniform(-2, 2);

    DecodeOptions greedy_opts;
    DecodeOptions beam_opts;
    beam_opts.beam = 1;
    const DecodeResult g = GreedyDecode(enc_cfg, dec_cfg, enc, dec, frames, greedy_opts);
    const DecodeResult b = BeamDecode(enc_cfg, dec_cfg, enc, dec, frames, beam_opts);
    if (g.tokens != b.tokens) {
      result.passed = false;
      out << "decode_equivalence: greedy and beam(1) disagree on trial " << trial << '\n';
    }
  }
  result.detail = "greedy == beam(1) on 20 random models";
  return result;
}

SuiteResult OptimizerScheduleSuite(std::ostream& out) {
  SuiteResult result{"optimizer_schedule", true, ""};
  LrSchedule lr;  // reference policy values
  if (LrAtStep(lr, 0) != 1e-7 || LrAtStep(lr, 3000) != 5e-4 ||
      LrAtStep(lr, 38000) != 5e-4 || std::abs(LrAtStep(lr, 75000) - 1e-5) > 1e-20 ||
      std::abs(LrAtStep(lr, 100000) - 1e-5) > 1e-20) {
    result.passed = false;
    out << "optimizer_schedule: boundary values are off\n";
  }

  // Scalar Adam against the hand recursion.
  ParamMap params;
  params["w"] = Tensor({1});
  params["w"](0) = 1.0;
  AdamState state;
  AdamOptions opts;
  opts.clip_norm = 0.0;  // no clipping here
  const double grads_seq[3] = {0.5, -0.25, 0.125};
  double m = 0.0, v = 0.0, w = 1.0;
  for (int t = 1; t <= 3; ++t) {
    ParamMap g;
    g["w"] = Tensor({1});
    g["w"](0) = grads_seq[t - 1];
    AdamStep(&params, g, &state, 0.1, opts);
    m = 0.9 * m + 0.1 * grads_seq[t - 1];
    v = 0.999 * v + 0.001 * grads_seq[t - 1] * grads_seq[t - 1];
    const double mh = m / (1.0 - std::pow(0.9, t));
    const double vh = v / (1.0 - std::pow(0.999, t));
    w -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
  }
  if (std::abs(params["w"](0) - w) > 1e-15) {
    result.passed = false;
    out << "optimizer_schedule: adam recursion mismatch " << params["w"](0) << " vs "
        << w << '\n';
  }
  result.detail = "reference schedule boundaries, scalar adam recursion";
  return result;
}

}  // namespace

std::vector<SuiteResult> SelfCheckSuites(std::ostream& out, const SelfCheckOptions& opts) {
  std::vector<SuiteResult> suites;
  suites.push_back(LatticeOracleSuite(out));
  suites.push_back(LatticeGradientSuite(out, opts.inject_gradient_sign_flip));
  suites.push_back(NetworkGradientSuite(out));
  suites.push_back(DistillIdentitySuite(out));
  suites.push_back(DecodeEquivalenceSuite(out));
  suites.push_back(OptimizerScheduleSuite(out));
  return suites;
}

bool RunSelfCheck(std::ostream& out, const SelfCheckOptions& opts) {
  bool all = true;
  for (const SuiteResult& suite : SelfCheckSuites(out, opts)) {
    out << suite.name << ": " << (suite.passed ? "PASS" : "FAIL");
    if (opts.verbose || !suite.passed) out << " (" << suite.detail << ")";
    out << '\n';
    all = all && suite.passed;
  }
  return all;
}

}  // namespace codert
