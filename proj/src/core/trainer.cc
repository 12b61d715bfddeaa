// core/trainer.cc

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

#include "core/trainer.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "core/decode.h"
#include "core/distill.h"
#include "core/edit-distance.h"
#include "core/threading.h"
#include "json.hpp"

namespace codert {

namespace {

constexpr const char* kStudentEncoder = "student_encoder";
constexpr const char* kTeacherEncoder = "teacher_encoder";
constexpr const char* kDecoder = "decoder";
constexpr const char* kTeacherDecoder = "teacher_decoder";

uint64_t SubSeed(uint64_t seed, const char* component) {
  return seed ^ Fnv1a64(component);
}

}  // namespace

void LoadedModel::Select(const std::string& which, EncoderConfig* enc_cfg,
                         DecoderConfig* dec_cfg, const ParamMap** enc,
                         const ParamMap** dec) const {
  *dec_cfg = config.DecoderConfigOf();
  if (which == "student") {
    if (!HasStudent())
      throw std::invalid_argument("checkpoint has no student encoder");
    *enc_cfg = config.StudentEncoderConfig();
    *enc = &student_encoder;
    *dec = &decoder;
  } else if (which == "teacher") {
    if (!HasTeacher())
      throw std::invalid_argument("checkpoint has no teacher encoder");
    *enc_cfg = config.TeacherEncoderConfig();
    *enc = &teacher_encoder;
    *dec = teacher_decoder.empty() ? &decoder : &teacher_decoder;
  } else {
    throw std::invalid_argument("which must be student or teacher");
  }
}

LoadedModel LoadModel(const std::string& checkpoint_path) {
  const Checkpoint ckpt = LoadCheckpoint(checkpoint_path);
  LoadedModel model;
  model.config = TrainConfig::FromJson(ckpt.config_json);
  model.step = ckpt.step;
  model.student_encoder = ExtractTensors(ckpt, kStudentEncoder);
  model.teacher_encoder = ExtractTensors(ckpt, kTeacherEncoder);
  model.decoder = ExtractTensors(ckpt, kDecoder);
  model.teacher_decoder = ExtractTensors(ckpt, kTeacherDecoder);
  return model;
}

double EvaluateWer(const EncoderConfig& enc_cfg, const DecoderConfig& dec_cfg,
                   const ParamMap& enc_params, const ParamMap& dec_params,
                   const Corpus& data, int32_t beam, int32_t threads,
                   std::vector<std::vector<int32_t>>* hyps_out) {
  const int64_t n = static_cast<int64_t>(data.utterances.size());
  std::vector<std::vector<int32_t>> refs(static_cast<size_t>(n));
  std::vector<std::vector<int32_t>> hyps(static_cast<size_t>(n));
  DecodeOptions opts;
  opts.beam = beam;
  ParallelFor(n, threads, [&](int64_t i) {
    const Utterance& utt = data.utterances[static_cast<size_t>(i)];
    refs[static_cast<size_t>(i)] = utt.tokens;
    hyps[static_cast<size_t>(i)] =
        BeamDecode(enc_cfg, dec_cfg, enc_params, dec_params, utt.features, opts).tokens;
  });
  if (hyps_out) *hyps_out = hyps;
  return Wer(refs, hyps);
}

void SplitForConfig(const TrainConfig& config, const Corpus& corpus, Corpus* train,
                    Corpus* dev, Corpus* test) {
  SplitCorpus(corpus, config.train_frac, config.dev_frac, config.test_frac, train, dev,
              test);
}

namespace {

// One trainable parameter set with its optimizer state.
struct TrainableSet {
  const char* prefix;
  ParamMap* params;
  AdamState state;
};

struct Run {
  TrainConfig config;  // resolved
  EncoderConfig student_cfg, teacher_cfg;
  DecoderConfig dec_cfg;
  DistillConfig distill_cfg;

  ParamMap student_enc, teacher_enc, dec, teacher_dec;
  bool train_teacher = false;      // colearn
  bool teacher_loaded = false;     // static
  std::string primary;             // "student" or "teacher" (baseline arch)

  Checkpoint Snapshot(uint64_t step, const std::vector<TrainableSet>& sets) const {
    Checkpoint ckpt;
    ckpt.step = step;
    ckpt.config_json = config.ToJson();
    const std::string mode = config.mode;
    if (mode == "baseline") {
      AddTensors(&ckpt, primary == "teacher" ? kTeacherEncoder : kStudentEncoder,
                 primary == "teacher" ? teacher_enc : student_enc);
      AddTensors(&ckpt, kDecoder, dec);
    } else if (mode == "colearn") {
      AddTensors(&ckpt, kStudentEncoder, student_enc);
      AddTensors(&ckpt, kTeacherEncoder, teacher_enc);
      AddTensors(&ckpt, kDecoder, dec);
    } else {  // static
      AddTensors(&ckpt, kStudentEncoder, student_enc);
      AddTensors(&ckpt, kDecoder, dec);
      AddTensors(&ckpt, kTeacherEncoder, teacher_enc);
      AddTensors(&ckpt, kTeacherDecoder, teacher_dec);
    }
    for (const TrainableSet& set : sets) {
      if (set.state.m.empty()) continue;
      AddTensors(&ckpt, std::string("opt_m.") + set.prefix, set.state.m);
      AddTensors(&ckpt, std::string("opt_v.") + set.prefix, set.state.v);
    }
    return ckpt;
  }
};

double MapNorm(const ParamMap& grads) { return std::sqrt(GlobalSumSquares(grads)); }

}  // namespace

TrainResult Train(const TrainConfig& config_in, const Corpus& corpus,
                  const std::string& out_dir, const MetricsCallback& callback) {
  Run run;
  run.config = config_in;
  run.config.input_dim = corpus.spec.feature_dim;
  run.config.vocab_size = corpus.spec.vocab_size;
  run.config.Validate();
  const TrainConfig& config = run.config;

  run.student_cfg = config.StudentEncoderConfig();
  run.teacher_cfg = config.TeacherEncoderConfig();
  run.dec_cfg = config.DecoderConfigOf();
  run.distill_cfg = config.DistillConfigOf();

  Corpus train_set, dev_set, test_set;
  SplitForConfig(config, corpus, &train_set, &dev_set, &test_set);
  if (train_set.utterances.empty())
    throw std::invalid_argument("training split is empty");

  // Parameter sets by mode.
  std::vector<TrainableSet> trainables;
  if (config.mode == "baseline") {
    run.primary = config.baseline_arch;
    if (run.primary == "teacher") {
      run.teacher_enc =
          InitEncoderParams(run.teacher_cfg, SubSeed(config.init_teacher_seed, "enc"));
      run.dec = InitDecoderParams(run.dec_cfg, SubSeed(config.init_teacher_seed, "dec"));
      trainables.push_back({kTeacherEncoder, &run.teacher_enc, {}});
    } else {
      run.student_enc =
          InitEncoderParams(run.student_cfg, SubSeed(config.init_student_seed, "enc"));
      run.dec = InitDecoderParams(run.dec_cfg, SubSeed(config.init_student_seed, "dec"));
      trainables.push_back({kStudentEncoder, &run.student_enc, {}});
    }
    trainables.push_back({kDecoder, &run.dec, {}});
  } else if (config.mode == "colearn") {
    run.primary = "student";
    run.train_teacher = true;
    run.student_enc =
        InitEncoderParams(run.student_cfg, SubSeed(config.init_student_seed, "enc"));
    run.teacher_enc =
        InitEncoderParams(run.teacher_cfg, SubSeed(config.init_teacher_seed, "enc"));
    run.dec = InitDecoderParams(run.dec_cfg, SubSeed(config.init_student_seed, "dec"));
    if (run.student_cfg.ReducedLength(100) != run.teacher_cfg.ReducedLength(100))
      throw std::invalid_argument("co-learning requires equal encoder frame rates");
    trainables.push_back({kStudentEncoder, &run.student_enc, {}});
    trainables.push_back({kTeacherEncoder, &run.teacher_enc, {}});
    trainables.push_back({kDecoder, &run.dec, {}});
  } else {  // static
    run.primary = "student";
    run.teacher_loaded = true;
    LoadedModel teacher = LoadModel(config.teacher_checkpoint);
    if (!teacher.HasTeacher())
      throw std::invalid_argument("teacher checkpoint has no teacher encoder");
    run.teacher_cfg = teacher.config.TeacherEncoderConfig();
    run.teacher_enc = teacher.teacher_encoder;
    run.teacher_dec =
        teacher.teacher_decoder.empty() ? teacher.decoder : teacher.teacher_decoder;
    if (run.teacher_cfg.output_dim != run.student_cfg.output_dim ||
        run.teacher_cfg.input_dim != run.student_cfg.input_dim)
      throw std::invalid_argument("teacher checkpoint does not match the task");
    if (run.student_cfg.ReducedLength(100) != run.teacher_cfg.ReducedLength(100))
      throw std::invalid_argument("teacher/student frame rates differ");
    run.student_enc =
        InitEncoderParams(run.student_cfg, SubSeed(config.init_student_seed, "enc"));
    run.dec = InitDecoderParams(run.dec_cfg, SubSeed(config.init_student_seed, "dec"));
    trainables.push_back({kStudentEncoder, &run.student_enc, {}});
    trainables.push_back({kDecoder, &run.dec, {}});
  }

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream cfg_out(out_dir + "/config.json", std::ios::binary);
    cfg_out << config.ToJson();
  }

  TrainResult result;
  result.best_path = out_dir + "/ckpt_best.cdrt";
  result.last_path = out_dir + "/ckpt_last.cdrt";
  result.metrics_path = out_dir + "/metrics.jsonl";

  std::ofstream metrics(result.metrics_path, std::ios::binary | std::ios::trunc);
  if (!metrics) throw std::runtime_error("cannot write " + result.metrics_path);
  auto emit = [&](const nlohmann::ordered_json& rec) {
    const std::string line = rec.dump();
    metrics << line << '\n';
    metrics.flush();
    if (callback) callback(line);
  };

  const AdamOptions adam{config.adam_beta1, config.adam_beta2, config.adam_eps,
                         config.clip_norm};

  double best_wer = std::numeric_limits<double>::infinity();
  bool saved_best = false;

  auto eval_and_log = [&](int64_t step) {
    if (dev_set.utterances.empty()) return;
    nlohmann::ordered_json rec;
    rec["step"] = step;
    rec["split"] = "dev";
    double primary_wer = -1.0;
    double wer_student = -1.0, wer_teacher = -1.0;
    bool has_student = false, has_teacher = false;
    if (!run.student_enc.empty()) {
      wer_student = EvaluateWer(run.student_cfg, run.dec_cfg, run.student_enc, run.dec,
                                dev_set, config.eval_beam, config.threads);
      has_student = true;
    }
    if (!run.teacher_enc.empty()) {
      const ParamMap& tdec = run.teacher_dec.empty() ? run.dec : run.teacher_dec;
      wer_teacher = EvaluateWer(run.teacher_cfg, run.dec_cfg, run.teacher_enc, tdec,
                                dev_set, config.eval_beam, config.threads);
      has_teacher = true;
    }
    rec["wer_student"] = has_student ? nlohmann::ordered_json(wer_student)
                                     : nlohmann::ordered_json(nullptr);
    rec["wer_teacher"] = has_teacher ? nlohmann::ordered_json(wer_teacher)
                                     : nlohmann::ordered_json(nullptr);
    rec["beam"] = config.eval_beam;
    emit(rec);

    primary_wer = run.primary == "teacher" ? wer_teacher : wer_student;
    result.final_dev_wer = primary_wer;
    if (primary_wer >= 0.0 && primary_wer < best_wer) {
      best_wer = primary_wer;
      result.best_dev_wer = primary_wer;
      result.best_step = step;
      SaveCheckpoint(result.best_path,
                     run.Snapshot(static_cast<uint64_t>(step), trainables));
      saved_best = true;
    }
  };

  eval_and_log(0);

  int64_t epoch = 0;
  std::vector<SequenceBatch> batches =
      MakeBatches(train_set, config.batch_size, config.shuffle_seed + static_cast<uint64_t>(epoch));
  size_t batch_index = 0;

  for (int64_t step = 1; step <= config.max_steps; ++step) {
    if (batch_index == batches.size()) {
      ++epoch;
      batches = MakeBatches(train_set, config.batch_size,
                            config.shuffle_seed + static_cast<uint64_t>(epoch));
      batch_index = 0;
    }
    const SequenceBatch& batch = batches[batch_index++];
    const double lr = LrAtStep(config.lr, step - 1);

    StepResult sr;
    if (config.mode == "colearn") {
      sr = ColearnStep(run.student_cfg, run.teacher_cfg, run.dec_cfg, run.student_enc,
                       run.teacher_enc, run.dec, batch, run.distill_cfg,
                       config.shuffle_seed, step, config.threads);
    } else if (config.mode == "static") {
      sr = StaticTeacherStep(run.student_cfg, run.dec_cfg, run.student_enc, run.dec,
                             run.teacher_cfg, run.teacher_enc, batch, run.distill_cfg,
                             config.shuffle_seed, step, config.threads);
    } else if (run.primary == "teacher") {
      sr = BaselineStep(run.teacher_cfg, run.dec_cfg, run.teacher_enc, run.dec, batch,
                        config.shuffle_seed, step, config.threads);
      // BaselineStep reports its encoder gradients in the student slot.
      sr.grad_teacher_encoder = std::move(sr.grad_student_encoder);
      sr.grad_student_encoder.clear();
    } else {
      sr = BaselineStep(run.student_cfg, run.dec_cfg, run.student_enc, run.dec, batch,
                        config.shuffle_seed, step, config.threads);
    }

    const double norm_s = MapNorm(sr.grad_student_encoder);
    const double norm_t = MapNorm(sr.grad_teacher_encoder);
    const double norm_dec = MapNorm(sr.grad_decoder);

    std::vector<ParamMap*> grad_maps;
    if (!sr.grad_student_encoder.empty()) grad_maps.push_back(&sr.grad_student_encoder);
    if (!sr.grad_teacher_encoder.empty() && run.train_teacher)
      grad_maps.push_back(&sr.grad_teacher_encoder);
    if (config.mode == "baseline" && run.primary == "teacher")
      grad_maps.push_back(&sr.grad_teacher_encoder);
    if (!sr.grad_decoder.empty()) grad_maps.push_back(&sr.grad_decoder);
    ClipGradients(grad_maps, config.clip_norm);  // throws on divergence

    for (TrainableSet& set : trainables) {
      const ParamMap* grads = nullptr;
      if (set.prefix == std::string(kStudentEncoder)) grads = &sr.grad_student_encoder;
      else if (set.prefix == std::string(kTeacherEncoder)) grads = &sr.grad_teacher_encoder;
      else grads = &sr.grad_decoder;
      AdamStep(set.params, *grads, &set.state, lr, adam);
    }

    nlohmann::ordered_json rec;
    rec["step"] = step;
    rec["lr"] = lr;
    rec["loss_rnnt_s"] = sr.loss.rnnt_student;
    rec["loss_rnnt_t"] = sr.loss.rnnt_teacher;
    rec["loss_distill"] = sr.loss.distill;
    rec["loss_total"] = sr.loss.total;
    rec["grad_norm_s"] = norm_s;
    rec["grad_norm_t"] = norm_t;
    rec["grad_norm_dec"] = norm_dec;
    rec["ts_encoder_mse"] = sr.ts_encoder_mse;
    emit(rec);

    if (step % config.eval_every == 0 || step == config.max_steps) eval_and_log(step);
  }

  SaveCheckpoint(result.last_path,
                 run.Snapshot(static_cast<uint64_t>(config.max_steps), trainables));
  if (!saved_best) {
    SaveCheckpoint(result.best_path,
                   run.Snapshot(static_cast<uint64_t>(config.max_steps), trainables));
  }
  return result;
}

}  // namespace codert
