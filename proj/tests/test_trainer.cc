// tests/test_trainer.cc

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
#include <sstream>

#include "core/distill.h"
#include "core/lr-schedule.h"
#include "core/optimizer.h"
#include "doctest.h"
#include "json.hpp"

using namespace codert;

namespace {

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TaskSpec TinyTask(uint64_t seed = 5) {
  TaskSpec spec;
  spec.vocab_size = 5;
  spec.feature_dim = 3;
  spec.min_duration = 1;
  spec.max_duration = 2;
  spec.noise_sigma = 0.15;
  spec.min_utterance_tokens = 1;
  spec.max_utterance_tokens = 3;
  spec.seed = seed;
  return spec;
}

TrainConfig TinyConfig() {
  TrainConfig config;
  config.student_layers = 1;
  config.student_hidden = 4;
  config.student_time_reduction_after = 0;
  config.teacher_layers = 1;
  config.teacher_hidden = 6;
  config.teacher_time_reduction_after = 0;
  config.decoder_embed = 3;
  config.decoder_layers = 1;
  config.decoder_hidden = 4;
  config.batch_size = 4;
  config.max_steps = 6;
  config.eval_every = 3;
  config.eval_beam = 2;
  config.train_frac = 0.8;
  config.dev_frac = 0.2;
  config.test_frac = 0.0;
  return config;
}

}  // namespace

TEST_CASE("learning rate schedule hits the reference policy values exactly") {
  LrSchedule lr;  // defaults are the reference policy
  CHECK(LrAtStep(lr, 0) == 1e-7);
  CHECK(LrAtStep(lr, 3000) == 5e-4);
  CHECK(LrAtStep(lr, 38000) == 5e-4);
  CHECK(LrAtStep(lr, 75000) == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(LrAtStep(lr, 100000) == 1e-5);  // clamped
  CHECK_THROWS_AS(LrAtStep(lr, -1), std::invalid_argument);
}

TEST_CASE("learning rate schedule is continuous at stage boundaries") {
  LrSchedule lr;
  for (int64_t boundary : {lr.warmup_steps, lr.warmup_steps + lr.hold_steps,
                           lr.decay_end_step}) {
    const double before = LrAtStep(lr, boundary - 1);
    const double at = LrAtStep(lr, boundary);
    const double after = LrAtStep(lr, boundary + 1);
    // Relative jump across the boundary stays within the per-step slope.
    const double slope = std::max(std::abs(at - before), std::abs(after - at));
    CHECK(std::abs(at - before) <= slope + 1e-12 * at);
  }
  // Exact continuity of the piecewise definition at the joins.
  const int64_t hold_end = lr.warmup_steps + lr.hold_steps;
  CHECK(std::abs(LrAtStep(lr, lr.warmup_steps) - lr.peak) < 1e-12 * lr.peak);
  CHECK(std::abs(LrAtStep(lr, hold_end) - lr.peak) < 1e-12 * lr.peak);
  CHECK(std::abs(LrAtStep(lr, lr.decay_end_step) - lr.final_lr) <
        1e-12 * lr.final_lr);
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  ParamMap params;
  params["w"] = Tensor({3});
  for (int64_t i = 0; i < 3; ++i) params["w"](i) = 1.0 + static_cast<double>(i);
  ParamMap zeros = ZerosLike(params);
  AdamState state;
  AdamOptions opts;
  AdamStep(&params, zeros, &state, 0.5, opts);
  for (int64_t i = 0; i < 3; ++i) CHECK(params["w"](i) == 1.0 + static_cast<double>(i));
  CHECK(state.t == 1);
}

TEST_CASE("adam matches the hand recursion (frozen oracle values)") {
  ParamMap params;
  params["w"] = Tensor({1});
  params["w"](0) = 1.0;
  AdamState state;
  AdamOptions opts;
  opts.clip_norm = 0.0;
  const double grads[3] = {0.5, -0.25, 0.125};
  // Frozen from an extended-precision evaluation of the update recursion.
  const double expected[3] = {0.90000000199999996, 0.87336629870784616,
                              0.83932338491665397};
  for (int t = 0; t < 3; ++t) {
    ParamMap g;
    g["w"] = Tensor({1});
    g["w"](0) = grads[t];
    AdamStep(&params, g, &state, 0.1, opts);
    CHECK(params["w"](0) == doctest::Approx(expected[t]).epsilon(1e-14));
  }
}

TEST_CASE("global-norm clipping scales gradients") {
  ParamMap g;
  g["a"] = Tensor({2});
  g["a"](0) = 30.0;
  g["a"](1) = 40.0;  // norm 50
  std::vector<ParamMap*> maps = {&g};
  const double norm = ClipGradients(maps, 5.0);
  CHECK(norm == doctest::Approx(50.0));
  CHECK(g["a"](0) == doctest::Approx(3.0));  // scaled by 0.1
  CHECK(g["a"](1) == doctest::Approx(4.0));

  ParamMap nan_grads;
  nan_grads["a"] = Tensor({1});
  nan_grads["a"](0) = std::nan("");
  std::vector<ParamMap*> bad = {&nan_grads};
  CHECK_THROWS_WITH_AS(ClipGradients(bad, 5.0), "diverged", std::runtime_error);
}

TEST_CASE("max_steps = 0 leaves the checkpoint at initialization") {
  const Corpus corpus = GenerateCorpus(TinyTask(), 20);
  TrainConfig config = TinyConfig();
  config.max_steps = 0;
  const std::string out = "/tmp/codert_train_zero";
  std::filesystem::remove_all(out);
  const TrainResult result = Train(config, corpus, out);

  const LoadedModel model = LoadModel(result.last_path);
  CHECK(model.step == 0);
  TrainConfig resolved = config;
  resolved.input_dim = corpus.spec.feature_dim;
  resolved.vocab_size = corpus.spec.vocab_size;
  const ParamMap expected = InitEncoderParams(
      resolved.StudentEncoderConfig(), config.init_student_seed ^ Fnv1a64("enc"));
  for (const auto& [name, tensor] : expected) {
    const Tensor& got = model.student_encoder.at(name);
    for (int64_t i = 0; i < tensor.NumElements(); ++i)
      CHECK(got(i) == static_cast<double>(static_cast<float>(tensor(i))));
  }
}

TEST_CASE("training twice with the same seeds produces identical metrics logs") {
  const Corpus corpus = GenerateCorpus(TinyTask(), 24);
  TrainConfig config = TinyConfig();
  config.mode = "colearn";
  config.lambda = 0.5;
  const std::string out_a = "/tmp/codert_train_det_a";
  const std::string out_b = "/tmp/codert_train_det_b";
  std::filesystem::remove_all(out_a);
  std::filesystem::remove_all(out_b);
  Train(config, corpus, out_a);
  Train(config, corpus, out_b);
  CHECK(Slurp(out_a + "/metrics.jsonl") == Slurp(out_b + "/metrics.jsonl"));
  CHECK(Slurp(out_a + "/ckpt_last.cdrt") == Slurp(out_b + "/ckpt_last.cdrt"));
  CHECK(Slurp(out_a + "/config.json") == Slurp(out_b + "/config.json"));
}

TEST_CASE("metrics log is valid JSON lines with the contracted fields") {
  const Corpus corpus = GenerateCorpus(TinyTask(11), 20);
  TrainConfig config = TinyConfig();
  config.mode = "colearn";
  const std::string out = "/tmp/codert_train_metrics";
  std::filesystem::remove_all(out);
  const TrainResult result = Train(config, corpus, out);

  std::ifstream in(result.metrics_path);
  REQUIRE(in);
  std::string line;
  int64_t step_records = 0, eval_records = 0;
  while (std::getline(in, line)) {
    const nlohmann::json rec = nlohmann::json::parse(line);  // throws on bad JSON
    REQUIRE(rec.contains("step"));
    if (rec.contains("split")) {
      ++eval_records;
      for (const char* key : {"wer_student", "wer_teacher", "beam"})
        CHECK(rec.contains(key));
    } else {
      ++step_records;
      for (const char* key :
           {"lr", "loss_rnnt_s", "loss_rnnt_t", "loss_distill", "loss_total",
            "grad_norm_s", "grad_norm_t", "grad_norm_dec", "ts_encoder_mse"})
        CHECK(rec.contains(key));
    }
  }
  CHECK(step_records == config.max_steps);
  CHECK(eval_records >= 2);  // step 0 and the final step at least
}

TEST_CASE("batch loss is the mean over utterances") {
  const Corpus corpus = GenerateCorpus(TinyTask(13), 8);
  TrainConfig config = TinyConfig();
  config.input_dim = corpus.spec.feature_dim;
  config.vocab_size = corpus.spec.vocab_size;
  const EncoderConfig enc_cfg = config.StudentEncoderConfig();
  const DecoderConfig dec_cfg = config.DecoderConfigOf();
  const ParamMap enc = InitEncoderParams(enc_cfg, 31);
  const ParamMap dec = InitDecoderParams(dec_cfg, 32);

  const SequenceBatch pair = PackBatch(corpus, {0, 1});
  const SequenceBatch first = PackBatch(corpus, {0});
  const SequenceBatch second = PackBatch(corpus, {1});

  const double two = BaselineStep(enc_cfg, dec_cfg, enc, dec, pair, 1, 1, 1)
                         .loss.rnnt_student;
  const double one_a = BaselineStep(enc_cfg, dec_cfg, enc, dec, first, 1, 1, 1)
                           .loss.rnnt_student;
  const double one_b = BaselineStep(enc_cfg, dec_cfg, enc, dec, second, 1, 1, 1)
                           .loss.rnnt_student;
  CHECK(std::abs(two - 0.5 * (one_a + one_b)) < 1e-6);
}

TEST_CASE("static mode never mutates the teacher") {
  const Corpus corpus = GenerateCorpus(TinyTask(17), 24);

  // Pre-train a tiny teacher.
  TrainConfig teacher_cfg = TinyConfig();
  teacher_cfg.mode = "baseline";
  teacher_cfg.baseline_arch = "teacher";
  teacher_cfg.max_steps = 4;
  const std::string teacher_out = "/tmp/codert_train_teacher";
  std::filesystem::remove_all(teacher_out);
  const TrainResult teacher_run = Train(teacher_cfg, corpus, teacher_out);
  const std::string teacher_bytes_before = Slurp(teacher_run.last_path);

  TrainConfig config = TinyConfig();
  config.mode = "static";
  config.teacher_checkpoint = teacher_run.last_path;
  config.lambda = 1.0;
  const std::string out = "/tmp/codert_train_static";
  std::filesystem::remove_all(out);
  const TrainResult result = Train(config, corpus, out);

  // The teacher checkpoint file is untouched.
  CHECK(Slurp(teacher_run.last_path) == teacher_bytes_before);

  // And the teacher tensors inside the student run's checkpoint equal the
  // ones that were loaded.
  const LoadedModel teacher = LoadModel(teacher_run.last_path);
  const LoadedModel trained = LoadModel(result.last_path);
  REQUIRE(trained.HasTeacher());
  for (const auto& [name, tensor] : teacher.teacher_encoder) {
    const Tensor& kept = trained.teacher_encoder.at(name);
    for (int64_t i = 0; i < tensor.NumElements(); ++i) CHECK(kept(i) == tensor(i));
  }
  // Teacher eval path exists on the static checkpoint.
  EncoderConfig e;
  DecoderConfig d;
  const ParamMap* ep = nullptr;
  const ParamMap* dp = nullptr;
  trained.Select("teacher", &e, &d, &ep, &dp);
  CHECK(ep != nullptr);
}

TEST_CASE("divergence aborts with an error and keeps partial logs") {
  Corpus corpus = GenerateCorpus(TinyTask(19), 16);
  // A non-finite feature poisons the forward pass and therefore the
  // gradients; the optimizer must refuse the step.
  for (auto& utt : corpus.utterances) utt.features(0) = std::nan("");
  TrainConfig config = TinyConfig();
  config.train_frac = 1.0;  // no dev set; decoding NaNs is not the point here
  config.dev_frac = 0.0;
  config.test_frac = 0.0;
  const std::string out = "/tmp/codert_train_diverge";
  std::filesystem::remove_all(out);
  bool threw = false;
  try {
    Train(config, corpus, out);
  } catch (const std::runtime_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("diverged") != std::string::npos);
  }
  CHECK(threw);
  CHECK(std::filesystem::exists(out + "/metrics.jsonl"));
}

TEST_CASE("colearn checkpoints evaluate both encoders through the shared decoder") {
  const Corpus corpus = GenerateCorpus(TinyTask(23), 20);
  TrainConfig config = TinyConfig();
  config.mode = "colearn";
  const std::string out = "/tmp/codert_train_colearn_eval";
  std::filesystem::remove_all(out);
  const TrainResult result = Train(config, corpus, out);

  const LoadedModel model = LoadModel(result.best_path);
  REQUIRE(model.HasStudent());
  REQUIRE(model.HasTeacher());
  CHECK(model.teacher_decoder.empty());  // shared decoder only

  EncoderConfig enc_cfg;
  DecoderConfig dec_cfg;
  const ParamMap* enc = nullptr;
  const ParamMap* dec = nullptr;
  model.Select("teacher", &enc_cfg, &dec_cfg, &enc, &dec);
  CHECK(enc == &model.teacher_encoder);
  CHECK(dec == &model.decoder);  // the shared decoder

  Corpus train, dev, test;
  SplitForConfig(model.config, corpus, &train, &dev, &test);
  const double wer = EvaluateWer(enc_cfg, dec_cfg, *enc, *dec, dev, 2, 1);
  CHECK(wer >= 0.0);
}
