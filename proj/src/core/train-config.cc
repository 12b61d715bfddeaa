// core/train-config.cc

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

#include "core/train-config.h"

#include <stdexcept>

#include "json.hpp"

namespace codert {

void TrainConfig::Validate() const {
  if (mode != "baseline" && mode != "static" && mode != "colearn")
    throw std::invalid_argument("mode must be baseline, static or colearn");
  if (baseline_arch != "student" && baseline_arch != "teacher")
    throw std::invalid_argument("baseline_arch must be student or teacher");
  if (mode == "static" && teacher_checkpoint.empty())
    throw std::invalid_argument("static mode requires a teacher checkpoint");
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (topk_source != "teacher" && topk_source != "student")
    throw std::invalid_argument("topk_source must be teacher or student");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
  if (optimizer != "adam") throw std::invalid_argument("unknown optimizer");
  if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  if (eval_beam < 1) throw std::invalid_argument("eval_beam must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  lr.Validate();
}

std::string TrainConfig::ToJson() const {
  nlohmann::ordered_json j;
  j["mode"] = mode;
  j["baseline_arch"] = baseline_arch;
  j["data_dir"] = data_dir;
  j["teacher_checkpoint"] = teacher_checkpoint;
  j["student_layers"] = student_layers;
  j["student_hidden"] = student_hidden;
  j["student_time_reduction_after"] = student_time_reduction_after;
  j["teacher_layers"] = teacher_layers;
  j["teacher_hidden"] = teacher_hidden;
  j["teacher_time_reduction_after"] = teacher_time_reduction_after;
  j["decoder_embed"] = decoder_embed;
  j["decoder_layers"] = decoder_layers;
  j["decoder_hidden"] = decoder_hidden;
  j["decoder_dropout"] = decoder_dropout;
  j["lambda"] = lambda;
  j["top_k"] = top_k;
  j["topk_source"] = topk_source;
  j["lr_warmup_start"] = lr.warmup_start;
  j["lr_peak"] = lr.peak;
  j["lr_warmup_steps"] = lr.warmup_steps;
  j["lr_hold_steps"] = lr.hold_steps;
  j["lr_decay_end_step"] = lr.decay_end_step;
  j["lr_final"] = lr.final_lr;
  j["batch_size"] = batch_size;
  j["max_steps"] = max_steps;
  j["optimizer"] = optimizer;
  j["adam_beta1"] = adam_beta1;
  j["adam_beta2"] = adam_beta2;
  j["adam_eps"] = adam_eps;
  j["clip_norm"] = clip_norm;
  j["data_seed"] = data_seed;
  j["init_student_seed"] = init_student_seed;
  j["init_teacher_seed"] = init_teacher_seed;
  j["shuffle_seed"] = shuffle_seed;
  j["eval_every"] = eval_every;
  j["eval_beam"] = eval_beam;
  j["train_frac"] = train_frac;
  j["dev_frac"] = dev_frac;
  j["test_frac"] = test_frac;
  j["threads"] = threads;
  j["input_dim"] = input_dim;
  j["vocab_size"] = vocab_size;
  return j.dump(2) + "\n";
}

TrainConfig TrainConfig::FromJson(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  TrainConfig c;
  c.mode = j.value("mode", c.mode);
  c.baseline_arch = j.value("baseline_arch", c.baseline_arch);
  c.data_dir = j.value("data_dir", c.data_dir);
  c.teacher_checkpoint = j.value("teacher_checkpoint", c.teacher_checkpoint);
  c.student_layers = j.value("student_layers", c.student_layers);
  c.student_hidden = j.value("student_hidden", c.student_hidden);
  c.student_time_reduction_after =
      j.value("student_time_reduction_after", c.student_time_reduction_after);
  c.teacher_layers = j.value("teacher_layers", c.teacher_layers);
  c.teacher_hidden = j.value("teacher_hidden", c.teacher_hidden);
  c.teacher_time_reduction_after =
      j.value("teacher_time_reduction_after", c.teacher_time_reduction_after);
  c.decoder_embed = j.value("decoder_embed", c.decoder_embed);
  c.decoder_layers = j.value("decoder_layers", c.decoder_layers);
  c.decoder_hidden = j.value("decoder_hidden", c.decoder_hidden);
  c.decoder_dropout = j.value("decoder_dropout", c.decoder_dropout);
  c.lambda = j.value("lambda", c.lambda);
  c.top_k = j.value("top_k", c.top_k);
  c.topk_source = j.value("topk_source", c.topk_source);
  c.lr.warmup_start = j.value("lr_warmup_start", c.lr.warmup_start);
  c.lr.peak = j.value("lr_peak", c.lr.peak);
  c.lr.warmup_steps = j.value("lr_warmup_steps", c.lr.warmup_steps);
  c.lr.hold_steps = j.value("lr_hold_steps", c.lr.hold_steps);
  c.lr.decay_end_step = j.value("lr_decay_end_step", c.lr.decay_end_step);
  c.lr.final_lr = j.value("lr_final", c.lr.final_lr);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.optimizer = j.value("optimizer", c.optimizer);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  c.data_seed = j.value("data_seed", c.data_seed);
  c.init_student_seed = j.value("init_student_seed", c.init_student_seed);
  c.init_teacher_seed = j.value("init_teacher_seed", c.init_teacher_seed);
  c.shuffle_seed = j.value("shuffle_seed", c.shuffle_seed);
  c.eval_every = j.value("eval_every", c.eval_every);
  c.eval_beam = j.value("eval_beam", c.eval_beam);
  c.train_frac = j.value("train_frac", c.train_frac);
  c.dev_frac = j.value("dev_frac", c.dev_frac);
  c.test_frac = j.value("test_frac", c.test_frac);
  c.threads = j.value("threads", c.threads);
  c.input_dim = j.value("input_dim", c.input_dim);
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  return c;
}

EncoderConfig TrainConfig::StudentEncoderConfig() const {
  EncoderConfig cfg;
  cfg.num_layers = student_layers;
  cfg.hidden_units = student_hidden;
  cfg.input_dim = input_dim;
  cfg.time_reduction_after_layer = student_time_reduction_after;
  cfg.output_dim = vocab_size + 1;
  return cfg;
}

EncoderConfig TrainConfig::TeacherEncoderConfig() const {
  EncoderConfig cfg;
  cfg.num_layers = teacher_layers;
  cfg.hidden_units = teacher_hidden;
  cfg.input_dim = input_dim;
  cfg.time_reduction_after_layer = teacher_time_reduction_after;
  cfg.output_dim = vocab_size + 1;
  return cfg;
}

DecoderConfig TrainConfig::DecoderConfigOf() const {
  DecoderConfig cfg;
  cfg.embed_dim = decoder_embed;
  cfg.num_layers = decoder_layers;
  cfg.hidden_units = decoder_hidden;
  cfg.output_dim = vocab_size + 1;
  cfg.dropout = decoder_dropout;
  return cfg;
}

DistillConfig TrainConfig::DistillConfigOf() const {
  DistillConfig cfg;
  cfg.lambda = lambda;
  cfg.top_k = top_k;
  cfg.topk_source =
      topk_source == "student" ? TopKSource::kStudent : TopKSource::kTeacher;
  cfg.mode = mode == "static" ? DistillMode::kStaticTeacherSeparate
                              : DistillMode::kColearnSharedDecoder;
  return cfg;
}

LrSchedule DeskLrSchedule() {
  LrSchedule lr;
  lr.warmup_start = 1e-4;
  lr.peak = 2e-3;
  lr.warmup_steps = 100;
  lr.hold_steps = 900;
  lr.decay_end_step = 2200;
  lr.final_lr = 2e-4;
  return lr;
}

}  // namespace codert
