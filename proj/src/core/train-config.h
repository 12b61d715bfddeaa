// core/train-config.h

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

#ifndef CODERT_CORE_TRAIN_CONFIG_H_
#define CODERT_CORE_TRAIN_CONFIG_H_

#include <cstdint>
#include <string>

#include "core/distill.h"
#include "core/lr-schedule.h"
#include "core/network.h"
#include "core/optimizer.h"

namespace codert {

// Every training knob in one flat, JSON-serializable record. Flags on the
// command line override individual keys; the fully resolved config is
// echoed into the run directory and embedded in checkpoints.
struct TrainConfig {
  // "baseline" (single model), "static" (frozen pre-trained teacher),
  // or "colearn" (shared decoder, tandem teacher + student).
  std::string mode = "baseline";
  // Which architecture a baseline run trains.
  std::string baseline_arch = "student";

  std::string data_dir;
  std::string teacher_checkpoint;  // required in static mode

  int32_t student_layers = 2;
  int32_t student_hidden = 32;
  int32_t student_time_reduction_after = 1;
  int32_t teacher_layers = 3;
  int32_t teacher_hidden = 64;
  int32_t teacher_time_reduction_after = 2;
  int32_t decoder_embed = 16;
  int32_t decoder_layers = 1;
  int32_t decoder_hidden = 48;
  double decoder_dropout = 0.0;

  double lambda = 1.0;
  int32_t top_k = 0;  // 0 = all V+1 logits
  std::string topk_source = "teacher";

  LrSchedule lr{1e-4, 2e-3, 100, 900, 2200, 2e-4};  // desk-scale schedule
  int64_t batch_size = 8;
  int64_t max_steps = 2000;

  std::string optimizer = "adam";
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double clip_norm = 5.0;

  uint64_t data_seed = 1;
  uint64_t init_student_seed = 2;
  uint64_t init_teacher_seed = 3;
  uint64_t shuffle_seed = 4;

  int64_t eval_every = 250;
  int32_t eval_beam = 6;
  double train_frac = 0.9;
  double dev_frac = 0.05;
  double test_frac = 0.05;

  int32_t threads = 1;

  // Resolved from the corpus when training starts; persisted so that
  // checkpoints are self-describing.
  int32_t input_dim = 0;
  int32_t vocab_size = 0;  // tokens only; logit dimension is vocab_size + 1

  void Validate() const;
  std::string ToJson() const;
  static TrainConfig FromJson(const std::string& json_text);

  EncoderConfig StudentEncoderConfig() const;
  EncoderConfig TeacherEncoderConfig() const;
  DecoderConfig DecoderConfigOf() const;
  DistillConfig DistillConfigOf() const;
};

// Desk-scale learning-rate defaults (fast warmup, short decay) used by the
// CLI when a config file does not override them.
LrSchedule DeskLrSchedule();

}  // namespace codert

#endif  // CODERT_CORE_TRAIN_CONFIG_H_
