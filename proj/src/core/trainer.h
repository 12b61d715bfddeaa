// core/trainer.h

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

#ifndef CODERT_CORE_TRAINER_H_
#define CODERT_CORE_TRAINER_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/checkpoint.h"
#include "core/data-synth.h"
#include "core/train-config.h"

namespace codert {

// A checkpoint unpacked into parameter sets. Which sets exist depends on
// the training mode: baseline runs carry one encoder and its decoder,
// colearn runs carry both encoders and the shared decoder, static runs
// additionally carry the frozen teacher's own decoder.
struct LoadedModel {
  TrainConfig config;
  uint64_t step = 0;
  ParamMap student_encoder;
  ParamMap teacher_encoder;
  ParamMap decoder;          // shared decoder, or the primary model's own
  ParamMap teacher_decoder;  // static mode only

  bool HasStudent() const { return !student_encoder.empty(); }
  bool HasTeacher() const { return !teacher_encoder.empty(); }

  // Encoder/decoder parameter sets and configs for "student" or "teacher".
  void Select(const std::string& which, EncoderConfig* enc_cfg, DecoderConfig* dec_cfg,
              const ParamMap** enc, const ParamMap** dec) const;
};

LoadedModel LoadModel(const std::string& checkpoint_path);

struct TrainResult {
  std::string best_path;
  std::string last_path;
  std::string metrics_path;
  double best_dev_wer = -1.0;  // -1 when no eval ran
  int64_t best_step = -1;
  double final_dev_wer = -1.0;
};

// Per-line sink for metrics records (already newline-free JSON).
using MetricsCallback = std::function<void(const std::string&)>;

// Runs the configured mode end to end: splits the corpus, initializes (or
// loads, for the static teacher) parameters, optimizes, logs JSON-lines
// metrics, and writes ckpt_best.cdrt / ckpt_last.cdrt plus the resolved
// config into out_dir.
TrainResult Train(const TrainConfig& config, const Corpus& corpus,
                  const std::string& out_dir, const MetricsCallback& callback = nullptr);

// Beam-decodes every utterance and scores token error rate against the
// references. Pass hyps_out to collect hypotheses.
double EvaluateWer(const EncoderConfig& enc_cfg, const DecoderConfig& dec_cfg,
                   const ParamMap& enc_params, const ParamMap& dec_params,
                   const Corpus& data, int32_t beam, int32_t threads,
                   std::vector<std::vector<int32_t>>* hyps_out = nullptr);

// The dev/test partition a trained model saw, reconstructed from its config.
void SplitForConfig(const TrainConfig& config, const Corpus& corpus, Corpus* train,
                    Corpus* dev, Corpus* test);

}  // namespace codert

#endif  // CODERT_CORE_TRAINER_H_
