// core/diagnostics.h

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

#ifndef CODERT_CORE_DIAGNOSTICS_H_
#define CODERT_CORE_DIAGNOSTICS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "core/data-synth.h"
#include "core/network.h"

namespace codert {

struct Histogram {
  std::vector<double> bin_edges;  // counts.size() + 1 edges
  std::vector<int64_t> counts;
  int64_t total = 0;
  double mean = 0.0;

  void Add(double value);
};

Histogram MakeHistogram(int32_t bins, double lo, double hi);

// Softmax-entropy densities (in nats) of the three network stages over one
// batch: every valid encoder frame, every decoder step, every (t, u) joint
// slice. 64 uniform bins over [0, ln(V+1)].
struct EntropyReport {
  Histogram encoder;
  Histogram decoder;
  Histogram joint;
};

EntropyReport EntropyHistograms(const EncoderConfig& enc_cfg,
                                const DecoderConfig& dec_cfg, const ParamMap& enc_params,
                                const ParamMap& dec_params, const SequenceBatch& batch);

void WriteHistogramCsv(const Histogram& hist, const std::string& path);

// For each reference token: the top_n vocabulary entries of the averaged
// encoder softmax over the frames attributed to that token. Frames are
// attributed via the greedy (locally best) forced path through the lattice:
// each consumed frame belongs to the next reference label not yet emitted.
struct ConfusionRow {
  int32_t ref_token;
  int32_t rank;    // 1-based
  int32_t token;
  double mass;     // softmax mass fraction in [0, 1]
};

std::vector<ConfusionRow> ConfusionTable(const EncoderConfig& enc_cfg,
                                         const DecoderConfig& dec_cfg,
                                         const ParamMap& enc_params,
                                         const ParamMap& dec_params,
                                         const SequenceBatch& batch, int32_t top_n);

void WriteConfusionTsv(const std::vector<ConfusionRow>& rows, const std::string& path);

// Teacher/student encoder-logit error series, one per metrics log, plus the
// mean over the trailing window of steps.
struct TsErrorCurve {
  std::vector<std::string> run_names;
  std::vector<std::vector<std::pair<int64_t, double>>> series;  // (step, mse)
  std::vector<double> final_window_mean;
  int64_t window = 1000;
};

TsErrorCurve LoadTsErrorCurve(const std::vector<std::string>& metrics_paths,
                              const std::vector<std::string>& run_names, int64_t window);

void WriteTsCurveCsv(const TsErrorCurve& curve, const std::string& path);

// Post-hoc analogue for separate-decoder runs: mean squared difference of
// two encoders' logits over a corpus (checkpointed models evaluated on the
// same batches).
double PairEncoderMse(const EncoderConfig& cfg_a, const ParamMap& enc_a,
                      const EncoderConfig& cfg_b, const ParamMap& enc_b,
                      const Corpus& data, int32_t threads);

// Companion gnuplot scripts for the CSV outputs.
void WriteEntropyGnuplot(const std::string& dir);
void WriteTsCurveGnuplot(const std::string& csv_path, const std::string& script_path,
                         int64_t num_runs);

}  // namespace codert

#endif  // CODERT_CORE_DIAGNOSTICS_H_
