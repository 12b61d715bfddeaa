// core/diagnostics.cc

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

#include "core/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "core/distill.h"
#include "core/numerics.h"
#include "core/threading.h"
#include "core/transducer-lattice.h"
#include "json.hpp"

namespace codert {

Histogram MakeHistogram(int32_t bins, double lo, double hi) {
  Histogram h;
  h.counts.assign(static_cast<size_t>(bins), 0);
  h.bin_edges.resize(static_cast<size_t>(bins) + 1);
  for (int32_t i = 0; i <= bins; ++i)
    h.bin_edges[static_cast<size_t>(i)] =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  return h;
}

void Histogram::Add(double value) {
  const double lo = bin_edges.front();
  const double hi = bin_edges.back();
  const int64_t bins = static_cast<int64_t>(counts.size());
  int64_t bin = static_cast<int64_t>(
      std::floor((value - lo) / (hi - lo) * static_cast<double>(bins)));
  bin = std::clamp<int64_t>(bin, 0, bins - 1);  // hi lands in the last bin
  counts[static_cast<size_t>(bin)] += 1;
  mean = (mean * static_cast<double>(total) + value) / static_cast<double>(total + 1);
  total += 1;
}

EntropyReport EntropyHistograms(const EncoderConfig& enc_cfg,
                                const DecoderConfig& dec_cfg, const ParamMap& enc_params,
                                const ParamMap& dec_params, const SequenceBatch& batch) {
  const double h_max = std::log(static_cast<double>(enc_cfg.output_dim));
  EntropyReport report{MakeHistogram(64, 0.0, h_max), MakeHistogram(64, 0.0, h_max),
                       MakeHistogram(64, 0.0, h_max)};

  for (int64_t i = 0; i < batch.BatchSize(); ++i) {
    const Tensor frames = batch.UtteranceFeatures(i);
    const std::vector<int32_t>& tokens = batch.labels[static_cast<size_t>(i)];
    const Tensor enc = EncoderForward(enc_cfg, enc_params, frames, nullptr);
    const Tensor dec = DecoderForward(dec_cfg, dec_params, tokens, nullptr, nullptr);
    const Tensor joint = JointForward(enc, dec);

    for (int64_t t = 0; t < enc.Dim(0); ++t)
      report.encoder.Add(Entropy(Softmax(enc.Row(t))));
    for (int64_t u = 0; u < dec.Dim(0); ++u)
      report.decoder.Add(Entropy(Softmax(dec.Row(u))));
    for (int64_t t = 0; t < joint.Dim(0); ++t) {
      for (int64_t u = 0; u < joint.Dim(1); ++u)
        report.joint.Add(Entropy(Softmax(joint.Row(t, u))));
    }
  }
  return report;
}

void WriteHistogramCsv(const Histogram& hist, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# entropy unit: nats; mean " << hist.mean << "; total " << hist.total << "\n";
  out << "bin_left,bin_right,count\n";
  for (size_t i = 0; i < hist.counts.size(); ++i) {
    out << hist.bin_edges[i] << ',' << hist.bin_edges[i + 1] << ',' << hist.counts[i]
        << '\n';
  }
}

std::vector<ConfusionRow> ConfusionTable(const EncoderConfig& enc_cfg,
                                         const DecoderConfig& dec_cfg,
                                         const ParamMap& enc_params,
                                         const ParamMap& dec_params,
                                         const SequenceBatch& batch, int32_t top_n) {
  const int32_t vocab = enc_cfg.output_dim;
  if (top_n < 1 || top_n > vocab)
    throw std::invalid_argument("confusion table: top_n out of range");

  // Mean encoder softmax per reference token over attributed frames.
  std::map<int32_t, std::vector<double>> mass;
  std::map<int32_t, int64_t> frames_seen;

  for (int64_t i = 0; i < batch.BatchSize(); ++i) {
    const std::vector<int32_t>& tokens = batch.labels[static_cast<size_t>(i)];
    if (tokens.empty()) continue;
    const Tensor frames = batch.UtteranceFeatures(i);
    const Tensor enc = EncoderForward(enc_cfg, enc_params, frames, nullptr);
    const Tensor dec = DecoderForward(dec_cfg, dec_params, tokens, nullptr, nullptr);

    JointLattice lattice = JointLattice::FromLogits(JointForward(enc, dec));
    ComputeLogProbs(&lattice);
    LabelSequence labels{tokens, vocab - 1};

    const int64_t t_len = lattice.NumFrames();
    const int64_t u_max = labels.NumTokens();
    const Tensor& lp = lattice.log_probs;

    // Greedy forced path: at each node take the locally more probable of
    // {emit next label, consume frame}. Each consumed frame is attributed
    // to the next label not yet emitted.
    int64_t t = 0, u = 0;
    while (t < t_len) {
      const bool can_emit = u < u_max;
      bool take_emit = false;
      if (can_emit) {
        // On the final frame the remaining labels are forced out.
        const double lp_emit = lp(t, u, labels.tokens[static_cast<size_t>(u)]);
        const double lp_blank = lp(t, u, labels.blank_index);
        take_emit = t == t_len - 1 ? true : lp_emit >= lp_blank;
      }
      if (take_emit) {
        ++u;
        continue;
      }
      // Consume frame t; it belongs to the upcoming label (or the last one
      // once everything is emitted).
      const int32_t attributed =
          labels.tokens[static_cast<size_t>(std::min(u, u_max - 1))];
      auto [it, inserted] =
          mass.try_emplace(attributed, std::vector<double>(static_cast<size_t>(vocab), 0.0));
      const std::vector<double> probs = Softmax(enc.Row(t));
      for (int32_t v = 0; v < vocab; ++v) it->second[static_cast<size_t>(v)] += probs[static_cast<size_t>(v)];
      frames_seen[attributed] += 1;
      ++t;
    }
  }

  std::vector<ConfusionRow> rows;
  for (auto& [ref_token, sums] : mass) {
    const double inv = 1.0 / static_cast<double>(frames_seen[ref_token]);
    for (auto& s : sums) s *= inv;
    const std::vector<int32_t> top = TopKIndices(sums, top_n);
    for (int32_t r = 0; r < top_n; ++r) {
      rows.push_back({ref_token, r + 1, top[static_cast<size_t>(r)],
                      sums[static_cast<size_t>(top[static_cast<size_t>(r)])]});
    }
  }
  return rows;
}

void WriteConfusionTsv(const std::vector<ConfusionRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "ref_token\trank\ttoken\tmass\n";
  for (const auto& row : rows)
    out << row.ref_token << '\t' << row.rank << '\t' << row.token << '\t' << row.mass
        << '\n';
}

TsErrorCurve LoadTsErrorCurve(const std::vector<std::string>& metrics_paths,
                              const std::vector<std::string>& run_names, int64_t window) {
  if (metrics_paths.size() != run_names.size())
    throw std::invalid_argument("ts curve: path/name counts differ");
  TsErrorCurve curve;
  curve.window = window;
  curve.run_names = run_names;
  for (size_t r = 0; r < metrics_paths.size(); ++r) {
    std::ifstream in(metrics_paths[r], std::ios::binary);
    if (!in)
      throw std::runtime_error("ts curve: cannot read log for run " + run_names[r]);
    std::vector<std::pair<int64_t, double>> series;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const nlohmann::json rec = nlohmann::json::parse(line);
      if (!rec.contains("step") || rec.contains("split")) continue;  // eval record
      if (!rec.contains("ts_encoder_mse"))
        throw std::runtime_error("ts curve: run " + run_names[r] +
                                 " has no ts_encoder_mse field");
      series.emplace_back(rec["step"].get<int64_t>(),
                          rec["ts_encoder_mse"].get<double>());
    }
    if (series.empty())
      throw std::runtime_error("ts curve: run " + run_names[r] + " has no step records");
    const int64_t last_step = series.back().first;
    double sum = 0.0;
    int64_t n = 0;
    for (const auto& [step, value] : series) {
      if (step > last_step - window) {
        sum += value;
        ++n;
      }
    }
    curve.series.push_back(std::move(series));
    curve.final_window_mean.push_back(sum / static_cast<double>(n));
  }
  return curve;
}

void WriteTsCurveCsv(const TsErrorCurve& curve, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (size_t r = 0; r < curve.run_names.size(); ++r) {
    out << "# final_window_mean(" << curve.window << ") " << curve.run_names[r] << " "
        << curve.final_window_mean[r] << "\n";
  }
  out << "step";
  for (const auto& name : curve.run_names) out << ',' << name;
  out << '\n';

  std::set<int64_t> steps;
  for (const auto& series : curve.series) {
    for (const auto& [step, value] : series) steps.insert(step);
  }
  std::vector<std::map<int64_t, double>> by_step(curve.series.size());
  for (size_t r = 0; r < curve.series.size(); ++r) {
    for (const auto& [step, value] : curve.series[r]) by_step[r][step] = value;
  }
  for (int64_t step : steps) {
    out << step;
    for (const auto& m : by_step) {
      out << ',';
      const auto it = m.find(step);
      if (it != m.end()) out << it->second;
    }
    out << '\n';
  }
}

double PairEncoderMse(const EncoderConfig& cfg_a, const ParamMap& enc_a,
                      const EncoderConfig& cfg_b, const ParamMap& enc_b,
                      const Corpus& data, int32_t threads) {
  const int64_t n = static_cast<int64_t>(data.utterances.size());
  if (n == 0) throw std::invalid_argument("pair mse: empty corpus");
  std::vector<double> mses(static_cast<size_t>(n));
  ParallelFor(n, threads, [&](int64_t i) {
    const Tensor& frames = data.utterances[static_cast<size_t>(i)].features;
    const Tensor a = EncoderForward(cfg_a, enc_a, frames, nullptr);
    const Tensor b = EncoderForward(cfg_b, enc_b, frames, nullptr);
    mses[static_cast<size_t>(i)] = EncoderDistillLoss(a, b, a.Dim(0), nullptr);
  });
  double sum = 0.0;
  for (double m : mses) sum += m;
  return sum / static_cast<double>(n);
}

void WriteEntropyGnuplot(const std::string& dir) {
  std::ofstream out(dir + "/entropy.gp", std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + dir + "/entropy.gp");
  out << "set datafile separator ','\n"
         "set xlabel 'entropy (nats)'\n"
         "set ylabel 'count'\n"
         "set style fill transparent solid 0.4\n"
         "plot 'entropy_joint.csv' skip 2 using 1:3 with boxes title 'joint', \\\n"
         "     'entropy_decoder.csv' skip 2 using 1:3 with boxes title 'decoder', \\\n"
         "     'entropy_encoder.csv' skip 2 using 1:3 with boxes title 'encoder'\n";
}

void WriteTsCurveGnuplot(const std::string& csv_path, const std::string& script_path,
                         int64_t num_runs) {
  std::ofstream out(script_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + script_path);
  out << "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set xlabel 'step'\n"
         "set ylabel 'teacher-student encoder MSE'\n"
         "set logscale y\n"
         "plot";
  for (int64_t r = 0; r < num_runs; ++r) {
    out << (r ? ", " : " ") << "'" << csv_path << "' using 1:" << r + 2 << " with lines";
  }
  out << '\n';
}

}  // namespace codert
