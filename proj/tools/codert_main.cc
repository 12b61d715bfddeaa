// tools/codert_main.cc

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

// Command-line front end; everything it does goes through the public C API
// in codert/codert.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "codert/codert.h"
#include "json.hpp"

namespace {

// Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.
constexpr int kOk = 0;
constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

int StatusToExit(codert_status_t status) {
  if (status == CODERT_STATUS_OK) return kOk;
  std::cerr << "error: " << codert_last_error() << "\n";
  return status == CODERT_STATUS_INVALID_ARGUMENT ? kUsageError : kRuntimeError;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::ValidationError("--spec/--config", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void PrintMetricsLine(const char* line, void* user_data) {
  const auto every = *static_cast<const int64_t*>(user_data);
  static int64_t counter = 0;
  nlohmann::json rec = nlohmann::json::parse(line);
  if (rec.contains("split")) {
    std::cout << line << "\n";
  } else if (every > 0 && (++counter % every == 0)) {
    std::cout << line << "\n";
  }
}

int RunGenData(const std::string& spec_path, const std::string& out_dir, int64_t num) {
  codert_corpus_t* corpus = nullptr;
  codert_status_t status =
      codert_corpus_generate(ReadFile(spec_path).c_str(), num, &corpus);
  if (status != CODERT_STATUS_OK) return StatusToExit(status);
  status = codert_corpus_save(corpus, out_dir.c_str());
  if (status == CODERT_STATUS_OK) {
    std::cout << "wrote " << codert_corpus_size(corpus) << " utterances to " << out_dir
              << "\n";
  }
  codert_corpus_free(corpus);
  return StatusToExit(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"codert: transducer training with co-learned encoder distillation"};
  app.require_subcommand(1);

  // ---- gen-data ----
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic corpus");
  std::string gen_spec, gen_out;
  int64_t gen_num = 500;
  gen->add_option("--spec", gen_spec, "Task spec JSON file")->required();
  gen->add_option("--out", gen_out, "Output corpus directory")->required();
  gen->add_option("--num", gen_num, "Number of utterances");

  // ---- train ----
  auto* train = app.add_subcommand("train", "Train a transducer");
  std::string tr_config, tr_data, tr_out, tr_mode = "baseline", tr_arch;
  std::string tr_teacher_ckpt, tr_topk_source;
  double tr_lambda = 1.0;
  int32_t tr_topk = 0, tr_threads = 0, tr_beam = 0;
  int64_t tr_steps = -1, tr_batch = -1, tr_eval_every = -1, tr_print_every = 50;
  uint64_t tr_seed = 0, tr_data_seed = 0, tr_init_s = 0, tr_init_t = 0, tr_shuffle = 0;
  train->add_option("--config", tr_config, "Training config JSON file");
  train->add_option("--data", tr_data, "Corpus directory");
  train->add_option("--out", tr_out, "Run output directory")->required();
  train->add_option("--mode", tr_mode, "baseline | static | colearn")
      ->check(CLI::IsMember({"baseline", "static", "colearn"}));
  auto* lambda_opt = train->add_option("--lambda", tr_lambda, "Distillation weight");
  auto* topk_opt = train->add_option("--topk", tr_topk, "Distill only the top-k logits");
  train->add_option("--topk-source", tr_topk_source, "teacher | student");
  train->add_option("--seed", tr_seed,
                    "Master seed; sets data/init/shuffle seeds to s..s+3");
  train->add_option("--data-seed", tr_data_seed, "Corpus split seed override");
  train->add_option("--init-student-seed", tr_init_s, "Student init seed");
  train->add_option("--init-teacher-seed", tr_init_t, "Teacher init seed");
  train->add_option("--shuffle-seed", tr_shuffle, "Batch shuffle seed");
  train->add_option("--steps", tr_steps, "Max optimization steps");
  train->add_option("--batch-size", tr_batch, "Utterances per step");
  train->add_option("--eval-every", tr_eval_every, "Dev eval cadence in steps");
  train->add_option("--eval-beam", tr_beam, "Beam size for dev evals");
  train->add_option("--arch", tr_arch, "Baseline architecture: student | teacher")
      ->check(CLI::IsMember({"student", "teacher"}));
  train->add_option("--teacher-checkpoint", tr_teacher_ckpt,
                    "Frozen teacher checkpoint (static mode)");
  train->add_option("--threads", tr_threads, "Worker threads (capped by CODERT_THREADS)");
  train->add_option("--print-every", tr_print_every,
                    "Echo every Nth metrics record (0 silences them)");

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "Score a checkpoint on a corpus split");
  std::string ev_ckpt, ev_data, ev_split = "test", ev_which = "student", ev_hyp;
  int32_t ev_beam = 6;
  eval->add_option("--checkpoint", ev_ckpt, "Checkpoint file")->required();
  eval->add_option("--data", ev_data, "Corpus directory")->required();
  eval->add_option("--split", ev_split, "train | dev | test | all");
  eval->add_option("--beam", ev_beam, "Beam size");
  eval->add_option("--which", ev_which, "student | teacher")
      ->check(CLI::IsMember({"student", "teacher"}));
  eval->add_option("--hyp-out", ev_hyp, "Hypotheses output file");

  // ---- diagnose ----
  auto* diag = app.add_subcommand("diagnose", "Entropy, confusion and error-curve reports");
  std::string dg_kind, dg_ckpt, dg_which = "student", dg_data, dg_split = "train";
  std::string dg_out;
  int64_t dg_batch = 64, dg_window = 1000;
  uint64_t dg_batch_seed = 1;
  int32_t dg_top = 3;
  bool dg_gnuplot = false;
  std::vector<std::string> dg_logs, dg_names;
  std::string dg_pair_a, dg_pair_b, dg_pair_which_a = "teacher",
                                    dg_pair_which_b = "student", dg_pair_name = "separate";
  diag->add_option("--kind", dg_kind, "entropy | confusion | tscurve")
      ->required()
      ->check(CLI::IsMember({"entropy", "confusion", "tscurve"}));
  diag->add_option("--checkpoint", dg_ckpt, "Checkpoint file (entropy/confusion)");
  diag->add_option("--which", dg_which, "student | teacher");
  diag->add_option("--data", dg_data, "Corpus directory");
  diag->add_option("--split", dg_split, "train | dev | test | all");
  diag->add_option("--out", dg_out, "Output file (tscurve/confusion) or directory (entropy)")
      ->required();
  diag->add_option("--batch-size", dg_batch, "Utterances in the probe batch");
  diag->add_option("--batch-seed", dg_batch_seed, "Probe batch seed");
  diag->add_option("--top", dg_top, "Rows per reference token (confusion)");
  diag->add_option("--log", dg_logs, "Metrics log path (repeat per run; tscurve)");
  diag->add_option("--name", dg_names, "Run label (repeat, parallel to --log)");
  diag->add_option("--window", dg_window, "Final-window size in steps (tscurve)");
  diag->add_flag("--gnuplot", dg_gnuplot, "Also emit a gnuplot script");
  diag->add_option("--pair-a", dg_pair_a, "Checkpoint A for a paired-eval MSE point");
  diag->add_option("--pair-b", dg_pair_b, "Checkpoint B for a paired-eval MSE point");
  diag->add_option("--pair-which-a", dg_pair_which_a, "Encoder from A");
  diag->add_option("--pair-which-b", dg_pair_which_b, "Encoder from B");
  diag->add_option("--pair-name", dg_pair_name, "Label for the paired-eval run");

  // ---- selfcheck ----
  auto* selfcheck = app.add_subcommand("selfcheck", "Run the embedded oracle suites");
  bool sc_verbose = false;
  selfcheck->add_flag("--verbose", sc_verbose, "Print per-suite details");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (gen->parsed()) return RunGenData(gen_spec, gen_out, gen_num);

    if (train->parsed()) {
      nlohmann::json cfg = nlohmann::json::object();
      if (!tr_config.empty()) {
        cfg = nlohmann::json::parse(ReadFile(tr_config), nullptr,
                                    /*allow_exceptions=*/true);
      }
      // Flags override config keys.
      if (train->count("--mode")) cfg["mode"] = tr_mode;
      const std::string mode = cfg.value("mode", "baseline");
      if (mode == "baseline" && (lambda_opt->count() || topk_opt->count())) {
        std::cerr << "error: --lambda/--topk only apply to static or colearn mode\n";
        return kUsageError;
      }
      if (train->count("--lambda")) cfg["lambda"] = tr_lambda;
      if (train->count("--topk")) cfg["top_k"] = tr_topk;
      if (train->count("--topk-source")) cfg["topk_source"] = tr_topk_source;
      if (train->count("--seed")) {
        cfg["data_seed"] = tr_seed;
        cfg["init_student_seed"] = tr_seed + 1;
        cfg["init_teacher_seed"] = tr_seed + 2;
        cfg["shuffle_seed"] = tr_seed + 3;
      }
      if (train->count("--data-seed")) cfg["data_seed"] = tr_data_seed;
      if (train->count("--init-student-seed")) cfg["init_student_seed"] = tr_init_s;
      if (train->count("--init-teacher-seed")) cfg["init_teacher_seed"] = tr_init_t;
      if (train->count("--shuffle-seed")) cfg["shuffle_seed"] = tr_shuffle;
      if (train->count("--steps")) cfg["max_steps"] = tr_steps;
      if (train->count("--batch-size")) cfg["batch_size"] = tr_batch;
      if (train->count("--eval-every")) cfg["eval_every"] = tr_eval_every;
      if (train->count("--eval-beam")) cfg["eval_beam"] = tr_beam;
      if (train->count("--arch")) cfg["baseline_arch"] = tr_arch;
      if (train->count("--teacher-checkpoint"))
        cfg["teacher_checkpoint"] = tr_teacher_ckpt;
      if (train->count("--threads")) cfg["threads"] = tr_threads;
      if (mode == "static" && cfg.value("teacher_checkpoint", "").empty()) {
        std::cerr << "error: static mode requires --teacher-checkpoint\n";
        return kUsageError;
      }

      std::string data_dir = tr_data;
      if (data_dir.empty()) data_dir = cfg.value("data_dir", "");
      if (data_dir.empty()) {
        std::cerr << "error: no corpus; pass --data or set data_dir in the config\n";
        return kUsageError;
      }

      const codert_status_t status =
          codert_train(cfg.dump().c_str(), data_dir.c_str(), tr_out.c_str(),
                       PrintMetricsLine, &tr_print_every);
      if (status == CODERT_STATUS_OK)
        std::cout << "run complete; checkpoints and metrics in " << tr_out << "\n";
      return StatusToExit(status);
    }

    if (eval->parsed()) {
      codert_model_t* model = nullptr;
      codert_status_t status = codert_model_load(ev_ckpt.c_str(), &model);
      if (status != CODERT_STATUS_OK) return StatusToExit(status);
      if (ev_hyp.empty()) ev_hyp = "hyps_" + ev_split + "_" + ev_which + ".txt";
      double wer = 0.0;
      status = codert_evaluate(model, ev_data.c_str(), ev_split.c_str(), ev_beam,
                               ev_which.c_str(), ev_hyp.c_str(), &wer);
      if (status == CODERT_STATUS_OK) {
        std::printf("%s %s WER %.4f (beam %d, step %llu); hyps: %s\n", ev_split.c_str(),
                    ev_which.c_str(), wer, ev_beam,
                    static_cast<unsigned long long>(codert_model_step(model)),
                    ev_hyp.c_str());
      }
      codert_model_free(model);
      return StatusToExit(status);
    }

    if (diag->parsed()) {
      if (dg_kind == "entropy" || dg_kind == "confusion") {
        if (dg_ckpt.empty() || dg_data.empty()) {
          std::cerr << "error: --kind " << dg_kind << " needs --checkpoint and --data\n";
          return kUsageError;
        }
        codert_model_t* model = nullptr;
        codert_status_t status = codert_model_load(dg_ckpt.c_str(), &model);
        if (status != CODERT_STATUS_OK) return StatusToExit(status);
        if (dg_kind == "entropy") {
          status = codert_diagnose_entropy(model, dg_which.c_str(), dg_data.c_str(),
                                           dg_split.c_str(), dg_batch, dg_batch_seed,
                                           dg_out.c_str(), dg_gnuplot ? 1 : 0);
        } else {
          status = codert_diagnose_confusion(model, dg_which.c_str(), dg_data.c_str(),
                                             dg_split.c_str(), dg_batch, dg_batch_seed,
                                             dg_top, dg_out.c_str());
        }
        codert_model_free(model);
        return StatusToExit(status);
      }

      // tscurve
      std::vector<std::string> logs = dg_logs;
      std::vector<std::string> names = dg_names;
      if (names.empty()) names = logs;
      if (names.size() != logs.size()) {
        std::cerr << "error: --name count must match --log count\n";
        return kUsageError;
      }
      if (!dg_pair_a.empty() || !dg_pair_b.empty()) {
        if (dg_pair_a.empty() || dg_pair_b.empty() || dg_data.empty()) {
          std::cerr << "error: paired eval needs --pair-a, --pair-b and --data\n";
          return kUsageError;
        }
        codert_model_t* ma = nullptr;
        codert_model_t* mb = nullptr;
        codert_status_t status = codert_model_load(dg_pair_a.c_str(), &ma);
        if (status != CODERT_STATUS_OK) return StatusToExit(status);
        status = codert_model_load(dg_pair_b.c_str(), &mb);
        if (status != CODERT_STATUS_OK) {
          codert_model_free(ma);
          return StatusToExit(status);
        }
        double mse = 0.0;
        status = codert_pair_encoder_mse(ma, dg_pair_which_a.c_str(), mb,
                                         dg_pair_which_b.c_str(), dg_data.c_str(),
                                         dg_split.c_str(), &mse);
        const uint64_t pair_step = codert_model_step(ma);
        codert_model_free(ma);
        codert_model_free(mb);
        if (status != CODERT_STATUS_OK) return StatusToExit(status);
        // A one-point pseudo-log so the paired eval joins the CSV.
        const std::string pair_log = dg_out + "." + dg_pair_name + ".jsonl";
        std::ofstream out(pair_log, std::ios::binary | std::ios::trunc);
        out << "{\"step\":" << pair_step << ",\"ts_encoder_mse\":" << mse << "}\n";
        out.close();
        logs.push_back(pair_log);
        names.push_back(dg_pair_name);
        std::cout << dg_pair_name << " encoder MSE " << mse << " at step " << pair_step
                  << "\n";
      }
      if (logs.empty()) {
        std::cerr << "error: --kind tscurve needs at least one --log or a pair\n";
        return kUsageError;
      }
      std::vector<const char*> log_ptrs, name_ptrs;
      for (const auto& s : logs) log_ptrs.push_back(s.c_str());
      for (const auto& s : names) name_ptrs.push_back(s.c_str());
      const codert_status_t status = codert_diagnose_tscurve(
          log_ptrs.data(), name_ptrs.data(), static_cast<int32_t>(logs.size()),
          dg_window, dg_out.c_str(), dg_gnuplot ? 1 : 0);
      return StatusToExit(status);
    }

    if (selfcheck->parsed()) {
      const codert_status_t status = codert_selfcheck(sc_verbose ? 1 : 0);
      return status == CODERT_STATUS_OK ? kOk : kRuntimeError;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
