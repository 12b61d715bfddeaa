// capi/capi.cc

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

#include "codert/codert.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <string>

#include "core/data-synth.h"
#include "core/decode.h"
#include "core/diagnostics.h"
#include "core/distill.h"
#include "core/numerics.h"
#include "core/selfcheck.h"
#include "core/trainer.h"
#include "core/transducer-lattice.h"

namespace {

thread_local std::string g_last_error;

codert_status_t Fail(codert_status_t status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Maps core exceptions onto the C status contract. I/O problems surface as
// runtime_errors whose messages mention the path verbs used by the core.
codert_status_t FromException(const std::exception& e) {
  const std::string what = e.what();
  if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr)
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, what);
  if (what.rfind("cannot read", 0) == 0 || what.rfind("cannot write", 0) == 0)
    return Fail(CODERT_STATUS_IO_ERROR, what);
  return Fail(CODERT_STATUS_RUNTIME_ERROR, what);
}

template <typename Fn>
codert_status_t Guard(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return FromException(e);
  } catch (...) {
    return Fail(CODERT_STATUS_RUNTIME_ERROR, "unknown error");
  }
}

char* CopyString(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

codert::Corpus LoadSplit(const codert::TrainConfig& config, const char* data_dir,
                         const std::string& split) {
  const codert::Corpus corpus = codert::LoadCorpus(data_dir);
  if (split == "all") return corpus;
  codert::Corpus train, dev, test;
  codert::SplitForConfig(config, corpus, &train, &dev, &test);
  if (split == "train") return train;
  if (split == "dev") return dev;
  if (split == "test") return test;
  throw std::invalid_argument("split must be train, dev, test or all");
}

}  // namespace

struct codert_corpus_s {
  codert::Corpus corpus;
};

struct codert_model_s {
  codert::LoadedModel model;
};

extern "C" {

const char* codert_version(void) { return "1.0.0"; }

const char* codert_last_error(void) { return g_last_error.c_str(); }

void codert_string_free(char* s) { delete[] s; }

codert_status_t codert_corpus_generate(const char* task_spec_json,
                                       int64_t num_utterances, codert_corpus_t** out) {
  if (!task_spec_json || !out)
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    const codert::TaskSpec spec = codert::TaskSpec::FromJson(task_spec_json);
    auto* corpus = new codert_corpus_s{codert::GenerateCorpus(spec, num_utterances)};
    *out = corpus;
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_corpus_save(const codert_corpus_t* corpus, const char* dir) {
  if (!corpus || !dir) return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    codert::SaveCorpus(corpus->corpus, dir);
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_corpus_load(const char* dir, codert_corpus_t** out) {
  if (!dir || !out) return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    auto* corpus = new codert_corpus_s{codert::LoadCorpus(dir)};
    *out = corpus;
    return CODERT_STATUS_OK;
  });
}

int64_t codert_corpus_size(const codert_corpus_t* corpus) {
  return corpus ? static_cast<int64_t>(corpus->corpus.utterances.size()) : -1;
}

codert_status_t codert_corpus_spec_json(const codert_corpus_t* corpus, char** out_json) {
  if (!corpus || !out_json) return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  *out_json = CopyString(corpus->corpus.spec.ToJson());
  return CODERT_STATUS_OK;
}

void codert_corpus_free(codert_corpus_t* corpus) { delete corpus; }

codert_status_t codert_log_sum_exp(const double* values, int64_t n, double* out) {
  if (!values || !out) return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    *out = codert::LogSumExp(std::span<const double>(values, static_cast<size_t>(n)));
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_transducer_loss(const double* logits, int32_t t_len,
                                       int32_t u_len, int32_t vocab,
                                       const int32_t* labels, double* loss_out,
                                       double* grad_out) {
  if (!logits || !loss_out || (u_len > 0 && !labels))
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    codert::Tensor logit_tensor({t_len, u_len + 1, vocab});
    for (int64_t i = 0; i < logit_tensor.NumElements(); ++i)
      logit_tensor(i) = logits[i];
    codert::JointLattice lattice =
        codert::JointLattice::FromLogits(std::move(logit_tensor));
    codert::LabelSequence seq;
    seq.blank_index = vocab - 1;
    seq.tokens.assign(labels, labels + u_len);
    if (grad_out) {
      *loss_out = codert::TransducerLossWithGrad(&lattice, seq);
      for (int64_t i = 0; i < lattice.grad_logits.NumElements(); ++i)
        grad_out[i] = lattice.grad_logits(i);
    } else {
      *loss_out = codert::TransducerLoss(&lattice, seq);
    }
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_encoder_distill_loss(const double* student, const double* teacher,
                                            int32_t frames, int32_t vocab, int32_t top_k,
                                            double* out) {
  if (!student || !teacher || !out)
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    codert::Tensor s({frames, vocab}), t({frames, vocab});
    for (int64_t i = 0; i < s.NumElements(); ++i) {
      s(i) = student[i];
      t(i) = teacher[i];
    }
    const int32_t k = top_k > 0 ? top_k : vocab;
    *out = codert::TopKMaskedDistillLoss(s, t, frames, k,
                                         codert::TopKSource::kTeacher, nullptr);
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_train(const char* config_json, const char* data_dir,
                             const char* out_dir, codert_metrics_fn metrics_cb,
                             void* user_data) {
  if (!config_json || !data_dir || !out_dir)
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    codert::TrainConfig config = codert::TrainConfig::FromJson(config_json);
    config.data_dir = data_dir;
    const codert::Corpus corpus = codert::LoadCorpus(data_dir);
    codert::MetricsCallback callback;
    if (metrics_cb) {
      callback = [metrics_cb, user_data](const std::string& line) {
        metrics_cb(line.c_str(), user_data);
      };
    }
    codert::Train(config, corpus, out_dir, callback);
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_model_load(const char* checkpoint_path, codert_model_t** out) {
  if (!checkpoint_path || !out)
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    auto* model = new codert_model_s{codert::LoadModel(checkpoint_path)};
    *out = model;
    return CODERT_STATUS_OK;
  });
}

uint64_t codert_model_step(const codert_model_t* model) {
  return model ? model->model.step : 0;
}

codert_status_t codert_model_config_json(const codert_model_t* model, char** out_json) {
  if (!model || !out_json) return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  *out_json = CopyString(model->model.config.ToJson());
  return CODERT_STATUS_OK;
}

void codert_model_free(codert_model_t* model) { delete model; }

codert_status_t codert_evaluate(const codert_model_t* model, const char* data_dir,
                                const char* split, int32_t beam, const char* which,
                                const char* hyp_out_path, double* wer_out) {
  if (!model || !data_dir || !split || !which || !wer_out)
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  if (beam < 1) return Fail(CODERT_STATUS_INVALID_ARGUMENT, "beam must be >= 1");
  return Guard([&]() {
    codert::EncoderConfig enc_cfg;
    codert::DecoderConfig dec_cfg;
    const codert::ParamMap* enc = nullptr;
    const codert::ParamMap* dec = nullptr;
    model->model.Select(which, &enc_cfg, &dec_cfg, &enc, &dec);

    const codert::Corpus data = LoadSplit(model->model.config, data_dir, split);
    if (data.utterances.empty())
      throw std::invalid_argument(std::string("split ") + split + " is empty");

    std::vector<std::vector<int32_t>> hyps;
    *wer_out = codert::EvaluateWer(enc_cfg, dec_cfg, *enc, *dec, data, beam,
                                   model->model.config.threads, &hyps);
    if (hyp_out_path) {
      std::ofstream out(hyp_out_path, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error(std::string("cannot write ") + hyp_out_path);
      for (const auto& hyp : hyps) {
        for (size_t i = 0; i < hyp.size(); ++i) out << (i ? " " : "") << hyp[i];
        out << '\n';
      }
    }
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_decode(const codert_model_t* model, const char* which,
                              const float* features, int32_t frames, int32_t dim,
                              int32_t beam, int32_t* tokens_out, int32_t max_tokens,
                              int32_t* num_tokens_out, double* score_out) {
  if (!model || !which || !features || !tokens_out || !num_tokens_out)
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    codert::EncoderConfig enc_cfg;
    codert::DecoderConfig dec_cfg;
    const codert::ParamMap* enc = nullptr;
    const codert::ParamMap* dec = nullptr;
    model->model.Select(which, &enc_cfg, &dec_cfg, &enc, &dec);

    codert::Tensor f({frames, dim});
    for (int64_t i = 0; i < f.NumElements(); ++i) f(i) = static_cast<double>(features[i]);

    codert::DecodeOptions opts;
    opts.beam = beam;
    const codert::DecodeResult result =
        codert::BeamDecode(enc_cfg, dec_cfg, *enc, *dec, f, opts);
    const int32_t n =
        std::min<int32_t>(max_tokens, static_cast<int32_t>(result.tokens.size()));
    for (int32_t i = 0; i < n; ++i) tokens_out[i] = result.tokens[static_cast<size_t>(i)];
    *num_tokens_out = static_cast<int32_t>(result.tokens.size());
    if (score_out) *score_out = result.log_prob;
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_diagnose_entropy(const codert_model_t* model, const char* which,
                                        const char* data_dir, const char* split,
                                        int64_t batch_size, uint64_t batch_seed,
                                        const char* out_dir, int gnuplot) {
  if (!model || !which || !data_dir || !split || !out_dir)
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    codert::EncoderConfig enc_cfg;
    codert::DecoderConfig dec_cfg;
    const codert::ParamMap* enc = nullptr;
    const codert::ParamMap* dec = nullptr;
    model->model.Select(which, &enc_cfg, &dec_cfg, &enc, &dec);

    const codert::Corpus data = LoadSplit(model->model.config, data_dir, split);
    if (data.utterances.empty())
      throw std::invalid_argument(std::string("split ") + split + " is empty");
    const auto batches = codert::MakeBatches(data, batch_size, batch_seed);
    // One randomly chosen batch, fixed by the seed.
    codert::Rng rng = codert::Rng::ForStream(batch_seed, "entropy-batch");
    const auto& batch =
        batches[static_cast<size_t>(rng.NextInt(0, static_cast<int64_t>(batches.size()) - 1))];

    const codert::EntropyReport report =
        codert::EntropyHistograms(enc_cfg, dec_cfg, *enc, *dec, batch);
    const std::string dir(out_dir);
    std::filesystem::create_directories(dir);
    codert::WriteHistogramCsv(report.encoder, dir + "/entropy_encoder.csv");
    codert::WriteHistogramCsv(report.decoder, dir + "/entropy_decoder.csv");
    codert::WriteHistogramCsv(report.joint, dir + "/entropy_joint.csv");
    if (gnuplot) codert::WriteEntropyGnuplot(dir);
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_diagnose_confusion(const codert_model_t* model, const char* which,
                                          const char* data_dir, const char* split,
                                          int64_t batch_size, uint64_t batch_seed,
                                          int32_t top_n, const char* out_path) {
  if (!model || !which || !data_dir || !split || !out_path)
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    codert::EncoderConfig enc_cfg;
    codert::DecoderConfig dec_cfg;
    const codert::ParamMap* enc = nullptr;
    const codert::ParamMap* dec = nullptr;
    model->model.Select(which, &enc_cfg, &dec_cfg, &enc, &dec);

    const codert::Corpus data = LoadSplit(model->model.config, data_dir, split);
    if (data.utterances.empty())
      throw std::invalid_argument(std::string("split ") + split + " is empty");
    // The whole split as one batch keeps the table stable.
    std::vector<int64_t> indices;
    const int64_t n = std::min<int64_t>(batch_size,
                                        static_cast<int64_t>(data.utterances.size()));
    codert::Rng rng = codert::Rng::ForStream(batch_seed, "confusion-batch");
    for (int64_t i = 0; i < n; ++i)
      indices.push_back(rng.NextInt(0, static_cast<int64_t>(data.utterances.size()) - 1));
    const codert::SequenceBatch batch = codert::PackBatch(data, indices);

    const auto rows = codert::ConfusionTable(enc_cfg, dec_cfg, *enc, *dec, batch, top_n);
    codert::WriteConfusionTsv(rows, out_path);
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_diagnose_tscurve(const char* const* metrics_paths,
                                        const char* const* run_names, int32_t num_runs,
                                        int64_t final_window, const char* out_csv,
                                        int gnuplot) {
  if (!metrics_paths || !run_names || num_runs < 1 || !out_csv)
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    std::vector<std::string> paths(metrics_paths, metrics_paths + num_runs);
    std::vector<std::string> names(run_names, run_names + num_runs);
    const codert::TsErrorCurve curve =
        codert::LoadTsErrorCurve(paths, names, final_window);
    codert::WriteTsCurveCsv(curve, out_csv);
    if (gnuplot)
      codert::WriteTsCurveGnuplot(out_csv, std::string(out_csv) + ".gp", num_runs);
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_pair_encoder_mse(const codert_model_t* model_a,
                                        const char* which_a,
                                        const codert_model_t* model_b,
                                        const char* which_b, const char* data_dir,
                                        const char* split, double* mse_out) {
  if (!model_a || !model_b || !which_a || !which_b || !data_dir || !split || !mse_out)
    return Fail(CODERT_STATUS_INVALID_ARGUMENT, "null argument");
  return Guard([&]() {
    codert::EncoderConfig cfg_a, cfg_b;
    codert::DecoderConfig unused_dec;
    const codert::ParamMap* enc_a = nullptr;
    const codert::ParamMap* enc_b = nullptr;
    const codert::ParamMap* unused = nullptr;
    model_a->model.Select(which_a, &cfg_a, &unused_dec, &enc_a, &unused);
    model_b->model.Select(which_b, &cfg_b, &unused_dec, &enc_b, &unused);

    const codert::Corpus data = LoadSplit(model_a->model.config, data_dir, split);
    if (data.utterances.empty())
      throw std::invalid_argument(std::string("split ") + split + " is empty");
    *mse_out = codert::PairEncoderMse(cfg_a, *enc_a, cfg_b, *enc_b, data,
                                      model_a->model.config.threads);
    return CODERT_STATUS_OK;
  });
}

codert_status_t codert_selfcheck(int verbose) {
  return Guard([&]() {
    codert::SelfCheckOptions opts;
    opts.verbose = verbose != 0;
    const bool ok = codert::RunSelfCheck(std::cout, opts);
    if (!ok) return Fail(CODERT_STATUS_RUNTIME_ERROR, "self check failed");
    return CODERT_STATUS_OK;
  });
}

}  // extern "C"
