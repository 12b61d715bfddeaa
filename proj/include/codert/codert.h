/* codert/codert.h
 *
 * Copyright 2026  The codert authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *  http://www.apache.org/licenses/LICENSE-2.0
 *
 * THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
 * KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
 * WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
 * MERCHANTABLITY OR NON-INFRINGEMENT.
 * See the Apache 2 License for the specific language governing permissions and
 * limitations under the License.
 *
 * C interface to the codert sequence-transduction toolkit: synthetic corpus
 * generation, transducer training (baseline / frozen-teacher / co-learned
 * encoder distillation), evaluation, decoding and diagnostics.
 *
 * Conventions: every function returns a codert_status_t; out-parameters are
 * written only on CODERT_STATUS_OK. codert_last_error() describes the most
 * recent failure on the calling thread. Objects returned through *_t** out
 * parameters are owned by the caller and released with the matching
 * *_free()/codert_string_free() call.
 */

#ifndef CODERT_CODERT_H_
#define CODERT_CODERT_H_

#include <stdint.h>
#include <stddef.h>

#if defined(_WIN32)
#define CODERT_API __declspec(dllexport)
#else
#define CODERT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum codert_status_t {
  CODERT_STATUS_OK = 0,
  CODERT_STATUS_INVALID_ARGUMENT = 1,
  CODERT_STATUS_RUNTIME_ERROR = 2,
  CODERT_STATUS_IO_ERROR = 3
} codert_status_t;

CODERT_API const char* codert_version(void);

/* Thread-local message for the last failing call on this thread. */
CODERT_API const char* codert_last_error(void);

/* Frees strings returned through char** out parameters. */
CODERT_API void codert_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Corpus                                                              */

typedef struct codert_corpus_s codert_corpus_t;

/* task_spec_json keys: vocab_size, feature_dim, duration_range [min,max],
 * noise_sigma, confusion_pairs [[a,b,overlap]...], utterance_len_range
 * [min,max], seed. Generation is bit-deterministic given the spec. */
CODERT_API codert_status_t codert_corpus_generate(const char* task_spec_json,
                                                  int64_t num_utterances,
                                                  codert_corpus_t** out);
CODERT_API codert_status_t codert_corpus_save(const codert_corpus_t* corpus,
                                              const char* dir);
CODERT_API codert_status_t codert_corpus_load(const char* dir, codert_corpus_t** out);
CODERT_API int64_t codert_corpus_size(const codert_corpus_t* corpus);
CODERT_API codert_status_t codert_corpus_spec_json(const codert_corpus_t* corpus,
                                                   char** out_json);
CODERT_API void codert_corpus_free(codert_corpus_t* corpus);

/* ------------------------------------------------------------------ */
/* Stateless kernels                                                   */

CODERT_API codert_status_t codert_log_sum_exp(const double* values, int64_t n,
                                              double* out);

/* Transducer negative log-likelihood for one utterance. logits is row-major
 * [t_len, u_len+1, vocab] with blank fixed at index vocab-1; labels has
 * u_len entries. grad_out (same layout, may be NULL) receives d loss /
 * d logits. */
CODERT_API codert_status_t codert_transducer_loss(const double* logits, int32_t t_len,
                                                  int32_t u_len, int32_t vocab,
                                                  const int32_t* labels, double* loss_out,
                                                  double* grad_out);

/* Mean squared teacher/student encoder-logit distance over [frames, vocab]
 * row-major logits; top_k = 0 uses all vocab entries, otherwise the top-k
 * teacher logits per frame. */
CODERT_API codert_status_t codert_encoder_distill_loss(const double* student,
                                                       const double* teacher,
                                                       int32_t frames, int32_t vocab,
                                                       int32_t top_k, double* out);

/* ------------------------------------------------------------------ */
/* Training                                                            */

typedef void (*codert_metrics_fn)(const char* jsonl_record, void* user_data);

/* Runs a full training job. config_json holds the flat training config
 * (see the README key table); data_dir a saved corpus; out_dir receives
 * config.json, metrics.jsonl, ckpt_best.cdrt and ckpt_last.cdrt. metrics_cb
 * may be NULL. */
CODERT_API codert_status_t codert_train(const char* config_json, const char* data_dir,
                                        const char* out_dir, codert_metrics_fn metrics_cb,
                                        void* user_data);

/* ------------------------------------------------------------------ */
/* Models (checkpoints)                                                */

typedef struct codert_model_s codert_model_t;

CODERT_API codert_status_t codert_model_load(const char* checkpoint_path,
                                             codert_model_t** out);
CODERT_API uint64_t codert_model_step(const codert_model_t* model);
CODERT_API codert_status_t codert_model_config_json(const codert_model_t* model,
                                                    char** out_json);
CODERT_API void codert_model_free(codert_model_t* model);

/* which selects the encoder: "student" or "teacher". split selects the
 * corpus partition the model's config defines: "train", "dev" or "test".
 * hyp_out_path (optional) receives one hypothesis per line. */
CODERT_API codert_status_t codert_evaluate(const codert_model_t* model,
                                           const char* data_dir, const char* split,
                                           int32_t beam, const char* which,
                                           const char* hyp_out_path, double* wer_out);

/* Decodes one utterance. features is row-major [frames, dim] (f32). Writes
 * up to max_tokens token ids. beam = 1 is greedy. */
CODERT_API codert_status_t codert_decode(const codert_model_t* model, const char* which,
                                         const float* features, int32_t frames,
                                         int32_t dim, int32_t beam, int32_t* tokens_out,
                                         int32_t max_tokens, int32_t* num_tokens_out,
                                         double* score_out);

/* ------------------------------------------------------------------ */
/* Diagnostics                                                         */

/* Writes entropy_encoder.csv, entropy_decoder.csv, entropy_joint.csv (and
 * entropy.gp when gnuplot != 0) into out_dir, computed over one seeded
 * batch of the chosen split. */
CODERT_API codert_status_t codert_diagnose_entropy(const codert_model_t* model,
                                                   const char* which,
                                                   const char* data_dir,
                                                   const char* split, int64_t batch_size,
                                                   uint64_t batch_seed,
                                                   const char* out_dir, int gnuplot);

/* Tab-separated encoder confusion table (ref_token, rank, token, mass). */
CODERT_API codert_status_t codert_diagnose_confusion(const codert_model_t* model,
                                                     const char* which,
                                                     const char* data_dir,
                                                     const char* split,
                                                     int64_t batch_size,
                                                     uint64_t batch_seed, int32_t top_n,
                                                     const char* out_path);

/* Aligns ts_encoder_mse series from metrics logs into one CSV plus
 * final-window means (and a companion .gp script when gnuplot != 0). */
CODERT_API codert_status_t codert_diagnose_tscurve(const char* const* metrics_paths,
                                                   const char* const* run_names,
                                                   int32_t num_runs, int64_t final_window,
                                                   const char* out_csv, int gnuplot);

/* Post-hoc encoder MSE between two checkpointed models on a shared split
 * (the separate-decoder analogue of the logged co-learning metric). */
CODERT_API codert_status_t codert_pair_encoder_mse(const codert_model_t* model_a,
                                                   const char* which_a,
                                                   const codert_model_t* model_b,
                                                   const char* which_b,
                                                   const char* data_dir,
                                                   const char* split, double* mse_out);

/* ------------------------------------------------------------------ */
/* Self check                                                          */

/* Runs the embedded oracle suites and prints one PASS/FAIL line per suite
 * to stdout. Returns CODERT_STATUS_OK iff every suite passed. */
CODERT_API codert_status_t codert_selfcheck(int verbose);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CODERT_CODERT_H_ */
