// tests/test_network.cc

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

#include "core/network.h"

#include <cmath>

#include "core/rng.h"
#include "doctest.h"
#include "testing/test-util.h"

using namespace codert;
using codert::testing::GuardedRelError;

namespace {

Tensor RandomFrames(Rng* rng, int64_t t_len, int64_t dim, double scale = 1.0) {
  Tensor frames({t_len, dim});
  for (int64_t i = 0; i < frames.NumElements(); ++i)
    frames(i) = rng->Uniform(-scale, scale);
  return frames;
}

// Central finite differences over every parameter of one map.
double MaxParamGradError(const std::function<double()>& loss_fn, ParamMap* params,
                         const ParamMap& analytic, double h, int64_t stride = 1) {
  double worst = 0.0;
  for (auto& [name, tensor] : *params) {
    for (int64_t i = 0; i < tensor.NumElements(); i += stride) {
      const double saved = tensor(i);
      tensor(i) = saved + h;
      const double plus = loss_fn();
      tensor(i) = saved - h;
      const double minus = loss_fn();
      tensor(i) = saved;
      const double fd = (plus - minus) / (2 * h);
      worst = std::max(worst, GuardedRelError(analytic.at(name)(i), fd));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("lstm cell with zero weights and state gives zero outputs") {
  Tensor W({8, 3}), R({8, 2}), b({8});
  LstmWeights w{&W, &R, &b};
  std::vector<double> x = {1.5, -2.0, 0.25};
  std::vector<double> h_prev(2, 0.0), c_prev(2, 0.0);
  std::vector<double> gi(2), gf(2), gg(2), go(2), c(2), tc(2), h(2);
  LstmCellForward(w, x, h_prev, c_prev, gi, gf, gg, go, c, tc, h);
  for (int64_t j = 0; j < 2; ++j) {
    CHECK(gi[j] == doctest::Approx(0.5));  // sigmoid(0)
    CHECK(gg[j] == doctest::Approx(0.0));  // tanh(0)
    CHECK(c[j] == doctest::Approx(0.0));
    CHECK(h[j] == doctest::Approx(0.0));
  }
}

TEST_CASE("saturated forget gate carries the cell state") {
  const int64_t hidden = 3;
  Tensor W({4 * hidden, 2}), R({4 * hidden, hidden}), b({4 * hidden});
  for (int64_t j = 0; j < hidden; ++j) {
    b(j) = -20.0;               // input gate shut
    b(hidden + j) = 20.0;       // forget gate open
    b(3 * hidden + j) = -20.0;  // output gate shut
  }
  LstmWeights w{&W, &R, &b};
  std::vector<double> x = {0.3, -0.7};
  std::vector<double> h_prev(3, 0.0);
  std::vector<double> c_prev = {1.25, -0.5, 2.0};
  std::vector<double> gi(3), gf(3), gg(3), go(3), c(3), tc(3), h(3);
  LstmCellForward(w, x, h_prev, c_prev, gi, gf, gg, go, c, tc, h);
  for (int64_t j = 0; j < 3; ++j) {
    CHECK(c[j] == doctest::Approx(c_prev[static_cast<size_t>(j)]).epsilon(1e-6));
    CHECK(std::abs(h[j]) < 1e-6);
  }
}

TEST_CASE("lstm sequence backward matches finite differences") {
  Rng rng(31);
  const int64_t hidden = 4, in = 3, t_len = 5;
  ParamMap params;
  params["W"] = Tensor({4 * hidden, in});
  params["R"] = Tensor({4 * hidden, hidden});
  params["b"] = Tensor({4 * hidden});
  for (auto& [name, t] : params) {
    for (int64_t i = 0; i < t.NumElements(); ++i) t(i) = rng.Uniform(-0.5, 0.5);
  }
  const Tensor inputs = RandomFrames(&rng, t_len, in);

  // Scalar objective: weighted sum of hidden outputs (fixed weights).
  Tensor obj_w({t_len, hidden});
  for (int64_t i = 0; i < obj_w.NumElements(); ++i) obj_w(i) = rng.Uniform(-1, 1);

  auto loss_fn = [&]() {
    LstmWeights w{&params.at("W"), &params.at("R"), &params.at("b")};
    LstmCache cache;
    LstmForward(w, inputs, &cache);
    double loss = 0.0;
    for (int64_t i = 0; i < cache.h.NumElements(); ++i) loss += obj_w(i) * cache.h(i);
    return loss;
  };

  LstmWeights w{&params.at("W"), &params.at("R"), &params.at("b")};
  LstmCache cache;
  LstmForward(w, inputs, &cache);
  ParamMap grads = ZerosLike(params);
  Tensor dx;
  LstmBackward(w, cache, obj_w, &grads.at("W"), &grads.at("R"), &grads.at("b"), &dx);

  CHECK(MaxParamGradError(loss_fn, &params, grads, 1e-4) < 1e-4);

  // Input gradients too.
  double worst = 0.0;
  Tensor inputs_copy = inputs;
  auto loss_x = [&]() {
    LstmCache c2;
    LstmForward(w, inputs_copy, &c2);
    double loss = 0.0;
    for (int64_t i = 0; i < c2.h.NumElements(); ++i) loss += obj_w(i) * c2.h(i);
    return loss;
  };
  for (int64_t i = 0; i < inputs_copy.NumElements(); ++i) {
    const double saved = inputs_copy(i);
    inputs_copy(i) = saved + 1e-4;
    const double plus = loss_x();
    inputs_copy(i) = saved - 1e-4;
    const double minus = loss_x();
    inputs_copy(i) = saved;
    worst = std::max(worst, GuardedRelError(dx(i), (plus - minus) / 2e-4));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("time reduction concatenates frame pairs and zero-pads odd tails") {
  Tensor frames({4, 3});
  for (int64_t i = 0; i < frames.NumElements(); ++i) frames(i) = static_cast<double>(i);
  const Tensor reduced = TimeReduce(frames);
  CHECK(reduced.Dim(0) == 2);
  CHECK(reduced.Dim(1) == 6);
  for (int64_t j = 0; j < 3; ++j) {
    CHECK(reduced(0, j) == frames(0, j));
    CHECK(reduced(0, 3 + j) == frames(1, j));
  }

  Tensor single({1, 2});
  single(0, 0) = 5.0;
  single(0, 1) = -1.0;
  const Tensor padded = TimeReduce(single);
  CHECK(padded.Dim(0) == 1);
  CHECK(padded.Dim(1) == 4);
  CHECK(padded(0, 0) == 5.0);
  CHECK(padded(0, 2) == 0.0);
  CHECK(padded(0, 3) == 0.0);

  Tensor five({5, 2});
  CHECK(TimeReduce(five).Dim(0) == 3);
}

TEST_CASE("encoder with zero parameters yields zero logits") {
  EncoderConfig cfg{2, 4, 3, 1, 2, 5};
  ParamMap params = InitEncoderParams(cfg, 1);
  for (auto& [name, t] : params) t.Fill(0.0);
  Rng rng(32);
  const Tensor logits = EncoderForward(cfg, params, RandomFrames(&rng, 6, 3), nullptr);
  CHECK(logits.Dim(0) == 3);
  CHECK(logits.Dim(1) == 5);
  for (int64_t i = 0; i < logits.NumElements(); ++i) CHECK(logits(i) == 0.0);
}

TEST_CASE("student-style config halves the frame count") {
  EncoderConfig cfg{4, 4, 3, 2, 2, 5};  // reduction after layer 2
  CHECK(cfg.ReducedLength(10) == 5);
  ParamMap params = InitEncoderParams(cfg, 2);
  Rng rng(33);
  const Tensor logits = EncoderForward(cfg, params, RandomFrames(&rng, 10, 3), nullptr);
  CHECK(logits.Dim(0) == 5);
}

TEST_CASE("encoder gradient of sum(logits) matches finite differences") {
  Rng rng(34);
  EncoderConfig cfg{2, 4, 3, 1, 2, 4};
  ParamMap params = InitEncoderParams(cfg, 3);
  const Tensor frames = RandomFrames(&rng, 5, 3);

  auto loss_fn = [&]() {
    const Tensor logits = EncoderForward(cfg, params, frames, nullptr);
    double s = 0.0;
    for (int64_t i = 0; i < logits.NumElements(); ++i) s += logits(i);
    return s;
  };

  EncoderCache cache;
  const Tensor logits = EncoderForward(cfg, params, frames, &cache);
  Tensor ones(logits.Dims());
  ones.Fill(1.0);
  ParamMap grads = ZerosLike(params);
  EncoderBackward(cfg, params, cache, ones, &grads);

  CHECK(MaxParamGradError(loss_fn, &params, grads, 1e-4) < 1e-4);
}

TEST_CASE("decoder basics: zero params, empty labels, token range checks") {
  DecoderConfig cfg{3, 1, 4, 5, 0.0};
  ParamMap params = InitDecoderParams(cfg, 4);

  ParamMap zeros = params;
  for (auto& [name, t] : zeros) t.Fill(0.0);
  const Tensor z = DecoderForward(cfg, zeros, {1, 2}, nullptr, nullptr);
  CHECK(z.Dim(0) == 3);
  for (int64_t i = 0; i < z.NumElements(); ++i) CHECK(z(i) == 0.0);

  const Tensor start_only = DecoderForward(cfg, params, {}, nullptr, nullptr);
  CHECK(start_only.Dim(0) == 1);
  CHECK(start_only.Dim(1) == 5);

  CHECK_THROWS_AS(DecoderForward(cfg, params, {4}, nullptr, nullptr),
                  std::invalid_argument);  // blank index is not embeddable
  CHECK_THROWS_AS(DecoderForward(cfg, params, {-1}, nullptr, nullptr),
                  std::invalid_argument);
}

TEST_CASE("decoder gradient matches finite differences") {
  Rng rng(35);
  DecoderConfig cfg{3, 1, 4, 5, 0.0};
  ParamMap params = InitDecoderParams(cfg, 5);
  const std::vector<int32_t> tokens = {2, 0, 3};

  Tensor obj_w({4, 5});
  for (int64_t i = 0; i < obj_w.NumElements(); ++i) obj_w(i) = rng.Uniform(-1, 1);

  auto loss_fn = [&]() {
    const Tensor logits = DecoderForward(cfg, params, tokens, nullptr, nullptr);
    double s = 0.0;
    for (int64_t i = 0; i < logits.NumElements(); ++i) s += obj_w(i) * logits(i);
    return s;
  };

  DecoderCache cache;
  DecoderForward(cfg, params, tokens, &cache, nullptr);
  ParamMap grads = ZerosLike(params);
  DecoderBackward(cfg, params, cache, tokens, obj_w, &grads);

  CHECK(MaxParamGradError(loss_fn, &params, grads, 1e-4) < 1e-4);
}

TEST_CASE("joint adds then squashes: identities and range") {
  Rng rng(36);
  Tensor enc({3, 4}), dec({2, 4});
  for (int64_t i = 0; i < enc.NumElements(); ++i) enc(i) = rng.Uniform(-2, 2);

  const Tensor with_zero_dec = JointForward(enc, dec);
  for (int64_t t = 0; t < 3; ++t) {
    for (int64_t u = 0; u < 2; ++u) {
      for (int64_t k = 0; k < 4; ++k)
        CHECK(with_zero_dec(t, u, k) == doctest::Approx(std::tanh(enc(t, k))));
    }
  }

  Tensor spiked = enc;
  spiked(0, 0) = 20.0;
  const Tensor saturated = JointForward(spiked, dec);
  CHECK(saturated(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-9));

  for (int64_t i = 0; i < dec.NumElements(); ++i) dec(i) = rng.Uniform(-2, 2);
  const Tensor a = JointForward(enc, dec);
  for (int64_t i = 0; i < a.NumElements(); ++i) {
    CHECK(a(i) > -1.0);
    CHECK(a(i) < 1.0);
  }

  // Swapping enc[t,k] and dec[u,k] leaves out[t,u,k] unchanged.
  Tensor enc_swapped = enc, dec_swapped = dec;
  std::swap(enc_swapped(1, 2), dec_swapped(1, 2));
  const Tensor b = JointForward(enc_swapped, dec_swapped);
  CHECK(a(1, 1, 2) == doctest::Approx(b(1, 1, 2)).epsilon(1e-12));

  Tensor mismatched({2, 3});
  CHECK_THROWS_AS(JointForward(enc, mismatched), std::invalid_argument);
}

TEST_CASE("zero-parameter model reproduces the uniform-lattice loss") {
  EncoderConfig enc_cfg{1, 3, 2, 0, 2, 3};
  DecoderConfig dec_cfg{2, 1, 3, 3, 0.0};
  ParamMap enc = InitEncoderParams(enc_cfg, 6);
  ParamMap dec = InitDecoderParams(dec_cfg, 7);
  for (auto& [name, t] : enc) t.Fill(0.0);
  for (auto& [name, t] : dec) t.Fill(0.0);

  Tensor frames({2, 2});
  frames.Fill(0.5);
  UtteranceForward fwd =
      ModelForward(enc_cfg, dec_cfg, enc, dec, frames, {0}, false, nullptr);
  for (int64_t i = 0; i < fwd.lattice.logits.NumElements(); ++i)
    CHECK(fwd.lattice.logits(i) == 0.0);
  // Uniform over three symbols => two alignment paths of three edges.
  CHECK(fwd.loss == doctest::Approx(std::log(27.0 / 2.0)).epsilon(1e-12));
}

TEST_CASE("teacher and student produce the same reduced length") {
  EncoderConfig student{2, 4, 3, 1, 2, 5};
  EncoderConfig teacher{3, 6, 3, 2, 2, 5};
  for (int64_t t_len : {1, 2, 7, 10, 11}) {
    CHECK(student.ReducedLength(t_len) == teacher.ReducedLength(t_len));
  }
  Rng rng(37);
  const Tensor frames = RandomFrames(&rng, 7, 3);
  const Tensor s = EncoderForward(student, InitEncoderParams(student, 8), frames, nullptr);
  const Tensor t = EncoderForward(teacher, InitEncoderParams(teacher, 9), frames, nullptr);
  CHECK(s.Dim(0) == t.Dim(0));
}

TEST_CASE("end-to-end transducer gradients match finite differences") {
  Rng rng(38);
  EncoderConfig enc_cfg{2, 5, 3, 1, 2, 4};
  DecoderConfig dec_cfg{3, 1, 4, 4, 0.0};
  ParamMap enc = InitEncoderParams(enc_cfg, 10);
  ParamMap dec = InitDecoderParams(dec_cfg, 11);
  const Tensor frames = RandomFrames(&rng, 6, 3);
  const std::vector<int32_t> tokens = {1, 2};

  auto loss_fn = [&]() {
    return ModelForward(enc_cfg, dec_cfg, enc, dec, frames, tokens, false, nullptr).loss;
  };

  UtteranceForward fwd =
      ModelForward(enc_cfg, dec_cfg, enc, dec, frames, tokens, true, nullptr);
  Tensor grad_enc, grad_dec;
  JointBackward(fwd.lattice.logits, fwd.lattice.grad_logits, &grad_enc, &grad_dec);
  ParamMap enc_grads = ZerosLike(enc);
  ParamMap dec_grads = ZerosLike(dec);
  ModelBackward(enc_cfg, dec_cfg, enc, dec, fwd, grad_enc, grad_dec, &enc_grads,
                &dec_grads);

  CHECK(MaxParamGradError(loss_fn, &enc, enc_grads, 1e-4) < 1e-4);
  CHECK(MaxParamGradError(loss_fn, &dec, dec_grads, 1e-4) < 1e-4);
}

TEST_CASE("decoder dropout: off at eval, unbiased scaling in training") {
  DecoderConfig cfg{3, 1, 6, 5, 0.5};
  ParamMap params = InitDecoderParams(cfg, 12);
  const std::vector<int32_t> tokens = {1, 2, 3};

  // No rng => identical to a dropout-free config.
  DecoderConfig no_drop = cfg;
  no_drop.dropout = 0.0;
  const Tensor eval_out = DecoderForward(cfg, params, tokens, nullptr, nullptr);
  const Tensor plain = DecoderForward(no_drop, params, tokens, nullptr, nullptr);
  for (int64_t i = 0; i < eval_out.NumElements(); ++i) CHECK(eval_out(i) == plain(i));

  // With an rng the mask hits some units and rescales the rest.
  Rng rng(39);
  DecoderCache cache;
  DecoderForward(cfg, params, tokens, &cache, &rng);
  bool saw_zero = false, saw_scaled = false;
  for (int64_t i = 0; i < cache.dropout_mask.NumElements(); ++i) {
    if (cache.dropout_mask(i) == 0.0) saw_zero = true;
    if (cache.dropout_mask(i) == 2.0) saw_scaled = true;  // 1/(1-0.5)
  }
  CHECK(saw_zero);
  CHECK(saw_scaled);
}

TEST_CASE("parameter initialization is deterministic and bounded") {
  EncoderConfig cfg{2, 4, 3, 1, 2, 5};
  const ParamMap a = InitEncoderParams(cfg, 123);
  const ParamMap b = InitEncoderParams(cfg, 123);
  const ParamMap c = InitEncoderParams(cfg, 124);

  bool any_diff = false;
  for (const auto& [name, t] : a) {
    const Tensor& tb = b.at(name);
    const Tensor& tc = c.at(name);
    for (int64_t i = 0; i < t.NumElements(); ++i) {
      CHECK(t(i) == tb(i));  // bit-identical across runs
      if (t(i) != tc(i)) any_diff = true;
      CHECK(std::abs(t(i)) <= 1.0);  // max(1/sqrt(fan_in), forget bias)
    }
  }
  CHECK(any_diff);

  // Forget-gate bias block is exactly one.
  const Tensor& bias = a.at("layer0.b");
  for (int64_t j = 0; j < 4; ++j) {
    CHECK(bias(4 + j) == 1.0);
    CHECK(bias(j) == 0.0);
  }
}

TEST_CASE("model forward is deterministic") {
  Rng rng(40);
  EncoderConfig enc_cfg{2, 4, 3, 1, 2, 4};
  DecoderConfig dec_cfg{3, 1, 4, 4, 0.0};
  const ParamMap enc = InitEncoderParams(enc_cfg, 13);
  const ParamMap dec = InitDecoderParams(dec_cfg, 14);
  const Tensor frames = RandomFrames(&rng, 5, 3);
  const std::vector<int32_t> tokens = {0, 2};

  UtteranceForward a =
      ModelForward(enc_cfg, dec_cfg, enc, dec, frames, tokens, false, nullptr);
  UtteranceForward b =
      ModelForward(enc_cfg, dec_cfg, enc, dec, frames, tokens, false, nullptr);
  CHECK(a.loss == b.loss);
  for (int64_t i = 0; i < a.lattice.logits.NumElements(); ++i)
    CHECK(a.lattice.logits(i) == b.lattice.logits(i));
}
