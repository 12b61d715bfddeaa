// tests/test_lattice.cc

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

#include "core/transducer-lattice.h"

#include <cmath>

#include "core/numerics.h"
#include "core/rng.h"
#include "doctest.h"
#include "testing/test-util.h"

using namespace codert;
using codert::testing::GuardedRelError;
using codert::testing::RandomLabels;
using codert::testing::RandomLattice;

TEST_CASE("single frame, empty labels: loss is the blank log-probability") {
  Rng rng(1);
  JointLattice lat = RandomLattice(&rng, 1, 1, 4);
  LabelSequence labels{{}, 3};
  const double loss = TransducerLoss(&lat, labels);
  const std::vector<double> lp = Softmax(lat.logits.Row(0, 0));
  CHECK(loss == doctest::Approx(-std::log(lp[3])).epsilon(1e-12));
}

TEST_CASE("single frame, one label: the unique path is emit then blank") {
  Rng rng(2);
  JointLattice lat = RandomLattice(&rng, 1, 2, 4);
  LabelSequence labels{{1}, 3};
  const double loss = TransducerLoss(&lat, labels);
  ComputeLogProbs(&lat);
  const double expected =
      -(lat.log_probs(0, 0, 1) + lat.log_probs(0, 1, 3));
  CHECK(loss == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("uniform 2x2x3 lattice: C(2,1)=2 paths, loss = ln(27/2)") {
  JointLattice lat = JointLattice::FromLogits(Tensor({2, 2, 3}));
  LabelSequence labels{{0}, 2};
  // All-equal logits: every edge has probability 1/3. A path interleaves
  // one emit with one frame advance and always ends with the terminal
  // blank, so there are C(T'+U-1, U) = 2 paths of three edges each:
  // P = 2/27 and loss = ln(27/2).
  const double expected = std::log(27.0 / 2.0);
  const double loss = TransducerLoss(&lat, labels);
  CHECK(loss == doctest::Approx(expected).epsilon(1e-12));

  int64_t paths = 0;
  const double oracle = BruteForceLoss(lat, labels, &paths);
  CHECK(paths == 2);
  CHECK(oracle == doctest::Approx(loss).epsilon(1e-12));

  BackwardBetas(&lat, labels);
  CHECK(lat.beta(0, 0) == doctest::Approx(-expected).epsilon(1e-12));
}

TEST_CASE("terminal beta equals the final blank log-probability") {
  Rng rng(3);
  JointLattice lat = RandomLattice(&rng, 3, 3, 4);
  LabelSequence labels{{0, 2}, 3};
  BackwardBetas(&lat, labels);
  CHECK(lat.beta(2, 2) == doctest::Approx(lat.log_probs(2, 2, 3)).epsilon(1e-12));
}

TEST_CASE("forward and backward totals agree on random lattices") {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const int64_t t_len = rng.NextInt(1, 5);
    const int64_t u_max = rng.NextInt(0, 3);
    const int64_t vocab = rng.NextInt(2, 5);
    JointLattice lat = RandomLattice(&rng, t_len, u_max + 1, vocab);
    LabelSequence labels = RandomLabels(&rng, u_max, vocab);
    const double ll_forward = ForwardAlphas(&lat, labels);
    const double ll_backward = BackwardBetas(&lat, labels);
    CHECK(std::abs(ll_forward - ll_backward) < 1e-6);
  }
}

TEST_CASE("anti-diagonal alpha+beta cuts reproduce the total log-likelihood") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int64_t t_len = rng.NextInt(2, 5);
    const int64_t u_max = rng.NextInt(1, 3);
    const int64_t vocab = rng.NextInt(2, 5);
    JointLattice lat = RandomLattice(&rng, t_len, u_max + 1, vocab);
    LabelSequence labels = RandomLabels(&rng, u_max, vocab);
    const double ll = ForwardAlphas(&lat, labels);
    BackwardBetas(&lat, labels);

    // Path mass crossing any anti-diagonal {(t,u): t+u = c} sums to the
    // total likelihood; alpha+beta counts the node's full path mass.
    for (int64_t cut = 0; cut < t_len; ++cut) {
      double mass = -std::numeric_limits<double>::infinity();
      for (int64_t t = 0; t <= cut; ++t) {
        const int64_t u = cut - t;
        if (u > u_max) continue;
        mass = LogAdd(mass, lat.alpha(t, u) + lat.beta(t, u));
      }
      CHECK(std::abs(mass - ll) < 1e-5);
    }
  }
}

TEST_CASE("transducer loss equals the exhaustive-path oracle") {
  Rng rng(6);
  int64_t max_paths = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int64_t t_len = rng.NextInt(1, 4);
    const int64_t u_max = rng.NextInt(0, 3);
    const int64_t vocab = rng.NextInt(2, 4);
    JointLattice lat = RandomLattice(&rng, t_len, u_max + 1, vocab);
    LabelSequence labels = RandomLabels(&rng, u_max, vocab);
    const double loss = TransducerLoss(&lat, labels);
    CHECK(loss >= 0.0);
    int64_t paths = 0;
    const double oracle = BruteForceLoss(lat, labels, &paths);
    max_paths = std::max(max_paths, paths);
    CHECK(std::abs(loss - oracle) < 1e-6);

    // C(T'+U-1, U) interleavings.
    auto choose = [](int64_t n, int64_t k) {
      double c = 1.0;
      for (int64_t i = 1; i <= k; ++i)
        c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
      return static_cast<int64_t>(std::llround(c));
    };
    CHECK(paths == choose(t_len + u_max - 1, u_max));
  }
  CHECK(max_paths > 1);
}

TEST_CASE("peaked logits on the unique path drive the loss to zero") {
  // T'=2, U=1: boost the path emit(0,0) -> blank(0,1)... all three paths
  // by making label logits dominate at u=0 and blank at u=1.
  JointLattice lat = JointLattice::FromLogits(Tensor({2, 2, 3}));
  LabelSequence labels{{1}, 2};
  for (int64_t t = 0; t < 2; ++t) {
    lat.logits(t, 0, 1) = 20.0;  // emit the label
    lat.logits(t, 1, 2) = 20.0;  // then blank out
  }
  const double loss = TransducerLoss(&lat, labels);
  CHECK(loss < 1e-3);
  const double oracle = BruteForceLoss(lat, labels);
  CHECK(std::abs(loss - oracle) < 1e-6);
}

TEST_CASE("brute force oracle enforces its size guard") {
  JointLattice lat = JointLattice::FromLogits(Tensor({7, 1, 3}));
  LabelSequence labels{{}, 2};
  ComputeLogProbs(&lat);
  CHECK_THROWS_WITH_AS(BruteForceLoss(lat, labels), "oracle size limit",
                       std::runtime_error);
}

TEST_CASE("lattice rejects empty time axis and bad labels") {
  JointLattice empty_time = JointLattice::FromLogits(Tensor({0, 1, 3}));
  LabelSequence no_labels{{}, 2};
  CHECK_THROWS_AS(TransducerLoss(&empty_time, no_labels), std::invalid_argument);

  JointLattice lat = JointLattice::FromLogits(Tensor({2, 2, 3}));
  LabelSequence blank_as_label{{2}, 2};  // token equals blank
  CHECK_THROWS_AS(TransducerLoss(&lat, blank_as_label), std::invalid_argument);
}

TEST_CASE("gradient rows sum to zero (softmax shift invariance)") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int64_t t_len = rng.NextInt(1, 4);
    const int64_t u_max = rng.NextInt(0, 3);
    const int64_t vocab = rng.NextInt(2, 5);
    JointLattice lat = RandomLattice(&rng, t_len, u_max + 1, vocab);
    LabelSequence labels = RandomLabels(&rng, u_max, vocab);
    TransducerLossWithGrad(&lat, labels);
    for (int64_t t = 0; t < t_len; ++t) {
      for (int64_t u = 0; u <= u_max; ++u) {
        double row_sum = 0.0;
        for (int64_t v = 0; v < vocab; ++v) row_sum += lat.grad_logits(t, u, v);
        CHECK(std::abs(row_sum) < 1e-5);
      }
    }
  }
}

TEST_CASE("loss is invariant to a constant shift of one logit slice") {
  Rng rng(9);
  JointLattice lat = RandomLattice(&rng, 3, 3, 4);
  LabelSequence labels{{1, 0}, 3};
  const double base = TransducerLoss(&lat, labels);
  for (int64_t v = 0; v < 4; ++v) lat.logits(1, 1, v) += 7.25;
  lat.log_probs = Tensor();  // force recomputation
  const double shifted = TransducerLoss(&lat, labels);
  CHECK(shifted == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("single node gradient is softmax minus one-hot blank") {
  Rng rng(10);
  JointLattice lat = RandomLattice(&rng, 1, 1, 5);
  LabelSequence labels{{}, 4};
  TransducerLossWithGrad(&lat, labels);
  const std::vector<double> probs = Softmax(lat.logits.Row(0, 0));
  for (int64_t v = 0; v < 5; ++v) {
    const double expected = probs[static_cast<size_t>(v)] - (v == 4 ? 1.0 : 0.0);
    CHECK(lat.grad_logits(0, 0, v) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("analytic lattice gradients match central finite differences") {
  Rng rng(12);
  double worst = 0.0;
  const double h = 1e-3;
  for (int trial = 0; trial < 60; ++trial) {
    const int64_t t_len = rng.NextInt(1, 3);
    const int64_t u_max = rng.NextInt(0, 2);
    const int64_t vocab = rng.NextInt(2, 4);
    JointLattice lat = RandomLattice(&rng, t_len, u_max + 1, vocab);
    LabelSequence labels = RandomLabels(&rng, u_max, vocab);
    TransducerLossWithGrad(&lat, labels);

    for (int64_t i = 0; i < lat.logits.NumElements(); ++i) {
      JointLattice plus = JointLattice::FromLogits(lat.logits);
      plus.logits(i) += h;
      JointLattice minus = JointLattice::FromLogits(lat.logits);
      minus.logits(i) -= h;
      const double fd =
          (TransducerLoss(&plus, labels) - TransducerLoss(&minus, labels)) / (2 * h);
      worst = std::max(worst, GuardedRelError(lat.grad_logits(i), fd));
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("3x3x4 random lattice gradient vs finite differences (spec case)") {
  Rng rng(14);
  JointLattice lat = RandomLattice(&rng, 3, 3, 4);
  LabelSequence labels = RandomLabels(&rng, 2, 4);
  TransducerLossWithGrad(&lat, labels);
  const double h = 1e-3;
  double worst = 0.0;
  for (int64_t i = 0; i < lat.logits.NumElements(); ++i) {
    JointLattice plus = JointLattice::FromLogits(lat.logits);
    plus.logits(i) += h;
    JointLattice minus = JointLattice::FromLogits(lat.logits);
    minus.logits(i) -= h;
    const double fd =
        (TransducerLoss(&plus, labels) - TransducerLoss(&minus, labels)) / (2 * h);
    worst = std::max(worst, GuardedRelError(lat.grad_logits(i), fd));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("log_probs slices are normalized") {
  Rng rng(15);
  JointLattice lat = RandomLattice(&rng, 2, 3, 5);
  ComputeLogProbs(&lat);
  for (int64_t t = 0; t < 2; ++t) {
    for (int64_t u = 0; u < 3; ++u) {
      double sum = 0.0;
      for (int64_t v = 0; v < 5; ++v) sum += std::exp(lat.log_probs(t, u, v));
      CHECK(std::abs(sum - 1.0) < 1e-5);
    }
  }
}
