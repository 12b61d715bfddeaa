// tests/test_selfcheck.cc

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

#include "core/selfcheck.h"

#include <sstream>

#include "doctest.h"

using namespace codert;

TEST_CASE("a fresh build passes every embedded suite") {
  std::ostringstream out;
  CHECK(RunSelfCheck(out, {}));
  const std::string text = out.str();
  for (const char* suite :
       {"lattice_oracle", "lattice_gradient", "network_gradient", "distill_identities",
        "decode_equivalence", "optimizer_schedule"}) {
    CHECK(text.find(std::string(suite) + ": PASS") != std::string::npos);
  }
}

TEST_CASE("an injected gradient sign flip makes the gradient suite fail") {
  std::ostringstream out;
  SelfCheckOptions opts;
  opts.inject_gradient_sign_flip = true;
  CHECK_FALSE(RunSelfCheck(out, opts));
  const std::string text = out.str();
  CHECK(text.find("lattice_gradient: FAIL") != std::string::npos);
  // The failing case dumps its inputs.
  CHECK(text.find("logits:") != std::string::npos);
}
