// core/selfcheck.h

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

#ifndef CODERT_CORE_SELFCHECK_H_
#define CODERT_CORE_SELFCHECK_H_

#include <ostream>
#include <string>
#include <vector>

namespace codert {

struct SelfCheckOptions {
  bool verbose = false;
  // Test hook: corrupts one analytic gradient before comparison so the
  // gradient suite must fail. Never set outside tests.
  bool inject_gradient_sign_flip = false;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Runs the embedded oracle suites (lattice vs exhaustive enumeration,
// finite-difference gradient checks, distillation identities, decoder
// equivalences, optimizer recursions) and prints one PASS/FAIL line per
// suite. Returns true iff everything passed; failing cases dump their
// inputs to the stream.
bool RunSelfCheck(std::ostream& out, const SelfCheckOptions& opts = {});

std::vector<SuiteResult> SelfCheckSuites(std::ostream& out, const SelfCheckOptions& opts);

}  // namespace codert

#endif  // CODERT_CORE_SELFCHECK_H_
