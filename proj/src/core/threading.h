// core/threading.h

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

#ifndef CODERT_CORE_THREADING_H_
#define CODERT_CORE_THREADING_H_

#include <cstdint>
#include <functional>

namespace codert {

// Worker parallelism is capped by the CODERT_THREADS environment variable;
// without it the requested count stands (minimum 1). Results must never
// depend on the thread count: workers write to disjoint slots and all
// reductions happen afterwards in index order.
int32_t EffectiveThreads(int32_t requested);

// Runs fn(0..n-1), possibly concurrently. fn must only touch state owned
// by its index. Exceptions are rethrown on the calling thread.
void ParallelFor(int64_t n, int32_t threads, const std::function<void(int64_t)>& fn);

}  // namespace codert

#endif  // CODERT_CORE_THREADING_H_
