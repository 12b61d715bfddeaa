// core/checkpoint.h

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

#ifndef CODERT_CORE_CHECKPOINT_H_
#define CODERT_CORE_CHECKPOINT_H_

#include <cstdint>
#include <map>
#include <string>

#include "core/tensor.h"

namespace codert {

// Binary checkpoint, little-endian throughout:
//   magic "CDRT" | u32 version=1 | u64 step | u32 config length | config
//   JSON (UTF-8) | u32 tensor count | per tensor: u16 name length, name,
//   u8 dtype (0 = f32), u8 rank, u32 dims[rank], f32 payload.
// Values narrow to f32 on save, so save -> load -> save is byte-stable.
struct Checkpoint {
  uint32_t version = 1;
  uint64_t step = 0;
  std::string config_json;
  std::map<std::string, Tensor> tensors;
};

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::string& path);

// Flattens a parameter map into the checkpoint namespace: "<prefix>.<name>".
void AddTensors(Checkpoint* ckpt, const std::string& prefix, const ParamMap& params);
// Extracts "<prefix>.*" back into a parameter map (prefix stripped).
ParamMap ExtractTensors(const Checkpoint& ckpt, const std::string& prefix);

}  // namespace codert

#endif  // CODERT_CORE_CHECKPOINT_H_
