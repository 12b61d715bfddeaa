// core/checkpoint.cc

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

#include "core/checkpoint.h"

#include <fstream>
#include <stdexcept>

namespace codert {

namespace {

constexpr char kMagic[4] = {'C', 'D', 'R', 'T'};
constexpr uint32_t kVersion = 1;
constexpr uint8_t kDtypeF32 = 0;

template <typename T>
void WriteRaw(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T ReadRaw(std::ifstream& in, const char* what) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error(std::string("checkpoint truncated at ") + what);
  return value;
}

}  // namespace

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);

  out.write(kMagic, 4);
  WriteRaw(out, kVersion);
  WriteRaw(out, ckpt.step);
  WriteRaw(out, static_cast<uint32_t>(ckpt.config_json.size()));
  out.write(ckpt.config_json.data(),
            static_cast<std::streamsize>(ckpt.config_json.size()));

  WriteRaw(out, static_cast<uint32_t>(ckpt.tensors.size()));
  for (const auto& [name, tensor] : ckpt.tensors) {
    if (name.size() > 0xffff) throw std::invalid_argument("tensor name too long");
    WriteRaw(out, static_cast<uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    WriteRaw(out, kDtypeF32);
    WriteRaw(out, static_cast<uint8_t>(tensor.NumDims()));
    for (int64_t d = 0; d < tensor.NumDims(); ++d)
      WriteRaw(out, static_cast<uint32_t>(tensor.Dim(d)));
    for (int64_t i = 0; i < tensor.NumElements(); ++i)
      WriteRaw(out, static_cast<float>(tensor(i)));
  }
  if (!out) throw std::runtime_error("write failure on checkpoint " + path);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || magic[0] != kMagic[0] || magic[1] != kMagic[1] || magic[2] != kMagic[2] ||
      magic[3] != kMagic[3])
    throw std::runtime_error("bad checkpoint magic in " + path);

  Checkpoint ckpt;
  ckpt.version = ReadRaw<uint32_t>(in, "version");
  if (ckpt.version != kVersion)
    throw std::runtime_error("unsupported checkpoint version in " + path);
  ckpt.step = ReadRaw<uint64_t>(in, "step");

  const uint32_t config_len = ReadRaw<uint32_t>(in, "config length");
  ckpt.config_json.resize(config_len);
  in.read(ckpt.config_json.data(), config_len);
  if (!in) throw std::runtime_error("checkpoint truncated at config blob");

  const uint32_t count = ReadRaw<uint32_t>(in, "tensor count");
  for (uint32_t i = 0; i < count; ++i) {
    const uint16_t name_len = ReadRaw<uint16_t>(in, "tensor name length");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (!in) throw std::runtime_error("checkpoint truncated at tensor name");
    const uint8_t dtype = ReadRaw<uint8_t>(in, "dtype");
    if (dtype != kDtypeF32) throw std::runtime_error("unsupported tensor dtype");
    const uint8_t rank = ReadRaw<uint8_t>(in, "rank");
    std::vector<int64_t> dims(rank);
    for (auto& d : dims) d = ReadRaw<uint32_t>(in, "dim");
    Tensor tensor(dims);
    for (int64_t e = 0; e < tensor.NumElements(); ++e)
      tensor(e) = static_cast<double>(ReadRaw<float>(in, "payload"));
    ckpt.tensors.emplace(std::move(name), std::move(tensor));
  }
  return ckpt;
}

void AddTensors(Checkpoint* ckpt, const std::string& prefix, const ParamMap& params) {
  for (const auto& [name, tensor] : params) ckpt->tensors[prefix + "." + name] = tensor;
}

ParamMap ExtractTensors(const Checkpoint& ckpt, const std::string& prefix) {
  ParamMap params;
  const std::string full_prefix = prefix + ".";
  for (const auto& [name, tensor] : ckpt.tensors) {
    if (name.rfind(full_prefix, 0) == 0)
      params[name.substr(full_prefix.size())] = tensor;
  }
  return params;
}

}  // namespace codert
