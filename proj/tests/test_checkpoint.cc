// tests/test_checkpoint.cc

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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/network.h"
#include "core/rng.h"
#include "core/train-config.h"
#include "doctest.h"

using namespace codert;

namespace {

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Checkpoint SampleCheckpoint() {
  Checkpoint ckpt;
  ckpt.step = 1234;
  TrainConfig config;
  config.vocab_size = 6;
  config.input_dim = 4;
  ckpt.config_json = config.ToJson();
  EncoderConfig enc_cfg{2, 4, 4, 1, 2, 7};
  AddTensors(&ckpt, "student_encoder", InitEncoderParams(enc_cfg, 3));
  DecoderConfig dec_cfg{3, 1, 4, 7, 0.0};
  AddTensors(&ckpt, "decoder", InitDecoderParams(dec_cfg, 4));
  return ckpt;
}

}  // namespace

TEST_CASE("checkpoint round trip: save, load, save is byte-identical") {
  const Checkpoint ckpt = SampleCheckpoint();
  const std::string p1 = "/tmp/codert_ckpt_a.cdrt";
  const std::string p2 = "/tmp/codert_ckpt_b.cdrt";
  SaveCheckpoint(p1, ckpt);
  const Checkpoint loaded = LoadCheckpoint(p1);
  CHECK(loaded.step == ckpt.step);
  CHECK(loaded.config_json == ckpt.config_json);
  REQUIRE(loaded.tensors.size() == ckpt.tensors.size());

  SaveCheckpoint(p2, loaded);
  CHECK(Slurp(p1) == Slurp(p2));

  // Loaded values equal the f32 narrowing of the originals.
  for (const auto& [name, tensor] : ckpt.tensors) {
    const Tensor& back = loaded.tensors.at(name);
    REQUIRE(back.Dims() == tensor.Dims());
    for (int64_t i = 0; i < tensor.NumElements(); ++i)
      CHECK(back(i) == static_cast<double>(static_cast<float>(tensor(i))));
  }
}

TEST_CASE("checkpoint header begins with the CDRT magic") {
  const std::string path = "/tmp/codert_ckpt_magic.cdrt";
  SaveCheckpoint(path, SampleCheckpoint());
  const std::string bytes = Slurp(path);
  REQUIRE(bytes.size() > 8);
  CHECK(bytes.substr(0, 4) == "CDRT");
  // u32 version = 1 little-endian.
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);
  CHECK(static_cast<unsigned char>(bytes[5]) == 0);
}

TEST_CASE("corrupt magic is rejected") {
  const std::string path = "/tmp/codert_ckpt_bad.cdrt";
  SaveCheckpoint(path, SampleCheckpoint());
  std::string bytes = Slurp(path);
  bytes[0] = 'X';
  std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
  CHECK_THROWS_AS(LoadCheckpoint(path), std::runtime_error);
}

TEST_CASE("unsupported version is rejected") {
  const std::string path = "/tmp/codert_ckpt_ver.cdrt";
  SaveCheckpoint(path, SampleCheckpoint());
  std::string bytes = Slurp(path);
  bytes[4] = 9;
  std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
  CHECK_THROWS_AS(LoadCheckpoint(path), std::runtime_error);
}

TEST_CASE("truncated checkpoints are rejected") {
  const std::string path = "/tmp/codert_ckpt_trunc.cdrt";
  SaveCheckpoint(path, SampleCheckpoint());
  const std::string bytes = Slurp(path);
  for (size_t cut : {size_t{3}, size_t{10}, bytes.size() / 2, bytes.size() - 3}) {
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes.substr(0, cut);
    CHECK_THROWS_AS(LoadCheckpoint(path), std::runtime_error);
  }
}

TEST_CASE("missing file is an error") {
  CHECK_THROWS_AS(LoadCheckpoint("/tmp/does_not_exist_codert.cdrt"), std::runtime_error);
}

TEST_CASE("prefix extraction recovers parameter maps") {
  const Checkpoint ckpt = SampleCheckpoint();
  const ParamMap enc = ExtractTensors(ckpt, "student_encoder");
  CHECK(enc.count("layer0.W") == 1);
  CHECK(enc.count("proj.W") == 1);
  const ParamMap none = ExtractTensors(ckpt, "teacher_encoder");
  CHECK(none.empty());
}

TEST_CASE("train config json round trips losslessly") {
  TrainConfig config;
  config.mode = "colearn";
  config.lambda = 0.25;
  config.top_k = 7;
  config.max_steps = 1234;
  config.lr.peak = 3.25e-3;
  config.data_seed = 99;
  config.teacher_checkpoint = "somewhere.cdrt";
  const std::string json = config.ToJson();
  const TrainConfig back = TrainConfig::FromJson(json);
  CHECK(back.ToJson() == json);
  CHECK(back.lambda == 0.25);
  CHECK(back.top_k == 7);
  CHECK(back.lr.peak == 3.25e-3);

  CHECK_THROWS_AS(TrainConfig::FromJson("{oops"), std::invalid_argument);
}

TEST_CASE("train config validation rejects bad combinations") {
  TrainConfig config;
  config.mode = "static";
  config.teacher_checkpoint = "";
  CHECK_THROWS_AS(config.Validate(), std::invalid_argument);

  config = TrainConfig();
  config.mode = "nonsense";
  CHECK_THROWS_AS(config.Validate(), std::invalid_argument);

  config = TrainConfig();
  config.lambda = -0.5;
  CHECK_THROWS_AS(config.Validate(), std::invalid_argument);

  config = TrainConfig();
  config.lr.warmup_start = 1e-2;  // above peak
  CHECK_THROWS_AS(config.Validate(), std::invalid_argument);
}
