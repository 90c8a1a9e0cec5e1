// Copyright 2026 The dslrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dslrec/checkpoint.h"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "dslrec/config.h"

namespace dslrec {
namespace {

void WriteFloat64(const std::filesystem::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  std::array<char, 8> bytes{};
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    out.write(bytes.data(), bytes.size());
  }
}

void ReadFloat64(const std::filesystem::path& path, std::span<double> values) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::array<unsigned char, 8> bytes{};
  for (double& v : values) {
    if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
      throw Error("truncated array " + path.string());
    }
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    v = std::bit_cast<double>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error("array larger than its recorded shape: " + path.string());
  }
}

}  // namespace

void SaveCheckpoint(const std::filesystem::path& dir, const ModelState& state,
                    const TrainConfig& config) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream shape(dir / "shape");
    if (!shape) throw Error("cannot write checkpoint shape in " + dir.string());
    shape << "num_users=" << state.num_users() << '\n'
          << "num_items=" << state.num_items() << '\n'
          << "dim=" << state.dim() << '\n'
          << "layers=" << state.options.layers << '\n';
  }
  WriteFloat64(dir / "E_u", state.user_embeddings.values());
  WriteFloat64(dir / "E_v", state.item_embeddings.values());
  WriteFloat64(dir / "T", state.projection.transform.values());
  WriteFloat64(dir / "w", state.projection.weights);
  WriteFloat64(dir / "c", state.projection.bias);
  std::ofstream(dir / "config") << FormatTrainConfig(config);
}

Checkpoint LoadCheckpoint(const std::filesystem::path& dir) {
  std::map<std::string, std::string> shape;
  for (auto& [k, v] : ReadKeyValueFile(dir / "shape")) shape[k] = v;
  for (const char* key : {"num_users", "num_items", "dim", "layers"}) {
    if (!shape.count(key)) throw Error(std::string("checkpoint shape lacks ") + key);
  }
  Checkpoint ckpt;
  for (auto& [k, v] : ReadKeyValueFile(dir / "config")) {
    if (!ApplyTrainSetting(ckpt.config, k, v)) {
      throw Error("unknown key in checkpoint config: " + k);
    }
  }
  const int num_users = std::stoi(shape["num_users"]);
  const int num_items = std::stoi(shape["num_items"]);
  const int dim = std::stoi(shape["dim"]);
  ModelOptions options = ckpt.config.ToModelOptions();
  options.layers = std::stoi(shape["layers"]);
  if (dim != ckpt.config.dim) throw Error("checkpoint dim disagrees with its config");
  ckpt.state = InitModel(num_users, num_items, dim, 0, options);
  ReadFloat64(dir / "E_u", ckpt.state.user_embeddings.values());
  ReadFloat64(dir / "E_v", ckpt.state.item_embeddings.values());
  ReadFloat64(dir / "T", ckpt.state.projection.transform.values());
  ReadFloat64(dir / "w", ckpt.state.projection.weights);
  ReadFloat64(dir / "c", ckpt.state.projection.bias);
  return ckpt;
}

}  // namespace dslrec
