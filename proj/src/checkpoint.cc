/* Copyright 2026 The KWST Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "kwst/checkpoint.h"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "kwst/error.h"

namespace kwst {

namespace {
constexpr char kMagic[4] = {'K', 'W', 'S', 'T'};
using nlohmann::json;
}  // namespace

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path) {
  if (ckpt.generation < 0) throw ValidationError("checkpoint: negative generation");
  ckpt.arch.validate();

  json shapes = json::array();
  for (const Matrix* m : ckpt.params.tensors()) shapes.push_back({m->rows(), m->cols()});
  const json header{{"generation", ckpt.generation},
                    {"arch_config", arch_to_json(ckpt.arch)},
                    {"training_config_hash", ckpt.training_config_hash},
                    {"shapes", shapes}};
  const std::string header_bytes = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out.write(kMagic, 4);
  const std::uint32_t version = ckpt.format_version;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const std::uint64_t header_len = header_bytes.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_bytes.data(), static_cast<std::streamsize>(header_bytes.size()));
  for (const Matrix* m : ckpt.params.tensors()) {
    out.write(reinterpret_cast<const char*>(m->data().data()),
              static_cast<std::streamsize>(m->data().size() * sizeof(double)));
  }
  if (!out) throw IoError("short write on checkpoint: " + path);
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("checkpoint: bad magic bytes in " + path);

  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || version != kCheckpointVersion)
    throw FormatError("checkpoint: unsupported format version in " + path);

  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  if (!in) throw CorruptionError("checkpoint: truncated header length in " + path);

  std::string header_bytes(header_len, '\0');
  in.read(header_bytes.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw CorruptionError("checkpoint: truncated header in " + path);

  json header;
  try {
    header = json::parse(header_bytes);
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: malformed header JSON: ") + e.what());
  }

  ModelCheckpoint ckpt;
  ckpt.format_version = version;
  try {
    ckpt.generation = header.at("generation").get<int>();
    ckpt.arch = arch_from_json(header.at("arch_config"));
    ckpt.training_config_hash = header.at("training_config_hash").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: missing header field: ") + e.what());
  }
  ckpt.params = make_params(ckpt.arch);

  const auto shapes = header.at("shapes");
  const auto tensors = ckpt.params.tensors();
  if (shapes.size() != tensors.size())
    throw CorruptionError("checkpoint: tensor count mismatch in " + path);
  std::uint64_t expected_doubles = 0;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const int r = shapes[i][0].get<int>(), c = shapes[i][1].get<int>();
    if (r != tensors[i]->rows() || c != tensors[i]->cols())
      throw CorruptionError("checkpoint: tensor shape mismatch in " + path);
    expected_doubles += static_cast<std::uint64_t>(r) * c;
  }

  std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (payload.size() != expected_doubles * sizeof(double))
    throw CorruptionError("checkpoint: payload length mismatch in " + path);

  std::size_t off = 0;
  for (Matrix* m : ckpt.params.tensors()) {
    std::memcpy(m->data().data(), payload.data() + off, m->size() * sizeof(double));
    off += m->size() * sizeof(double);
  }
  return ckpt;
}

}  // namespace kwst
