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

#ifndef KWST_CHECKPOINT_H_
#define KWST_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "kwst/model.h"

namespace kwst {

constexpr std::uint32_t kCheckpointVersion = 1;

// On-disk layout: magic "KWST", u32 version, u64 header length, JSON header
// (generation, arch_config, training_config_hash, per-tensor shapes in
// serialization order), then the raw little-endian 64-bit float payload.
struct ModelCheckpoint {
  std::uint32_t format_version = kCheckpointVersion;
  int generation = 0;
  ArchConfig arch;
  ModelParams params;
  std::string training_config_hash;
};

void save_checkpoint(const ModelCheckpoint& ckpt, const std::string& path);

// Bit-exact inverse of save_checkpoint. Bad magic or version raise
// FormatError; header/payload inconsistencies raise CorruptionError.
ModelCheckpoint load_checkpoint(const std::string& path);

}  // namespace kwst

#endif  // KWST_CHECKPOINT_H_
