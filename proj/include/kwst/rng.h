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

#ifndef KWST_RNG_H_
#define KWST_RNG_H_

#include <cstdint>
#include <string>

namespace kwst {

// 64-bit FNV-1a. Used both for rng key derivation and for the content
// digests recorded by the training loop and tests.
class Fnv1a {
 public:
  void update(const void* data, std::size_t len);
  void update_u64(std::uint64_t v);
  void update_string(const std::string& s);
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

std::uint64_t digest_bytes(const void* data, std::size_t len);
std::string to_hex(std::uint64_t v);

// Derives the rng key for one (seed, utterance, epoch) draw. Distinct tags
// keep independent consumers (noise synthesis, masking, shuffling) on
// disjoint streams.
std::uint64_t derive_key(std::uint64_t seed, const std::string& tag,
                         std::uint64_t a = 0, std::uint64_t b = 0);

// Deterministic splitmix64 stream. All distribution transforms are written
// out explicitly so results are identical across platforms and standard
// libraries; std::uniform_*_distribution is implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : state_(key) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Standard normal via Box-Muller; second value of each pair is cached.
  double normal();

 private:
  std::uint64_t state_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace kwst

#endif  // KWST_RNG_H_
