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

#ifndef KWST_MODEL_H_
#define KWST_MODEL_H_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kwst/frontend.h"
#include "kwst/matrix.h"
#include "kwst/nn.h"

namespace kwst {

// Decoder class layout: column 0 = non-keyword, column 1 = keyword.
constexpr int kDecoderClasses = 2;
constexpr int kKeywordClass = 1;
constexpr int kNonKeywordClass = 0;

// Encoder-decoder stack: 4 + 3 SVDF layers and 2 + 1 projection layers.
// The encoder emits an N-class sound-unit distribution per frame; the decoder
// consumes those posteriors and emits the 2-class keyword distribution.
struct ArchConfig {
  int input_dim = kNumMelBins;
  std::vector<int> encoder_svdf_channels = {24, 24, 24, 24};
  std::vector<int> decoder_svdf_channels = {24, 24, 24};
  int svdf_kernel = 8;
  int encoder_hidden = 32;
  int encoder_classes = 4;  // N: blank, unit1, unit2, other

  void validate() const;
  std::size_t param_count() const;
  bool operator==(const ArchConfig&) const = default;
};

nlohmann::json arch_to_json(const ArchConfig& arch);
ArchConfig arch_from_json(const nlohmann::json& j);

// Tiny configuration used by gradient-check tests.
ArchConfig make_tiny_arch(int channels = 4, int kernel = 3, int classes = 3);

struct ModelParams {
  std::vector<SvdfParams> encoder_svdf;
  ProjParams encoder_proj_hidden;
  ProjParams encoder_proj_out;
  std::vector<SvdfParams> decoder_svdf;
  ProjParams decoder_proj;

  // All parameter tensors in the fixed serialization order.
  std::vector<const Matrix*> tensors() const;
  std::vector<Matrix*> tensors();

  std::size_t param_count() const;
  std::uint64_t digest() const;
};

// Zero-valued parameters with the shapes implied by `arch`.
ModelParams make_params(const ArchConfig& arch);

// Glorot-uniform weights, zero biases; deterministic in (arch, seed).
ModelParams init_params(const ArchConfig& arch, std::uint64_t seed);

void accumulate(ModelParams& into, const ModelParams& grads);
void scale_params(ModelParams& p, double factor);
void sgd_step(ModelParams& params, const ModelParams& grads, double lr);

std::vector<double> flatten_params(const ModelParams& p);
void unflatten_params(ModelParams& p, const std::vector<double>& flat);

struct ModelOutput {
  Matrix encoder_probs;  // T x N, row-stochastic
  Matrix decoder_probs;  // T x 2, row-stochastic
};

// Intermediates kept by forward() so backward() can run without recompute.
struct ForwardTrace {
  std::vector<Matrix> enc_inputs;       // input to each encoder svdf layer
  std::vector<SvdfCache> enc_caches;
  Matrix enc_hidden_in;                 // input to encoder_proj_hidden
  Matrix enc_out_in;                    // input to encoder_proj_out
  Matrix enc_probs;
  std::vector<Matrix> dec_inputs;       // input to each decoder svdf layer
  std::vector<SvdfCache> dec_caches;
  Matrix dec_proj_in;
  Matrix dec_probs;
};

// Batch inference on one utterance of already-normalized features.
ModelOutput forward(const Spectrogram& spec, const ModelParams& params, const ArchConfig& arch,
                    ForwardTrace* trace = nullptr);

// Decoder sub-stack alone, applied to injected encoder posteriors.
Matrix decoder_forward(const Matrix& encoder_probs, const ModelParams& params,
                       const ArchConfig& arch);

// Given dL/d(encoder_probs) and dL/d(decoder_probs), produces dL/dparams.
// The decoder path contributes to the encoder gradient through its input.
ModelParams backward(const ModelParams& params, const ArchConfig& arch, const ForwardTrace& trace,
                     const Matrix& d_encoder_probs, const Matrix& d_decoder_probs);

// Streaming inference state: one SVDF memory per layer plus the running
// feature-mean accumulator used in place of per-utterance normalization.
struct StreamState {
  std::vector<SvdfState> encoder_state;
  std::vector<SvdfState> decoder_state;
  bool normalize_input = true;
  std::vector<double> feature_sum;
  std::int64_t frames_seen = 0;
};

StreamState make_stream_state(const ModelParams& params, bool normalize_input = true);
void reset(StreamState& state);

// Feeds one 40-d feature frame; returns the per-frame distributions.
// With normalize_input the frame is first centered by the running mean over
// all frames seen so far (this one included).
void stream_step(const std::vector<double>& frame, StreamState& state, const ModelParams& params,
                 const ArchConfig& arch, std::vector<double>* encoder_dist,
                 std::vector<double>* decoder_dist);

}  // namespace kwst

#endif  // KWST_MODEL_H_
