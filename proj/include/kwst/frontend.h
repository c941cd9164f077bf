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

#ifndef KWST_FRONTEND_H_
#define KWST_FRONTEND_H_

#include "kwst/audio.h"
#include "kwst/matrix.h"

namespace kwst {

// 25 ms / 10 ms framing at 16 kHz.
constexpr int kFrameLen = 400;
constexpr int kFrameHop = 160;
constexpr int kFftSize = 512;
constexpr int kNumMelBins = 40;
constexpr double kMelLowHz = 125.0;
constexpr double kMelHighHz = 7500.0;
constexpr double kLogFloor = 1e-10;

// Per-frame 40-d log spectral features. `frames` is T x 40.
struct Spectrogram {
  Matrix frames;

  int num_frames() const { return frames.rows(); }
  void validate() const;  // finite entries, 40 columns, T >= 1
};

// Number of frames produced for a clip of `num_samples` samples:
// 1 + floor((num_samples - 400) / 160). Throws on clips shorter than one frame.
int num_feature_frames(std::size_t num_samples);

// Log mel-filterbank energies without utterance normalization: per frame,
// Hann window, 512-point magnitude spectrum, 40 triangular mel filters over
// 125-7500 Hz, log(energy + 1e-10).
Matrix log_mel_energies(const AudioClip& clip);

// Full frontend: log_mel_energies followed by per-utterance mean
// normalization (the per-coefficient mean over frames is subtracted).
Spectrogram extract_features(const AudioClip& clip);

// Subtracts the per-column mean; exposed so batch evaluation and the
// streaming path can share one normalization definition in tests.
void mean_normalize(Matrix& features);

}  // namespace kwst

#endif  // KWST_FRONTEND_H_
