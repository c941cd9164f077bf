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

#ifndef KWST_AUDIO_H_
#define KWST_AUDIO_H_

#include <string>
#include <vector>

namespace kwst {

constexpr int kSampleRateHz = 16000;

// Mono PCM audio, amplitudes in [-1, 1], fixed 16 kHz.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = kSampleRateHz;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }

  // Throws ValidationError unless non-empty, 16 kHz and all samples finite.
  void validate() const;
};

// Mean square amplitude over [begin, end).
double mean_power(const AudioClip& clip, std::size_t begin, std::size_t end);

// SNR in dB between a clean component and a noise component of equal length.
// Signal power is measured over the active (nonzero) region of `clean`;
// noise power over the same region. Throws ValidationError when either
// component has zero energy there.
double measure_snr_db(const AudioClip& clean, const AudioClip& noise);

// Reads a RIFF/PCM WAV file. Only 16-bit little-endian mono 16 kHz is
// accepted; anything else is a FormatError (no resampling, no conversion).
AudioClip read_wav(const std::string& path);

// Writes 16-bit PCM mono 16 kHz. Samples are clipped to [-1, 1] and
// quantized with round-half-away-from-zero so output is deterministic.
void write_wav(const std::string& path, const AudioClip& clip);

}  // namespace kwst

#endif  // KWST_AUDIO_H_
