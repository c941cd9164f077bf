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

#ifndef KWST_AUGMENT_H_
#define KWST_AUGMENT_H_

#include <cstdint>
#include <string>

#include <json.hpp>

#include "kwst/audio.h"
#include "kwst/frontend.h"

namespace kwst {

// Which model inputs receive spec masking during student training.
// kShared: teacher and student consume the identical masked features.
// kStudentOnly: only the student input is masked; the teacher sees the
// unmasked features (classic noisy-student routing).
enum class Routing { kShared, kStudentOnly, kNone };

std::string routing_name(Routing r);
Routing routing_from_name(const std::string& name);

struct AugmentationPolicy {
  bool classic_enabled = true;
  double snr_db_low = 5.0;
  double snr_db_high = 20.0;
  bool reverb_enabled = false;

  bool spec_enabled = true;
  int n_freq_masks = 2;
  int max_freq_width = 8;   // bins
  int n_time_masks = 2;
  int max_time_width = 10;  // frames
  double mask_value = 0.0;
  Routing routing = Routing::kShared;

  void validate() const;
};

nlohmann::json policy_to_json(const AugmentationPolicy& p);
AugmentationPolicy policy_from_json(const nlohmann::json& j);

// Gain g such that signal and g*noise are at `snr_db` over the whole clip:
// mean_power(signal) == 10^(snr_db/10) * mean_power(g*noise).
// Throws ValidationError on a zero-energy signal or noise.
double noise_gain_for_snr(const AudioClip& signal, const AudioClip& noise, double snr_db);

// Waveform-domain augmentation: optional synthetic reverberation (50-tap
// exponential-decay impulse response, decay drawn in [0.9, 0.99]) followed by
// additive noise at an SNR drawn uniformly from the policy range. The result
// is peak-normalized to stay within [-1, 1]. Disabled policy returns the
// input unchanged. Noise shorter than the clip is tiled.
AudioClip classic_augment(const AudioClip& clip, const AudioClip& noise,
                          const AugmentationPolicy& policy, std::uint64_t rng_key);

// Mask helpers; zero width is a no-op.
void apply_freq_mask(Matrix& frames, int start, int width, double value);
void apply_time_mask(Matrix& frames, int start, int width, double value);

// Time/frequency masking. Per frequency mask: width ~ U{0..max_freq_width},
// start ~ U{0..bins-width}; per time mask: width ~ U{0..min(max_time_width,T)},
// start ~ U{0..T-width}. Masks may overlap.
Spectrogram spec_augment(const Spectrogram& spec, const AugmentationPolicy& policy,
                         std::uint64_t rng_key);

struct AugmentedPair {
  Spectrogram teacher_input;
  Spectrogram student_input;
  std::string draw_id;
};

// Builds the teacher/student input pair under the policy's routing. Spec
// masking uses a single draw; shared routing assigns the one result to both
// sides, so the two inputs are bitwise equal.
AugmentedPair make_pair(const Spectrogram& spec, const AugmentationPolicy& policy,
                        std::uint64_t rng_key, const std::string& draw_id = "");

}  // namespace kwst

#endif  // KWST_AUGMENT_H_
