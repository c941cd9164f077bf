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

#include "kwst/augment.h"

#include <algorithm>
#include <cmath>

#include "kwst/error.h"
#include "kwst/rng.h"

namespace kwst {

namespace {
constexpr int kReverbTaps = 50;
constexpr double kReverbDecayLow = 0.9;
constexpr double kReverbDecayHigh = 0.99;
}  // namespace

std::string routing_name(Routing r) {
  switch (r) {
    case Routing::kShared: return "shared";
    case Routing::kStudentOnly: return "student_only";
    case Routing::kNone: return "none";
  }
  throw ValidationError("unknown routing");
}

Routing routing_from_name(const std::string& name) {
  if (name == "shared") return Routing::kShared;
  if (name == "student_only") return Routing::kStudentOnly;
  if (name == "none") return Routing::kNone;
  throw ValidationError("unknown routing: " + name);
}

void AugmentationPolicy::validate() const {
  if (max_freq_width < 0 || max_freq_width > kNumMelBins)
    throw ValidationError("policy: max_freq_width must be in [0, 40]");
  if (n_freq_masks < 0 || n_time_masks < 0 || max_time_width < 0)
    throw ValidationError("policy: mask counts and widths must be >= 0");
  if (snr_db_low > snr_db_high) throw ValidationError("policy: snr range inverted");
}

nlohmann::json policy_to_json(const AugmentationPolicy& p) {
  return nlohmann::json{{"classic_enabled", p.classic_enabled},
                        {"snr_db_low", p.snr_db_low},
                        {"snr_db_high", p.snr_db_high},
                        {"reverb_enabled", p.reverb_enabled},
                        {"spec_enabled", p.spec_enabled},
                        {"n_freq_masks", p.n_freq_masks},
                        {"max_freq_width", p.max_freq_width},
                        {"n_time_masks", p.n_time_masks},
                        {"max_time_width", p.max_time_width},
                        {"mask_value", p.mask_value},
                        {"routing", routing_name(p.routing)}};
}

AugmentationPolicy policy_from_json(const nlohmann::json& j) {
  AugmentationPolicy p;
  for (const auto& [key, value] : j.items()) {
    if (key == "classic_enabled") p.classic_enabled = value.get<bool>();
    else if (key == "snr_db_low") p.snr_db_low = value.get<double>();
    else if (key == "snr_db_high") p.snr_db_high = value.get<double>();
    else if (key == "reverb_enabled") p.reverb_enabled = value.get<bool>();
    else if (key == "spec_enabled") p.spec_enabled = value.get<bool>();
    else if (key == "n_freq_masks") p.n_freq_masks = value.get<int>();
    else if (key == "max_freq_width") p.max_freq_width = value.get<int>();
    else if (key == "n_time_masks") p.n_time_masks = value.get<int>();
    else if (key == "max_time_width") p.max_time_width = value.get<int>();
    else if (key == "mask_value") p.mask_value = value.get<double>();
    else if (key == "routing") p.routing = routing_from_name(value.get<std::string>());
    else throw ValidationError("unknown augmentation key: " + key);
  }
  p.validate();
  return p;
}

double noise_gain_for_snr(const AudioClip& signal, const AudioClip& noise, double snr_db) {
  const double ps = mean_power(signal, 0, signal.samples.size());
  const double pn = mean_power(noise, 0, noise.samples.size());
  if (ps <= 0.0) throw ValidationError("zero-energy signal");
  if (pn <= 0.0) throw ValidationError("zero-energy noise");
  return std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
}

AudioClip classic_augment(const AudioClip& clip, const AudioClip& noise,
                          const AugmentationPolicy& policy, std::uint64_t rng_key) {
  policy.validate();
  if (!policy.classic_enabled) return clip;
  clip.validate();
  noise.validate();

  RngStream rng(rng_key);
  AudioClip out = clip;

  if (policy.reverb_enabled) {
    const double decay = rng.uniform(kReverbDecayLow, kReverbDecayHigh);
    std::vector<double> ir(kReverbTaps);
    double tap = 1.0;
    for (int i = 0; i < kReverbTaps; ++i) {
      ir[i] = tap;
      tap *= decay;
    }
    std::vector<double> wet(clip.samples.size(), 0.0);
    for (std::size_t n = 0; n < clip.samples.size(); ++n) {
      double acc = 0.0;
      const int kmax = static_cast<int>(std::min<std::size_t>(kReverbTaps, n + 1));
      for (int k = 0; k < kmax; ++k) acc += ir[k] * clip.samples[n - k];
      wet[n] = acc;
    }
    out.samples = std::move(wet);
  }

  const double snr_db = rng.uniform(policy.snr_db_low, policy.snr_db_high);
  AudioClip tiled;
  tiled.samples.resize(out.samples.size());
  for (std::size_t i = 0; i < tiled.samples.size(); ++i)
    tiled.samples[i] = noise.samples[i % noise.samples.size()];
  const double gain = noise_gain_for_snr(out, tiled, snr_db);
  for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += gain * tiled.samples[i];

  double peak = 0.0;
  for (double s : out.samples) peak = std::max(peak, std::abs(s));
  if (peak > 1.0)
    for (double& s : out.samples) s /= peak;
  return out;
}

void apply_freq_mask(Matrix& frames, int start, int width, double value) {
  if (width <= 0) return;
  if (start < 0 || start + width > frames.cols()) throw ValidationError("freq mask out of range");
  for (int t = 0; t < frames.rows(); ++t) {
    double* r = frames.row(t);
    for (int c = start; c < start + width; ++c) r[c] = value;
  }
}

void apply_time_mask(Matrix& frames, int start, int width, double value) {
  if (width <= 0) return;
  if (start < 0 || start + width > frames.rows()) throw ValidationError("time mask out of range");
  for (int t = start; t < start + width; ++t) {
    double* r = frames.row(t);
    for (int c = 0; c < frames.cols(); ++c) r[c] = value;
  }
}

Spectrogram spec_augment(const Spectrogram& spec, const AugmentationPolicy& policy,
                         std::uint64_t rng_key) {
  policy.validate();
  Spectrogram out = spec;
  if (!policy.spec_enabled) return out;

  RngStream rng(rng_key);
  const int bins = out.frames.cols();
  const int t_count = out.frames.rows();

  for (int m = 0; m < policy.n_freq_masks; ++m) {
    const int width = static_cast<int>(rng.uniform_int(0, policy.max_freq_width));
    const int start = static_cast<int>(rng.uniform_int(0, bins - width));
    apply_freq_mask(out.frames, start, width, policy.mask_value);
  }
  for (int m = 0; m < policy.n_time_masks; ++m) {
    const int max_w = std::min(policy.max_time_width, t_count);
    const int width = static_cast<int>(rng.uniform_int(0, max_w));
    const int start = static_cast<int>(rng.uniform_int(0, t_count - width));
    apply_time_mask(out.frames, start, width, policy.mask_value);
  }
  return out;
}

AugmentedPair make_pair(const Spectrogram& spec, const AugmentationPolicy& policy,
                        std::uint64_t rng_key, const std::string& draw_id) {
  policy.validate();
  AugmentedPair pair;
  pair.draw_id = draw_id;
  switch (policy.routing) {
    case Routing::kShared: {
      Spectrogram masked = spec_augment(spec, policy, rng_key);
      pair.teacher_input = masked;
      pair.student_input = std::move(masked);
      break;
    }
    case Routing::kStudentOnly:
      pair.teacher_input = spec;
      pair.student_input = spec_augment(spec, policy, rng_key);
      break;
    case Routing::kNone:
      pair.teacher_input = spec;
      pair.student_input = spec;
      break;
  }
  return pair;
}

}  // namespace kwst
