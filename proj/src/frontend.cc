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

#include "kwst/frontend.h"

#include <cmath>
#include <vector>

#include "kwst/error.h"

namespace kwst {

namespace {

constexpr int kNumFftBins = kFftSize / 2 + 1;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

// In-place iterative radix-2 FFT on interleaved complex data.
void fft_radix2(std::vector<double>& re, std::vector<double>& im) {
  const int n = static_cast<int>(re.size());
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / len;
    const double wr = std::cos(ang), wi = std::sin(ang);
    for (int i = 0; i < n; i += len) {
      double cur_r = 1.0, cur_i = 0.0;
      for (int k = 0; k < len / 2; ++k) {
        const int a = i + k, b = i + k + len / 2;
        const double tr = re[b] * cur_r - im[b] * cur_i;
        const double ti = re[b] * cur_i + im[b] * cur_r;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
        const double nr = cur_r * wr - cur_i * wi;
        cur_i = cur_r * wi + cur_i * wr;
        cur_r = nr;
      }
    }
  }
}

struct MelFilterbank {
  // Per mel bin: first FFT bin index and triangular weights.
  struct Band {
    int first_bin = 0;
    std::vector<double> weights;
  };
  std::vector<Band> bands;

  MelFilterbank() {
    const double mel_lo = hz_to_mel(kMelLowHz);
    const double mel_hi = hz_to_mel(kMelHighHz);
    const double step = (mel_hi - mel_lo) / (kNumMelBins + 1);
    std::vector<double> edges(kNumMelBins + 2);
    for (int i = 0; i < kNumMelBins + 2; ++i) edges[i] = mel_lo + step * i;

    const double bin_hz = static_cast<double>(kSampleRateHz) / kFftSize;
    bands.resize(kNumMelBins);
    for (int m = 0; m < kNumMelBins; ++m) {
      const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
      Band band;
      band.first_bin = -1;
      for (int k = 0; k < kNumFftBins; ++k) {
        const double mel = hz_to_mel(k * bin_hz);
        if (mel <= lo || mel >= hi) continue;
        const double w = mel <= center ? (mel - lo) / (center - lo)
                                       : (hi - mel) / (hi - center);
        if (band.first_bin < 0) band.first_bin = k;
        band.weights.push_back(w);
      }
      if (band.first_bin < 0) band.first_bin = 0;
      bands[m] = std::move(band);
    }
  }
};

const MelFilterbank& filterbank() {
  static const MelFilterbank fb;
  return fb;
}

}  // namespace

void Spectrogram::validate() const {
  if (frames.rows() < 1) throw ValidationError("spectrogram: empty");
  if (frames.cols() != kNumMelBins)
    throw ValidationError("spectrogram: column count must be 40");
  frames.check_finite("spectrogram");
}

int num_feature_frames(std::size_t num_samples) {
  if (num_samples < static_cast<std::size_t>(kFrameLen))
    throw ValidationError("insufficient samples");
  return 1 + static_cast<int>((num_samples - kFrameLen) / kFrameHop);
}

Matrix log_mel_energies(const AudioClip& clip) {
  clip.validate();
  const int num_frames = num_feature_frames(clip.samples.size());

  // Hann window, symmetric.
  std::vector<double> window(kFrameLen);
  for (int i = 0; i < kFrameLen; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (kFrameLen - 1));

  const MelFilterbank& fb = filterbank();
  Matrix out(num_frames, kNumMelBins);
  std::vector<double> re(kFftSize), im(kFftSize), mag(kNumFftBins);
  for (int t = 0; t < num_frames; ++t) {
    const std::size_t base = static_cast<std::size_t>(t) * kFrameHop;
    for (int i = 0; i < kFrameLen; ++i) re[i] = clip.samples[base + i] * window[i];
    for (int i = kFrameLen; i < kFftSize; ++i) re[i] = 0.0;
    std::fill(im.begin(), im.end(), 0.0);
    fft_radix2(re, im);
    for (int k = 0; k < kNumFftBins; ++k) mag[k] = std::hypot(re[k], im[k]);

    for (int m = 0; m < kNumMelBins; ++m) {
      const auto& band = fb.bands[m];
      double e = 0.0;
      for (std::size_t j = 0; j < band.weights.size(); ++j)
        e += band.weights[j] * mag[band.first_bin + static_cast<int>(j)];
      out(t, m) = std::log(e + kLogFloor);
    }
  }
  out.check_finite("log mel energies");
  return out;
}

void mean_normalize(Matrix& features) {
  const int t_count = features.rows(), cols = features.cols();
  if (t_count == 0) return;
  std::vector<double> mean(cols, 0.0);
  for (int t = 0; t < t_count; ++t) {
    const double* r = features.row(t);
    for (int c = 0; c < cols; ++c) mean[c] += r[c];
  }
  for (int c = 0; c < cols; ++c) mean[c] /= t_count;
  for (int t = 0; t < t_count; ++t) {
    double* r = features.row(t);
    for (int c = 0; c < cols; ++c) r[c] -= mean[c];
  }
}

Spectrogram extract_features(const AudioClip& clip) {
  Spectrogram spec;
  spec.frames = log_mel_energies(clip);
  mean_normalize(spec.frames);
  return spec;
}

}  // namespace kwst
