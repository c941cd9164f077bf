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

#include "kwst/audio.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "kwst/error.h"

namespace kwst {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

void AudioClip::validate() const {
  if (samples.empty()) throw ValidationError("invalid audio: empty clip");
  if (sample_rate_hz != kSampleRateHz)
    throw ValidationError("invalid audio: sample rate must be 16000");
  for (double s : samples) {
    if (!std::isfinite(s)) throw ValidationError("invalid audio: non-finite sample");
  }
}

double mean_power(const AudioClip& clip, std::size_t begin, std::size_t end) {
  if (begin >= end || end > clip.samples.size()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = begin; i < end; ++i) acc += clip.samples[i] * clip.samples[i];
  return acc / static_cast<double>(end - begin);
}

double measure_snr_db(const AudioClip& clean, const AudioClip& noise) {
  if (clean.samples.size() != noise.samples.size())
    throw ValidationError("snr: component length mismatch");
  std::size_t lo = clean.samples.size(), hi = 0;
  for (std::size_t i = 0; i < clean.samples.size(); ++i) {
    if (clean.samples[i] != 0.0) {
      lo = std::min(lo, i);
      hi = std::max(hi, i + 1);
    }
  }
  if (lo >= hi) throw ValidationError("snr: zero-energy signal");
  const double ps = mean_power(clean, lo, hi);
  const double pn = mean_power(noise, lo, hi);
  if (pn <= 0.0) throw ValidationError("snr: zero-energy noise");
  return 10.0 * std::log10(ps / pn);
}

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();

  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
    throw FormatError("not a RIFF/WAVE file: " + path);

  bool have_fmt = false;
  std::uint16_t audio_format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data_ptr = nullptr;
  std::uint32_t data_len = 0;

  std::size_t off = 12;
  while (off + 8 <= n) {
    const char* id = bytes.data() + off;
    const std::uint32_t sz = read_u32(p + off + 4);
    const std::size_t body = off + 8;
    if (body + sz > n) throw FormatError("truncated WAV chunk: " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (sz < 16) throw FormatError("short fmt chunk: " + path);
      audio_format = read_u16(p + body);
      channels = read_u16(p + body + 2);
      rate = read_u32(p + body + 4);
      bits = read_u16(p + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_ptr = p + body;
      data_len = sz;
    }
    off = body + sz + (sz & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_ptr == nullptr) throw FormatError("missing fmt/data chunk: " + path);
  if (audio_format != 1) throw FormatError("unsupported WAV encoding (PCM required): " + path);
  if (channels != 1) throw FormatError("unsupported WAV channel count (mono required): " + path);
  if (bits != 16) throw FormatError("unsupported WAV bit depth (16-bit required): " + path);
  if (rate != kSampleRateHz) throw FormatError("unsupported WAV sample rate (16 kHz required): " + path);
  if (data_len % 2 != 0) throw FormatError("odd PCM payload length: " + path);

  AudioClip clip;
  clip.samples.resize(data_len / 2);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const std::int16_t v = static_cast<std::int16_t>(read_u16(data_ptr + 2 * i));
    clip.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return clip;
}

void write_wav(const std::string& path, const AudioClip& clip) {
  clip.validate();
  std::string out;
  const std::uint32_t data_len = static_cast<std::uint32_t>(clip.samples.size() * 2);
  out.reserve(44 + data_len);
  out.append("RIFF");
  put_u32(out, 36 + data_len);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, kSampleRateHz);
  put_u32(out, kSampleRateHz * 2);  // byte rate
  put_u16(out, 2);                  // block align
  put_u16(out, 16);                 // bits
  out.append("data");
  put_u32(out, data_len);
  for (double s : clip.samples) {
    const double scaled = s * 32768.0;
    double r = scaled >= 0 ? std::floor(scaled + 0.5) : std::ceil(scaled - 0.5);
    if (r > 32767.0) r = 32767.0;
    if (r < -32768.0) r = -32768.0;
    const std::int16_t q = static_cast<std::int16_t>(r);
    put_u16(out, static_cast<std::uint16_t>(q));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write WAV file: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("short write on WAV file: " + path);
}

}  // namespace kwst
