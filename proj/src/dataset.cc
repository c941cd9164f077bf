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

#include "kwst/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kwst/audio.h"
#include "kwst/error.h"
#include "kwst/frontend.h"
#include "kwst/rng.h"

namespace kwst {

namespace fs = std::filesystem;
using nlohmann::json;

std::string label_name(Label l) {
  switch (l) {
    case Label::kPositive: return "positive";
    case Label::kNegative: return "negative";
    case Label::kUnlabeled: return "unlabeled";
  }
  throw ValidationError("unknown label");
}

Label label_from_name(const std::string& name) {
  if (name == "positive") return Label::kPositive;
  if (name == "negative") return Label::kNegative;
  if (name == "unlabeled") return Label::kUnlabeled;
  throw ValidationError("unknown label: " + name);
}

std::string split_name(Split s) {
  switch (s) {
    case Split::kTrainLabeled: return "train_labeled";
    case Split::kTrainUnlabeled: return "train_unlabeled";
    case Split::kTest: return "test";
  }
  throw ValidationError("unknown split");
}

Split split_from_name(const std::string& name) {
  if (name == "train_labeled") return Split::kTrainLabeled;
  if (name == "train_unlabeled") return Split::kTrainUnlabeled;
  if (name == "test") return Split::kTest;
  throw ValidationError("unknown split: " + name);
}

void UtteranceRecord::validate() const {
  if (id.empty()) throw ValidationError("record with empty id");
  if (path.empty()) throw ValidationError("record " + id + ": empty path");
  if (label == Label::kPositive) {
    if (!keyword_span)
      throw ValidationError("record " + id + ": positive without keyword_span");
    if (keyword_span->first < 0 || keyword_span->first >= keyword_span->second)
      throw ValidationError("record " + id + ": invalid keyword_span");
  }
  if (labeled()) {
    if (!encoder_units)
      throw ValidationError("record " + id + ": labeled record without encoder_units");
    if (encoder_units->empty())
      throw ValidationError("record " + id + ": empty encoder_units");
    if (keyword_span &&
        keyword_span->second > static_cast<int>(encoder_units->size()))
      throw ValidationError("record " + id + ": keyword_span exceeds frame count");
  } else {
    if (keyword_span || encoder_units)
      throw ValidationError("record " + id + ": unlabeled record carries labels");
  }
}

void DatasetManifest::validate() const {
  std::set<std::string> ids;
  for (const auto& rec : records) {
    rec.validate();
    if (!ids.insert(rec.id).second) throw ValidationError("duplicate id: " + rec.id);
    if (rec.split == Split::kTrainUnlabeled && rec.labeled())
      throw ValidationError("record " + rec.id + ": labeled record in train_unlabeled split");
    if (rec.split == Split::kTest && !rec.labeled())
      throw ValidationError("record " + rec.id + ": unlabeled record in test split");
  }
}

DatasetManifest DatasetManifest::subset(Split split) const {
  DatasetManifest out;
  out.base_dir = base_dir;
  for (const auto& rec : records)
    if (rec.split == split) out.records.push_back(rec);
  return out;
}

std::string DatasetManifest::resolve_path(const UtteranceRecord& rec) const {
  if (base_dir.empty()) return rec.path;
  return (fs::path(base_dir) / rec.path).string();
}

std::size_t DatasetManifest::count(Split split) const {
  std::size_t n = 0;
  for (const auto& rec : records)
    if (rec.split == split) ++n;
  return n;
}

namespace {

json record_to_json(const UtteranceRecord& rec) {
  json j{{"id", rec.id},
         {"path", rec.path},
         {"label", label_name(rec.label)},
         {"split", split_name(rec.split)}};
  if (rec.keyword_span) j["keyword_span"] = {rec.keyword_span->first, rec.keyword_span->second};
  if (rec.encoder_units) j["encoder_units"] = *rec.encoder_units;
  return j;
}

UtteranceRecord record_from_json(const json& j) {
  UtteranceRecord rec;
  for (const auto& [key, value] : j.items()) {
    if (key == "id") rec.id = value.get<std::string>();
    else if (key == "path") rec.path = value.get<std::string>();
    else if (key == "label") rec.label = label_from_name(value.get<std::string>());
    else if (key == "split") rec.split = split_from_name(value.get<std::string>());
    else if (key == "keyword_span") {
      const auto arr = value.get<std::vector<int>>();
      if (arr.size() != 2) throw ValidationError("keyword_span must have two entries");
      rec.keyword_span = std::make_pair(arr[0], arr[1]);
    } else if (key == "encoder_units") {
      rec.encoder_units = value.get<std::vector<int>>();
    } else {
      throw ValidationError("unknown manifest key: " + key);
    }
  }
  return rec;
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  DatasetManifest manifest;
  manifest.base_dir = fs::path(path).parent_path().string();

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("manifest parse error at line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    manifest.records.push_back(record_from_json(j));
  }
  manifest.validate();
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  manifest.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest: " + path);
  for (const auto& rec : manifest.records) out << record_to_json(rec).dump() << "\n";
  if (!out) throw IoError("short write on manifest: " + path);
}

void CorpusSpec::validate() const {
  if (n_labeled_pos < 0 || n_labeled_neg < 0 || n_unlabeled < 0 || n_test < 0)
    throw ValidationError("corpus: counts must be >= 0");
  if (snr_db_low > snr_db_high) throw ValidationError("corpus: snr range inverted");
  if (test_snr_db && test_snr_db->first > test_snr_db->second)
    throw ValidationError("corpus: test snr range inverted");
  if (unlabeled_pos_ratio < 0.0 || unlabeled_pos_ratio > 1.0)
    throw ValidationError("corpus: unlabeled_pos_ratio must be in [0, 1]");
  if (clip_seconds * kSampleRateHz < 2 * kFrameLen)
    throw ValidationError("corpus: clips too short");
}

namespace {

constexpr double kSegmentSeconds = 0.3;
constexpr double kChirpStartHz = 400.0;
constexpr double kChirpEndHz = 800.0;
constexpr double kToneHz = 1200.0;
constexpr double kKeywordAmplitude = 0.5;
constexpr double kNoiseSigma = 0.1;
constexpr double kPeakCeiling = 0.99;

std::vector<double> make_segment(bool chirp) {
  const int n = static_cast<int>(kSegmentSeconds * kSampleRateHz);
  const int fade = kSampleRateHz / 100;  // 10 ms raised-cosine edges
  std::vector<double> seg(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRateHz;
    double phase;
    if (chirp) {
      phase = 2.0 * M_PI *
              (kChirpStartHz * t +
               (kChirpEndHz - kChirpStartHz) * t * t / (2.0 * kSegmentSeconds));
    } else {
      phase = 2.0 * M_PI * kToneHz * t;
    }
    double env = 1.0;
    if (i < fade) env = 0.5 - 0.5 * std::cos(M_PI * i / fade);
    if (i >= n - fade) env = 0.5 - 0.5 * std::cos(M_PI * (n - 1 - i) / fade);
    seg[i] = kKeywordAmplitude * std::sin(phase) * env;
  }
  return seg;
}

enum class Variant { kKeyword, kNoiseOnly, kChirpOnly, kToneOnly, kReversed };

struct BuiltClip {
  AudioClip mixed;
  AudioClip clean;   // signal component on the same global scale
  AudioClip noise;   // scaled noise component
  std::vector<int> encoder_units;
  std::optional<std::pair<int, int>> keyword_span;
};

// Lays out the segments for a variant, mixes noise at the drawn SNR and
// peak-normalizes. All randomness comes from `rng` in a fixed draw order.
BuiltClip build_clip(Variant variant, double snr_lo, double snr_hi, int total_samples,
                     RngStream& rng) {
  static const std::vector<double> chirp = make_segment(true);
  static const std::vector<double> tone = make_segment(false);
  const int seg_len = static_cast<int>(chirp.size());

  std::vector<std::pair<int, const std::vector<double>*>> layout;  // (unit, segment)
  switch (variant) {
    case Variant::kKeyword: layout = {{1, &chirp}, {2, &tone}}; break;
    case Variant::kNoiseOnly: break;
    case Variant::kChirpOnly: layout = {{1, &chirp}}; break;
    case Variant::kToneOnly: layout = {{2, &tone}}; break;
    case Variant::kReversed: layout = {{2, &tone}, {1, &chirp}}; break;
  }
  const int pattern_len = seg_len * static_cast<int>(layout.size());

  BuiltClip built;
  built.clean.samples.assign(total_samples, 0.0);
  const int margin = kSampleRateHz / 10;  // keep patterns away from the edges
  int offset = 0;
  std::vector<int> unit_of_sample(total_samples, 0);
  if (!layout.empty()) {
    const int hi = total_samples - pattern_len - margin;
    offset = static_cast<int>(rng.uniform_int(margin, std::max(margin, hi)));
    int pos = offset;
    for (const auto& [unit, seg] : layout) {
      for (int i = 0; i < seg_len; ++i) {
        built.clean.samples[pos + i] = (*seg)[i];
        unit_of_sample[pos + i] = unit;
      }
      pos += seg_len;
    }
  }

  const double snr_db = layout.empty() ? 0.0 : rng.uniform(snr_lo, snr_hi);

  // Half white, half tonal interference inside the keyword band. Broadband
  // noise alone barely masks a narrowband pattern after mel filtering, so the
  // tonal part is what makes low-SNR clips genuinely hard.
  constexpr int kInterferers = 16;
  double freqs[kInterferers], phases[kInterferers];
  for (int k = 0; k < kInterferers; ++k) {
    freqs[k] = rng.uniform(250.0, 2000.0);
    phases[k] = rng.uniform(0.0, 2.0 * M_PI);
  }
  const double tone_scale = kNoiseSigma / std::sqrt(kInterferers);
  built.noise.samples.resize(total_samples);
  for (int i = 0; i < total_samples; ++i) {
    const double t = static_cast<double>(i) / kSampleRateHz;
    double tonal = 0.0;
    for (int k = 0; k < kInterferers; ++k) tonal += std::sin(2.0 * M_PI * freqs[k] * t + phases[k]);
    built.noise.samples[i] = kNoiseSigma * rng.normal() + tone_scale * tonal;
  }

  double gain = 1.0;
  if (!layout.empty()) {
    const double ps = mean_power(built.clean, offset, offset + pattern_len);
    const double pn = mean_power(built.noise, offset, offset + pattern_len);
    gain = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
  }
  for (double& s : built.noise.samples) s *= gain;

  built.mixed.samples.resize(total_samples);
  double peak = 0.0;
  for (int i = 0; i < total_samples; ++i) {
    built.mixed.samples[i] = built.clean.samples[i] + built.noise.samples[i];
    peak = std::max(peak, std::abs(built.mixed.samples[i]));
  }
  if (peak > kPeakCeiling) {
    const double s = kPeakCeiling / peak;
    for (double& v : built.mixed.samples) v *= s;
    for (double& v : built.clean.samples) v *= s;
    for (double& v : built.noise.samples) v *= s;
  }

  // Per-frame units follow the segment under the frame center.
  const int t_count = num_feature_frames(total_samples);
  built.encoder_units.resize(t_count);
  int span_start = -1, span_end = -1;
  for (int f = 0; f < t_count; ++f) {
    const int center = f * kFrameHop + kFrameLen / 2;
    const int unit = center < total_samples ? unit_of_sample[center] : 0;
    built.encoder_units[f] = unit;
    if (unit != 0) {
      if (span_start < 0) span_start = f;
      span_end = f + 1;
    }
  }
  if (variant == Variant::kKeyword) built.keyword_span = std::make_pair(span_start, span_end);
  return built;
}

std::string make_id(const char* prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%s%05d", prefix, i);
  return buf;
}

}  // namespace

DatasetManifest generate_synthetic_corpus(const CorpusSpec& spec, const std::string& out_dir) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "wavs", ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  if (spec.emit_components) {
    fs::create_directories(fs::path(out_dir) / "components", ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);
  }

  const int total_samples = static_cast<int>(std::llround(spec.clip_seconds * kSampleRateHz));
  const double mid_snr = 0.5 * (spec.snr_db_low + spec.snr_db_high);
  const auto [test_lo, test_hi] =
      spec.test_snr_db.value_or(std::make_pair(spec.snr_db_low, spec.snr_db_high));

  DatasetManifest manifest;
  manifest.base_dir = out_dir;
  std::uint64_t record_index = 0;

  auto emit = [&](const std::string& id, Label label, Split split, Variant variant,
                  double snr_lo, double snr_hi) {
    RngStream rng(derive_key(spec.seed, "corpus", record_index++));
    const BuiltClip built = build_clip(variant, snr_lo, snr_hi, total_samples, rng);

    UtteranceRecord rec;
    rec.id = id;
    rec.path = "wavs/" + id + ".wav";
    rec.label = label;
    rec.split = split;
    if (label != Label::kUnlabeled) {
      rec.encoder_units = built.encoder_units;
      if (label == Label::kPositive) rec.keyword_span = built.keyword_span;
    }
    write_wav((fs::path(out_dir) / rec.path).string(), built.mixed);
    if (spec.emit_components && variant != Variant::kNoiseOnly) {
      write_wav((fs::path(out_dir) / "components" / (id + ".clean.wav")).string(), built.clean);
      write_wav((fs::path(out_dir) / "components" / (id + ".noise.wav")).string(), built.noise);
    }
    manifest.records.push_back(std::move(rec));
  };

  // Structured negatives carry the cues that separate the keyword from its
  // parts, so they get most of the mass: 20% noise, 40% single segment,
  // 40% reversed order.
  auto negative_variant = [](RngStream& rng) {
    switch (rng.uniform_int(0, 4)) {
      case 0: return Variant::kNoiseOnly;
      case 1:
      case 2: return rng.uniform() < 0.5 ? Variant::kChirpOnly : Variant::kToneOnly;
      default: return Variant::kReversed;
    }
  };

  for (int i = 0; i < spec.n_labeled_pos; ++i)
    emit(make_id("lp", i), Label::kPositive, Split::kTrainLabeled, Variant::kKeyword,
         spec.snr_db_low, spec.snr_db_high);
  for (int i = 0; i < spec.n_labeled_neg; ++i) {
    RngStream vrng(derive_key(spec.seed, "neg-variant", i));
    emit(make_id("ln", i), Label::kNegative, Split::kTrainLabeled, negative_variant(vrng),
         spec.snr_db_low, spec.snr_db_high);
  }
  for (int i = 0; i < spec.n_unlabeled; ++i) {
    RngStream vrng(derive_key(spec.seed, "unlabeled-variant", i));
    const bool positive = vrng.uniform() < spec.unlabeled_pos_ratio;
    const Variant v = positive ? Variant::kKeyword : negative_variant(vrng);
    // The unlabeled pool sits in the low (harder) half of the SNR range.
    emit(make_id("ul", i), Label::kUnlabeled, Split::kTrainUnlabeled, v, spec.snr_db_low, mid_snr);
  }
  for (int i = 0; i < spec.n_test; ++i) {
    const bool positive = (i % 2) == 0;
    RngStream vrng(derive_key(spec.seed, "test-variant", i));
    const Variant v = positive ? Variant::kKeyword : negative_variant(vrng);
    emit(make_id("ts", i), positive ? Label::kPositive : Label::kNegative, Split::kTest, v,
         test_lo, test_hi);
  }

  manifest.validate();
  save_manifest(manifest, (fs::path(out_dir) / "manifest.jsonl").string());
  return manifest;
}

}  // namespace kwst
