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

#ifndef KWST_DATASET_H_
#define KWST_DATASET_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kwst {

enum class Label { kPositive, kNegative, kUnlabeled };
enum class Split { kTrainLabeled, kTrainUnlabeled, kTest };

std::string label_name(Label l);
Label label_from_name(const std::string& name);
std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct UtteranceRecord {
  std::string id;
  std::string path;  // WAV path relative to the manifest directory
  Label label = Label::kUnlabeled;
  Split split = Split::kTrainUnlabeled;
  std::optional<std::pair<int, int>> keyword_span;   // [start, end), frames
  std::optional<std::vector<int>> encoder_units;     // length T, values in [0, N)

  bool labeled() const { return label != Label::kUnlabeled; }
  // Structural invariants: positives carry a valid span; labeled records
  // carry encoder units; unlabeled records carry neither.
  void validate() const;
};

struct DatasetManifest {
  std::vector<UtteranceRecord> records;
  std::string base_dir;  // not serialized; set by the loader/generator

  void validate() const;  // per-record invariants + unique ids + split rules
  DatasetManifest subset(Split split) const;
  std::string resolve_path(const UtteranceRecord& rec) const;
  std::size_t count(Split split) const;
};

// JSON-lines persistence, one record per line with snake_case keys.
DatasetManifest load_manifest(const std::string& path);
void save_manifest(const DatasetManifest& manifest, const std::string& path);

// Synthetic corpus layout. The "keyword" is a fixed two-segment pattern:
// a 400->800 Hz chirp for 300 ms followed by a 1200 Hz tone for 300 ms,
// embedded in white noise at a drawn SNR. Negatives are pure noise, a single
// segment, or the two segments in reversed order. Encoder units: 1 on chirp
// frames, 2 on tone frames, 0 elsewhere.
struct CorpusSpec {
  std::uint64_t seed = 1;
  int n_labeled_pos = 0;
  int n_labeled_neg = 0;
  int n_unlabeled = 0;
  int n_test = 0;
  double snr_db_low = 5.0;
  double snr_db_high = 20.0;
  // Test split SNR range; defaults to the train range when unset.
  std::optional<std::pair<double, double>> test_snr_db;
  // Fraction of the unlabeled pool built from positive patterns. The
  // unlabeled pool draws SNRs from the low half of the train range.
  double unlabeled_pos_ratio = 0.5;
  double clip_seconds = 1.6;
  // Also write per-utterance clean/noise component WAVs for SNR audits.
  bool emit_components = false;

  void validate() const;
};

// Writes WAVs under <out_dir>/wavs/, the manifest to <out_dir>/manifest.jsonl
// and returns it. Pure function of its arguments: the same CorpusSpec
// produces byte-identical files.
DatasetManifest generate_synthetic_corpus(const CorpusSpec& spec, const std::string& out_dir);

}  // namespace kwst

#endif  // KWST_DATASET_H_
