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

#ifndef KWST_EVAL_H_
#define KWST_EVAL_H_

#include <string>
#include <vector>

#include "kwst/dataset.h"
#include "kwst/model.h"

namespace kwst {

// Detection mechanics. The paper's metrics leave the trigger logic open;
// these are the documented defaults, all configurable.
struct DetectorOptions {
  int smoothing_window = 10;   // frames averaged before thresholding
  int refractory_frames = 100; // no second event within this many frames
  int span_slack_frames = 50;  // grace period after the keyword span ends
};

struct DetectionEvent {
  std::string utterance_id;
  int frame_index = 0;
  double confidence = 0.0;  // max smoothed posterior in the triggered region
};

// Per-frame keyword posterior from the decoder head.
std::vector<double> keyword_posterior(const Spectrogram& spec, const ModelParams& params,
                                      const ArchConfig& arch);

// Moving average over the trailing `window` frames; frames without a full
// window carry -1 and can never cross a threshold in [0, 1].
std::vector<double> smooth_posterior(const std::vector<double>& posterior, int window);

// Threshold automaton over a smoothed trace: an event fires when the value
// reaches the threshold while armed; firing disarms for `refractory_frames`.
std::vector<DetectionEvent> detect_from_trace(const std::vector<double>& smoothed,
                                              double threshold, const DetectorOptions& opts,
                                              const std::string& utterance_id = "");

std::vector<DetectionEvent> detect(const Spectrogram& spec, const ModelParams& params,
                                   const ArchConfig& arch, double threshold,
                                   const DetectorOptions& opts = {},
                                   const std::string& utterance_id = "");

struct MeasureResult {
  double fa_per_hour = 0.0;
  double fr_rate = 0.0;
  int false_accepts = 0;
  int missed_positives = 0;
  int n_positives = 0;
  int n_negatives = 0;
  double negative_hours = 0.0;
};

// One utterance reduced to what the metrics need: polarity, span, duration
// and the smoothed posterior trace.
struct UtteranceTrace {
  std::string id;
  bool positive = false;
  std::pair<int, int> span = {0, 0};
  double duration_hours = 0.0;
  std::vector<double> smoothed;
};

// Aggregation core shared by measure and sweep_roc: FR = positives with no
// event inside [span_start, span_end + slack) over all positives; FA/h =
// events on negative utterances per hour of negative audio.
MeasureResult measure_traces(const std::vector<UtteranceTrace>& traces, double threshold,
                             const DetectorOptions& opts = {});

MeasureResult measure(const DatasetManifest& split, const ModelParams& params,
                      const ArchConfig& arch, double threshold,
                      const DetectorOptions& opts = {});

struct RocPoint {
  double threshold = 0.0;
  double fa_per_hour = 0.0;
  double fr_rate = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // thresholds strictly increasing
  // FA/h is non-increasing in threshold by construction. FR is checked and
  // recorded: the trigger automaton admits rare shadowing corner cases.
  bool fr_monotone = true;

  void validate() const;
};

// Sweeps `n_thresholds` uniformly spaced thresholds over [0, 1]. Model
// forward passes and smoothing run once per utterance; each threshold then
// replays the trigger automaton on the cached traces, which is exactly
// equivalent to re-running detect() per threshold.
RocCurve sweep_roc(const DatasetManifest& split, const ModelParams& params,
                   const ArchConfig& arch, int n_thresholds, const DetectorOptions& opts = {});

struct OperatingPoint {
  double fr_rate = 0.0;
  double threshold = 0.0;
  double fa_per_hour = 0.0;
  bool extrapolated = false;  // no sweep point reached the target FA/h
};

// FR at the smallest threshold whose FA/h <= target, linearly interpolated
// in FA/h between the two bracketing sweep points.
OperatingPoint fr_at_fa(const RocCurve& curve, double target_fa_per_hour);

void write_roc_csv(const RocCurve& curve, const std::string& path);
void write_roc_svg(const RocCurve& curve, const std::string& path);

}  // namespace kwst

#endif  // KWST_EVAL_H_
