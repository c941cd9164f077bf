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

#include "kwst/eval.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "kwst/audio.h"
#include "kwst/error.h"
#include "kwst/frontend.h"
#include "kwst/threading.h"

namespace kwst {

std::vector<double> keyword_posterior(const Spectrogram& spec, const ModelParams& params,
                                      const ArchConfig& arch) {
  const ModelOutput out = forward(spec, params, arch);
  std::vector<double> p(out.decoder_probs.rows());
  for (int t = 0; t < out.decoder_probs.rows(); ++t) p[t] = out.decoder_probs(t, kKeywordClass);
  return p;
}

std::vector<double> smooth_posterior(const std::vector<double>& posterior, int window) {
  if (window < 1) throw ValidationError("smoothing window must be >= 1");
  std::vector<double> s(posterior.size(), -1.0);
  double acc = 0.0;
  for (std::size_t t = 0; t < posterior.size(); ++t) {
    acc += posterior[t];
    if (t >= static_cast<std::size_t>(window)) acc -= posterior[t - window];
    if (t + 1 >= static_cast<std::size_t>(window)) s[t] = acc / window;
  }
  return s;
}

std::vector<DetectionEvent> detect_from_trace(const std::vector<double>& smoothed,
                                              double threshold, const DetectorOptions& opts,
                                              const std::string& utterance_id) {
  if (threshold < 0.0 || threshold > 1.0)
    throw ValidationError("detection threshold must be in [0, 1]");
  std::vector<DetectionEvent> events;
  std::size_t t = 0;
  while (t < smoothed.size()) {
    if (smoothed[t] >= threshold && smoothed[t] >= 0.0) {
      DetectionEvent ev;
      ev.utterance_id = utterance_id;
      ev.frame_index = static_cast<int>(t);
      const std::size_t region_end = std::min(smoothed.size(), t + opts.refractory_frames);
      double conf = smoothed[t];
      for (std::size_t r = t; r < region_end; ++r) conf = std::max(conf, smoothed[r]);
      ev.confidence = std::min(conf, 1.0);
      events.push_back(std::move(ev));
      t += opts.refractory_frames;  // re-arm after the refractory period
    } else {
      ++t;
    }
  }
  return events;
}

std::vector<DetectionEvent> detect(const Spectrogram& spec, const ModelParams& params,
                                   const ArchConfig& arch, double threshold,
                                   const DetectorOptions& opts, const std::string& utterance_id) {
  const auto smoothed = smooth_posterior(keyword_posterior(spec, params, arch),
                                         opts.smoothing_window);
  return detect_from_trace(smoothed, threshold, opts, utterance_id);
}

namespace {

std::vector<UtteranceTrace> score_split(const DatasetManifest& split, const ModelParams& params,
                                        const ArchConfig& arch, const DetectorOptions& opts) {
  if (split.records.empty()) throw ValidationError("evaluation split is empty");
  std::vector<UtteranceTrace> scored(split.records.size());
  parallel_for_indexed(static_cast<int>(split.records.size()), [&](int i) {
    const UtteranceRecord& rec = split.records[i];
    if (!rec.labeled()) throw ValidationError("evaluation requires labeled records: " + rec.id);
    const AudioClip clip = read_wav(split.resolve_path(rec));
    UtteranceTrace& s = scored[i];
    s.id = rec.id;
    s.positive = rec.label == Label::kPositive;
    if (s.positive) s.span = *rec.keyword_span;
    s.duration_hours = clip.duration_seconds() / 3600.0;
    const Spectrogram spec = extract_features(clip);
    s.smoothed = smooth_posterior(keyword_posterior(spec, params, arch), opts.smoothing_window);
  });
  return scored;
}

bool hit_in_span(const std::vector<DetectionEvent>& events, const std::pair<int, int>& span,
                 int slack) {
  for (const auto& ev : events)
    if (ev.frame_index >= span.first && ev.frame_index < span.second + slack) return true;
  return false;
}

}  // namespace

MeasureResult measure_traces(const std::vector<UtteranceTrace>& traces, double threshold,
                             const DetectorOptions& opts) {
  MeasureResult res;
  for (const auto& s : traces) {
    const auto events = detect_from_trace(s.smoothed, threshold, opts, s.id);
    if (s.positive) {
      ++res.n_positives;
      if (!hit_in_span(events, s.span, opts.span_slack_frames)) ++res.missed_positives;
    } else {
      ++res.n_negatives;
      res.false_accepts += static_cast<int>(events.size());
      res.negative_hours += s.duration_hours;
    }
  }
  res.fr_rate = res.n_positives > 0
                    ? static_cast<double>(res.missed_positives) / res.n_positives
                    : 0.0;
  res.fa_per_hour = res.negative_hours > 0.0 ? res.false_accepts / res.negative_hours : 0.0;
  return res;
}

MeasureResult measure(const DatasetManifest& split, const ModelParams& params,
                      const ArchConfig& arch, double threshold, const DetectorOptions& opts) {
  if (threshold < 0.0 || threshold > 1.0)
    throw ValidationError("detection threshold must be in [0, 1]");
  return measure_traces(score_split(split, params, arch, opts), threshold, opts);
}

void RocCurve::validate() const {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].threshold <= points[i - 1].threshold)
      throw ValidationError("roc: thresholds must be strictly increasing");
    if (points[i].fa_per_hour > points[i - 1].fa_per_hour + 1e-12)
      throw ValidationError("roc: fa/h must be non-increasing in threshold");
  }
}

RocCurve sweep_roc(const DatasetManifest& split, const ModelParams& params,
                   const ArchConfig& arch, int n_thresholds, const DetectorOptions& opts) {
  if (n_thresholds < 2) throw ValidationError("roc sweep needs at least 2 thresholds");
  const auto scored = score_split(split, params, arch, opts);

  RocCurve curve;
  curve.points.resize(n_thresholds);
  for (int i = 0; i < n_thresholds; ++i) {
    const double threshold = static_cast<double>(i) / (n_thresholds - 1);
    const MeasureResult res = measure_traces(scored, threshold, opts);
    curve.points[i] = RocPoint{threshold, res.fa_per_hour, res.fr_rate};
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    if (curve.points[i].fr_rate < curve.points[i - 1].fr_rate) curve.fr_monotone = false;
  curve.validate();
  return curve;
}

OperatingPoint fr_at_fa(const RocCurve& curve, double target_fa_per_hour) {
  if (curve.points.empty()) throw ValidationError("fr_at_fa: empty curve");
  const auto& pts = curve.points;

  // First point already at or under the target: its FR is the answer.
  if (pts.front().fa_per_hour <= target_fa_per_hour) {
    return OperatingPoint{pts.front().fr_rate, pts.front().threshold, pts.front().fa_per_hour,
                          false};
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].fa_per_hour <= target_fa_per_hour) {
      const auto& a = pts[i - 1];  // fa above target
      const auto& b = pts[i];      // fa at or below target
      const double den = a.fa_per_hour - b.fa_per_hour;
      if (den <= 0.0) return OperatingPoint{b.fr_rate, b.threshold, b.fa_per_hour, false};
      const double w = (a.fa_per_hour - target_fa_per_hour) / den;
      return OperatingPoint{a.fr_rate + w * (b.fr_rate - a.fr_rate),
                            a.threshold + w * (b.threshold - a.threshold), target_fa_per_hour,
                            false};
    }
  }
  // No threshold reached the target; report the strictest point and flag it.
  return OperatingPoint{pts.back().fr_rate, pts.back().threshold, pts.back().fa_per_hour, true};
}

void write_roc_csv(const RocCurve& curve, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write roc csv: " + path);
  out << "threshold,fa_per_hour,fr_rate\n";
  out.precision(17);
  for (const auto& p : curve.points)
    out << p.threshold << "," << p.fa_per_hour << "," << p.fr_rate << "\n";
  if (!out) throw IoError("short write on roc csv: " + path);
}

void write_roc_svg(const RocCurve& curve, const std::string& path) {
  // FA/h on a log x-axis against FR on a linear y-axis.
  constexpr double kW = 640, kH = 480, kPad = 50;
  double fa_max = 1e-3;
  for (const auto& p : curve.points) fa_max = std::max(fa_max, p.fa_per_hour);
  const double fa_min = 1e-3;
  auto x_of = [&](double fa) {
    const double lf = std::log10(std::max(fa, fa_min));
    const double lo = std::log10(fa_min), hi = std::log10(fa_max * 1.05);
    return kPad + (lf - lo) / (hi - lo) * (kW - 2 * kPad);
  };
  auto y_of = [&](double fr) { return kH - kPad - fr * (kH - 2 * kPad); };

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write roc svg: " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<line x1='" << kPad << "' y1='" << kH - kPad << "' x2='" << kW - kPad << "' y2='"
      << kH - kPad << "' stroke='black'/>\n";
  out << "<line x1='" << kPad << "' y1='" << kPad << "' x2='" << kPad << "' y2='" << kH - kPad
      << "' stroke='black'/>\n";
  out << "<text x='" << kW / 2 << "' y='" << kH - 12
      << "' text-anchor='middle' font-size='13'>false accepts per hour (log)</text>\n";
  out << "<text x='14' y='" << kH / 2 << "' font-size='13' text-anchor='middle' "
      << "transform='rotate(-90 14 " << kH / 2 << ")'>false reject rate</text>\n";
  out << "<polyline fill='none' stroke='steelblue' stroke-width='1.5' points='";
  for (const auto& p : curve.points) out << x_of(p.fa_per_hour) << "," << y_of(p.fr_rate) << " ";
  out << "'/>\n</svg>\n";
  if (!out) throw IoError("short write on roc svg: " + path);
}

}  // namespace kwst
