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

// Acceptance suite. Each criterion prints one [PASS]/[FAIL] line; the
// process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kwst/augment.h"
#include "kwst/checkpoint.h"
#include "kwst/dataset.h"
#include "kwst/error.h"
#include "kwst/eval.h"
#include "kwst/frontend.h"
#include "kwst/losses.h"
#include "kwst/model.h"
#include "kwst/rng.h"
#include "kwst/train.h"

namespace fs = std::filesystem;
using namespace kwst;

namespace {

int g_failures = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-22s %s\n", pass ? "PASS" : "FAIL", criterion, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

Matrix random_matrix(int r, int c, RngStream& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data()) v = scale * rng.uniform(-1.0, 1.0);
  return m;
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
}

// ---------------------------------------------------------------------------
// Criterion 1: analytic gradients vs central finite differences (h = 1e-6)
// over >= 20 random tiny configurations, layer-level and full-model through
// each loss. Max relative error < 1e-5, runtime < 30 s.

double fd_check_svdf(std::uint64_t seed) {
  RngStream rng(derive_key(seed, "acc-svdf"));
  const int t_count = 5 + static_cast<int>(rng.uniform_int(0, 3));
  const int c_in = 2 + static_cast<int>(rng.uniform_int(0, 2));
  const int c_out = 2 + static_cast<int>(rng.uniform_int(0, 2));
  const int k = 1 + static_cast<int>(rng.uniform_int(0, 4));
  SvdfParams p;
  p.feature_filters = random_matrix(c_out, c_in, rng, 0.8);
  p.time_filters = random_matrix(c_out, k, rng, 0.8);
  p.bias = random_matrix(1, c_out, rng, 0.2);
  Matrix x = random_matrix(t_count, c_in, rng);
  const Matrix w = random_matrix(t_count, c_out, rng);

  SvdfCache cache;
  svdf_forward(x, p, &cache);
  SvdfGrads grads;
  const Matrix dx = svdf_backward(x, p, cache, w, &grads);

  auto probe = [&](const SvdfParams& q, const Matrix& xx) {
    const Matrix y = svdf_forward(xx, q);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.data().size(); ++i) acc += y.data()[i] * w.data()[i];
    return acc;
  };

  double max_rel = 0.0;
  const double h = 1e-6;
  SvdfParams pm = p;
  auto sweep = [&](Matrix& target, const Matrix& analytic) {
    for (std::size_t i = 0; i < target.data().size(); ++i) {
      const double keep = target.data()[i];
      target.data()[i] = keep + h;
      const double up = probe(pm, x);
      target.data()[i] = keep - h;
      const double dn = probe(pm, x);
      target.data()[i] = keep;
      max_rel = std::max(max_rel, relative_error(analytic.data()[i], (up - dn) / (2 * h)));
    }
  };
  sweep(pm.feature_filters, grads.d_feature_filters);
  sweep(pm.time_filters, grads.d_time_filters);
  sweep(pm.bias, grads.d_bias);
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    const double keep = x.data()[i];
    x.data()[i] = keep + h;
    const double up = probe(p, x);
    x.data()[i] = keep - h;
    const double dn = probe(p, x);
    x.data()[i] = keep;
    max_rel = std::max(max_rel, relative_error(dx.data()[i], (up - dn) / (2 * h)));
  }
  return max_rel;
}

double fd_check_projection(std::uint64_t seed) {
  RngStream rng(derive_key(seed, "acc-proj"));
  const int t_count = 4 + static_cast<int>(rng.uniform_int(0, 3));
  const int c_in = 2 + static_cast<int>(rng.uniform_int(0, 3));
  const int c_out = 2 + static_cast<int>(rng.uniform_int(0, 3));
  ProjParams p;
  p.weight = random_matrix(c_out, c_in, rng);
  p.bias = random_matrix(1, c_out, rng, 0.3);
  Matrix x = random_matrix(t_count, c_in, rng);
  const Matrix w = random_matrix(t_count, c_out, rng);

  ProjGrads grads;
  const Matrix dx = projection_backward(x, p, w, &grads);
  auto probe = [&](const ProjParams& q, const Matrix& xx) {
    const Matrix y = projection_forward(xx, q);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.data().size(); ++i) acc += y.data()[i] * w.data()[i];
    return acc;
  };
  double max_rel = 0.0;
  const double h = 1e-6;
  ProjParams pm = p;
  auto sweep = [&](Matrix& target, const Matrix& analytic) {
    for (std::size_t i = 0; i < target.data().size(); ++i) {
      const double keep = target.data()[i];
      target.data()[i] = keep + h;
      const double up = probe(pm, x);
      target.data()[i] = keep - h;
      const double dn = probe(pm, x);
      target.data()[i] = keep;
      max_rel = std::max(max_rel, relative_error(analytic.data()[i], (up - dn) / (2 * h)));
    }
  };
  sweep(pm.weight, grads.d_weight);
  sweep(pm.bias, grads.d_bias);
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    const double keep = x.data()[i];
    x.data()[i] = keep + h;
    const double up = probe(p, x);
    x.data()[i] = keep - h;
    const double dn = probe(p, x);
    x.data()[i] = keep;
    max_rel = std::max(max_rel, relative_error(dx.data()[i], (up - dn) / (2 * h)));
  }
  return max_rel;
}

double fd_check_full_model(std::uint64_t seed, bool distillation) {
  const ArchConfig arch = make_tiny_arch(4, 3, 3);
  const int t_count = 6;
  ModelParams params = init_params(arch, derive_key(seed, "acc-full"));
  // Push every coordinate off zero so no relu preactivation sits on the kink,
  // where central differences are meaningless.
  RngStream nudge(derive_key(seed, "acc-full-nudge"));
  for (Matrix* m : params.tensors())
    for (double& v : m->data()) v += nudge.uniform(0.02, 0.08) * (v >= 0 ? 1.0 : -1.0);

  Spectrogram spec;
  spec.frames = Matrix(t_count, arch.input_dim);
  RngStream srng(derive_key(seed, "acc-full-in"));
  for (double& v : spec.frames.data()) v = srng.uniform(-2.0, 2.0);

  const ModelOutput teacher = forward(spec, init_params(arch, 4242), arch);
  HardLabelSequence label;
  label.positive = true;
  label.keyword_span = {1, 5};
  label.encoder_units = {0, 1, 1, 2, 2, 0};
  const double alpha = 0.7;

  auto loss_value = [&](const ModelParams& p) {
    const ModelOutput out = forward(spec, p, arch);
    return distillation ? student_teacher_loss(teacher, out, alpha).total
                        : maxpool_supervised_loss(out, label, alpha).total;
  };

  ForwardTrace trace;
  const ModelOutput out = forward(spec, params, arch, &trace);
  Matrix d_dec, d_enc;
  if (distillation) {
    student_teacher_loss_grads(teacher, out, alpha, &d_dec, &d_enc);
  } else {
    maxpool_supervised_loss_grads(out, label, alpha, &d_dec, &d_enc);
  }
  const ModelParams grads = backward(params, arch, trace, d_enc, d_dec);

  double max_rel = 0.0;
  const double h = 1e-6;
  auto analytic = grads.tensors();
  auto tensors = params.tensors();
  for (std::size_t ti = 0; ti < tensors.size(); ++ti) {
    Matrix& m = *tensors[ti];
    for (std::size_t i = 0; i < m.data().size(); ++i) {
      const double keep = m.data()[i];
      m.data()[i] = keep + h;
      const double up = loss_value(params);
      m.data()[i] = keep - h;
      const double dn = loss_value(params);
      m.data()[i] = keep;
      max_rel = std::max(max_rel, relative_error(analytic[ti]->data()[i], (up - dn) / (2 * h)));
    }
  }
  return max_rel;
}

void criterion_1() {
  const double t0 = now_seconds();
  double max_rel = 0.0;
  int configs = 0;
  for (std::uint64_t s = 0; s < 8; ++s, ++configs) max_rel = std::max(max_rel, fd_check_svdf(s));
  for (std::uint64_t s = 0; s < 4; ++s, ++configs)
    max_rel = std::max(max_rel, fd_check_projection(s));
  for (std::uint64_t s = 0; s < 4; ++s, ++configs)
    max_rel = std::max(max_rel, fd_check_full_model(s, false));
  for (std::uint64_t s = 0; s < 4; ++s, ++configs)
    max_rel = std::max(max_rel, fd_check_full_model(s, true));
  const double dt = now_seconds() - t0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d configs, max rel err %.3e (< 1e-5), %.1f s (< 30 s)",
                configs, max_rel, dt);
  report(1, "gradient suite", configs >= 20 && max_rel < 1e-5 && dt < 30.0, buf);
}

// ---------------------------------------------------------------------------
// Criterion 2: streaming equals batch forward, max abs diff < 1e-9, over 20
// random utterances on the full default architecture.

void criterion_2() {
  const ArchConfig arch;
  double max_diff = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams params = init_params(arch, derive_key(trial, "acc-stream-p"));
    RngStream rng(derive_key(trial, "acc-stream-x"));
    Spectrogram spec;
    spec.frames = Matrix(20 + static_cast<int>(rng.uniform_int(0, 30)), arch.input_dim);
    for (double& v : spec.frames.data()) v = rng.uniform(-2.0, 2.0);
    mean_normalize(spec.frames);

    const ModelOutput batch = forward(spec, params, arch);
    StreamState state = make_stream_state(params, /*normalize_input=*/false);
    std::vector<double> enc, dec, frame(arch.input_dim);
    for (int t = 0; t < spec.frames.rows(); ++t) {
      for (int c = 0; c < arch.input_dim; ++c) frame[c] = spec.frames(t, c);
      stream_step(frame, state, params, arch, &enc, &dec);
      for (int c = 0; c < arch.encoder_classes; ++c)
        max_diff = std::max(max_diff, std::abs(enc[c] - batch.encoder_probs(t, c)));
      for (int c = 0; c < kDecoderClasses; ++c)
        max_diff = std::max(max_diff, std::abs(dec[c] - batch.decoder_probs(t, c)));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "20 utterances, max abs diff %.3e (< 1e-9)", max_diff);
  report(2, "streaming equivalence", max_diff < 1e-9, buf);
}

// ---------------------------------------------------------------------------
// Criterion 3: spec-augment masked fraction vs brute-force enumeration of the
// discrete (width, start) draw space, 10000 draws within 3 standard errors;
// masked entries exactly mask_value; identity at zero widths.

double expected_union_count(int bins, int max_w) {
  struct Draw {
    int start, width;
    double prob;
  };
  std::vector<Draw> draws;
  for (int w = 0; w <= max_w; ++w) {
    const int starts = bins - w + 1;
    for (int s = 0; s < starts; ++s)
      draws.push_back({s, w, 1.0 / ((max_w + 1) * static_cast<double>(starts))});
  }
  double expect = 0.0;
  for (const Draw& a : draws)
    for (const Draw& b : draws) {
      const int lo = std::max(a.start, b.start);
      const int hi = std::min(a.start + a.width, b.start + b.width);
      expect += a.prob * b.prob * (a.width + b.width - std::max(0, hi - lo));
    }
  return expect;
}

void criterion_3() {
  AugmentationPolicy policy;  // defaults: 2 x 8 freq, 2 x 10 time, mask 0
  const int t_count = 100, bins = 40, n_draws = 10000;
  const double e_cols = expected_union_count(bins, policy.max_freq_width);
  const double e_rows = expected_union_count(t_count, policy.max_time_width);
  const double expect = 1.0 - (1.0 - e_cols / bins) * (1.0 - e_rows / t_count);

  Spectrogram ones;
  ones.frames = Matrix(t_count, bins, 1.0);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const Spectrogram out = spec_augment(ones, policy, derive_key(1234, "acc-aug", i));
    int masked = 0;
    for (double v : out.frames.data()) masked += v == 0.0;
    const double frac = static_cast<double>(masked) / (t_count * bins);
    sum += frac;
    sum2 += frac * frac;
  }
  const double mean = sum / n_draws;
  const double se = std::sqrt((sum2 / n_draws - mean * mean) / n_draws);
  const bool fraction_ok = std::abs(mean - expect) < 3.0 * se;

  // Exactness: every output entry is either the exact mask value or
  // bit-identical to the input.
  AugmentationPolicy exact_policy = policy;
  exact_policy.mask_value = -7.5;
  Spectrogram spec;
  spec.frames = Matrix(64, bins);
  RngStream rng(derive_key(5, "acc-aug-x"));
  for (double& v : spec.frames.data()) v = rng.uniform(1.0, 2.0);
  bool exact_ok = true;
  int masked_entries = 0;
  for (int i = 0; i < 50; ++i) {
    const Spectrogram out = spec_augment(spec, exact_policy, derive_key(77, "acc-aug-e", i));
    for (std::size_t j = 0; j < out.frames.data().size(); ++j) {
      const double v = out.frames.data()[j];
      if (v == -7.5) {
        ++masked_entries;
      } else if (v != spec.frames.data()[j]) {
        exact_ok = false;
      }
    }
  }
  exact_ok = exact_ok && masked_entries > 0;

  AugmentationPolicy zero = policy;
  zero.max_freq_width = 0;
  zero.max_time_width = 0;
  const bool identity_ok =
      spec_augment(spec, zero, derive_key(88, "acc-aug-z")).frames.equals(spec.frames);

  char buf[180];
  std::snprintf(buf, sizeof(buf),
                "mean %.5f vs exact %.5f (|diff| %.2e < 3se %.2e), exact-mask %s, identity %s",
                mean, expect, std::abs(mean - expect), 3.0 * se, exact_ok ? "ok" : "BAD",
                identity_ok ? "ok" : "BAD");
  report(3, "augmentation oracle", fraction_ok && exact_ok && identity_ok, buf);
}

// ---------------------------------------------------------------------------
// Shared small-corpus fixture for criteria 4, 5, 6, 8, 9.

struct SmallFixture {
  fs::path dir;
  DatasetManifest labeled, unlabeled, test;

  explicit SmallFixture(const fs::path& base) : dir(base) {
    fs::remove_all(dir);
    CorpusSpec cs;
    cs.seed = 303;
    cs.n_labeled_pos = 4;
    cs.n_labeled_neg = 4;
    cs.n_unlabeled = 8;
    cs.n_test = 6;
    cs.clip_seconds = 0.9;
    cs.snr_db_low = 8;
    cs.snr_db_high = 25;
    const DatasetManifest manifest = generate_synthetic_corpus(cs, dir.string());
    labeled = manifest.subset(Split::kTrainLabeled);
    unlabeled = manifest.subset(Split::kTrainUnlabeled);
    test = manifest.subset(Split::kTest);
  }
};

ArchConfig small_arch() {
  ArchConfig arch;
  arch.input_dim = 40;
  arch.encoder_svdf_channels = {6, 6, 6, 6};
  arch.decoder_svdf_channels = {6, 6, 6};
  arch.svdf_kernel = 4;
  arch.encoder_hidden = 8;
  arch.encoder_classes = 3;
  return arch;
}

TrainingConfig small_config(TrainingMode mode) {
  TrainingConfig cfg;
  cfg.mode = mode;
  cfg.arch = small_arch();
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.lr = 0.02;
  cfg.seed = 99;
  cfg.eval_n_thresholds = 11;
  return cfg;
}

// Criterion 4: routing contract digests over every batch.
void criterion_4(const SmallFixture& fx) {
  const ModelCheckpoint teacher =
      train_teacher(fx.labeled, small_config(TrainingMode::kBaselineMp));

  int shared_batches = 0, shared_equal = 0;
  {
    TrainingConfig cfg = small_config(TrainingMode::kStSaug);
    train_student(teacher, fx.labeled, fx.unlabeled, cfg, [&](const BatchTrace& t) {
      ++shared_batches;
      shared_equal += t.teacher_digest == t.student_digest;
    });
  }
  int ns_batches = 0, ns_clean = 0;
  {
    TrainingConfig cfg = small_config(TrainingMode::kStSaugNs);
    train_student(teacher, fx.labeled, fx.unlabeled, cfg, [&](const BatchTrace& t) {
      ++ns_batches;
      ns_clean += t.teacher_digest == t.clean_digest;
    });
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "st_saug %d/%d teacher==student, st_saug_ns %d/%d teacher==clean",
                shared_equal, shared_batches, ns_clean, ns_batches);
  report(4, "routing contract",
         shared_batches > 0 && shared_equal == shared_batches && ns_batches > 0 &&
             ns_clean == ns_batches,
         buf);
}

// Criterion 5: with the student initialized to the teacher and augmentation
// disabled, the first batch's distillation loss equals the teacher's
// alpha-weighted output entropy within 1e-9.
void criterion_5(const SmallFixture& fx) {
  const ModelCheckpoint teacher =
      train_teacher(fx.labeled, small_config(TrainingMode::kBaselineMp));

  TrainingConfig scfg = small_config(TrainingMode::kStSaug);
  scfg.alpha = 1.3;
  scfg.epochs = 1;
  scfg.batch_size = 16;  // the whole pool in one batch
  scfg.augmentation.classic_enabled = false;
  scfg.augmentation.max_freq_width = 0;  // zero-width masks draw only no-ops
  scfg.augmentation.max_time_width = 0;

  double first_loss = -1.0;
  train_student(
      teacher, fx.labeled, fx.unlabeled, scfg,
      [&](const BatchTrace& t) {
        if (first_loss < 0) first_loss = t.loss;
      },
      &teacher.params);

  double expect = 0.0;
  int n = 0;
  for (const DatasetManifest* m : {&fx.labeled, &fx.unlabeled}) {
    for (const auto& rec : m->records) {
      const Spectrogram spec = extract_features(read_wav(m->resolve_path(rec)));
      const ModelOutput out = forward(spec, teacher.params, scfg.arch);
      expect +=
          mean_row_entropy(out.decoder_probs) + scfg.alpha * mean_row_entropy(out.encoder_probs);
      ++n;
    }
  }
  expect /= n;
  const double diff = std::abs(first_loss - expect);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "initial loss %.12f vs entropy %.12f, |diff| %.2e (< 1e-9)",
                first_loss, expect, diff);
  report(5, "distillation sanity", diff < 1e-9, buf);
}

// ---------------------------------------------------------------------------
// Criterion 6: roc sweep fast path vs brute-force per-threshold re-detection,
// monotonicity invariants, and the hand-arithmetic cases.

void criterion_6(const DatasetManifest& test_split) {
  const ArchConfig arch = small_arch();
  bool exact_ok = true, fa_ok = true;
  int fr_monotone_count = 0;
  const int n_thresholds = 11;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ModelParams params = init_params(arch, derive_key(seed, "acc-roc"));
    RocCurve curve;
    try {
      curve = sweep_roc(test_split, params, arch, n_thresholds);
    } catch (const ValidationError&) {
      fa_ok = false;  // validate() rejects fa monotonicity violations
      continue;
    }
    fr_monotone_count += curve.fr_monotone;
    for (int i = 0; i < n_thresholds; ++i) {
      const double threshold = static_cast<double>(i) / (n_thresholds - 1);
      const MeasureResult res = measure(test_split, params, arch, threshold);
      exact_ok = exact_ok && curve.points[i].fa_per_hour == res.fa_per_hour &&
                 curve.points[i].fr_rate == res.fr_rate;
    }
  }
  const bool fr_ok = fr_monotone_count == 10;

  // Hand-simulated automaton: constant 0.9 posterior over 300 frames fires
  // exactly at frames 9, 109 and 209.
  const auto events =
      detect_from_trace(smooth_posterior(std::vector<double>(300, 0.9), 10), 0.5, {}, "");
  const bool automaton_ok = events.size() == 3 && events[0].frame_index == 9 &&
                            events[1].frame_index == 109 && events[2].frame_index == 209;

  // 3 events over 2 hours of negatives is exactly 1.5 FA/h.
  std::vector<UtteranceTrace> traces;
  for (int i = 0; i < 3; ++i) {
    UtteranceTrace tr;
    tr.positive = false;
    tr.duration_hours = 2.0 / 3.0;
    tr.smoothed.assign(400, 0.0);
    for (int t = 150; t < 170; ++t) tr.smoothed[t] = 0.9;
    traces.push_back(std::move(tr));
  }
  const MeasureResult arith = measure_traces(traces, 0.5, {});
  const bool arith_ok = arith.false_accepts == 3 && arith.fa_per_hour == 1.5;

  // Interpolated operating point from the documented example curve.
  RocCurve example;
  example.points = {{0.5, 0.2, 0.10}, {0.6, 0.05, 0.14}};
  const OperatingPoint op = fr_at_fa(example, 0.1);
  const bool interp_ok = std::abs(op.fr_rate - 0.1266666666666667) < 1e-12;

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "fast==brute %s, fa monotone %s, fr monotone %d/10, automaton %s, fa/h exact %s, "
                "interp %s",
                exact_ok ? "ok" : "BAD", fa_ok ? "ok" : "BAD", fr_monotone_count,
                automaton_ok ? "ok" : "BAD", arith_ok ? "ok" : "BAD", interp_ok ? "ok" : "BAD");
  report(6, "evaluation oracle",
         exact_ok && fa_ok && fr_ok && automaton_ok && arith_ok && interp_ok, buf);
}

// ---------------------------------------------------------------------------
// Criterion 7: directional toy experiment. 400 labeled + 1600 unlabeled train
// utterances, 400-utterance noisy test split (0-5 dB SNR); baseline teacher,
// one shared-noise student generation; over 5 seeds the median student FR at
// 1.0 FA/h must not exceed the median teacher FR; runtime < 15 min on one
// core. MP+sAug and noisy-student FRs are reported but not asserted.

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

TrainingConfig toy_config(std::uint64_t seed) {
  TrainingConfig cfg;
  cfg.mode = TrainingMode::kStSaug;
  cfg.generations = 1;
  cfg.alpha = 1.0;
  cfg.lr = 0.02;
  cfg.epochs = 60;
  cfg.student_epochs = 16;
  cfg.student_lr = 0.04;
  cfg.batch_size = 2;
  cfg.seed = seed;
  cfg.augmentation.snr_db_low = 15.0;
  cfg.augmentation.snr_db_high = 30.0;
  cfg.eval_target_fa_per_hour = 1.0;
  cfg.eval_n_thresholds = 101;
  return cfg;
}

void criterion_7(const fs::path& base) {
  const double t0 = now_seconds();

  CorpusSpec cs;
  cs.seed = 1;
  cs.n_labeled_pos = 200;
  cs.n_labeled_neg = 200;
  cs.n_unlabeled = 1600;
  cs.n_test = 400;
  cs.snr_db_low = 8.0;
  cs.snr_db_high = 25.0;
  cs.test_snr_db = {{0.0, 5.0}};
  cs.clip_seconds = 0.9;
  const fs::path corpus_dir = base / "toy_corpus";
  fs::remove_all(corpus_dir);
  const DatasetManifest manifest = generate_synthetic_corpus(cs, corpus_dir.string());
  const DatasetManifest labeled = manifest.subset(Split::kTrainLabeled);
  const DatasetManifest unlabeled = manifest.subset(Split::kTrainUnlabeled);
  const DatasetManifest test = manifest.subset(Split::kTest);

  std::vector<double> teacher_fr, student_fr;
  std::printf("    criterion 7 runs (FR at 1.0 FA/h on the 0-5 dB split):\n");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const TrainingConfig cfg = toy_config(seed);
    const fs::path run_dir = base / ("toy_run_s" + std::to_string(seed));
    fs::remove_all(run_dir);
    const auto reports = run_self_training(labeled, unlabeled, cfg, run_dir.string(), &test);
    teacher_fr.push_back(reports[0].eval.fr_rate);
    student_fr.push_back(reports[1].eval.fr_rate);
    std::printf("      seed %llu: teacher %6.2f%%  student(st_saug) %6.2f%%\n",
                (unsigned long long)seed, reports[0].eval.fr_rate * 100,
                reports[1].eval.fr_rate * 100);
    std::fflush(stdout);
  }

  // Reported, not asserted: supervised masking and noisy-student routing for
  // seed 1, the latter reusing the seed-1 teacher.
  {
    TrainingConfig mp = toy_config(1);
    mp.mode = TrainingMode::kMpSaug;
    const auto reports = run_self_training(labeled, unlabeled, mp, "", &test);
    std::printf("      seed 1 report-only: mp_saug teacher    %6.2f%%\n",
                reports[0].eval.fr_rate * 100);
    std::fflush(stdout);
  }
  {
    const ModelCheckpoint teacher =
        load_checkpoint((base / "toy_run_s1/g0/checkpoint.kwst").string());
    TrainingConfig ns = toy_config(1);
    ns.mode = TrainingMode::kStSaugNs;
    const ModelCheckpoint student = train_student(teacher, labeled, unlabeled, ns);
    const RocCurve curve = sweep_roc(test, student.params, student.arch, ns.eval_n_thresholds);
    const OperatingPoint op = fr_at_fa(curve, 1.0);
    std::printf("      seed 1 report-only: st_saug_ns student %6.2f%%\n", op.fr_rate * 100);
    std::fflush(stdout);
  }

  const double med_teacher = median(teacher_fr);
  const double med_student = median(student_fr);
  const double dt = now_seconds() - t0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "median student %.2f%% <= median teacher %.2f%%: %s, runtime %.0f s (< 900 s)",
                med_student * 100, med_teacher * 100, med_student <= med_teacher ? "yes" : "NO",
                dt);
  report(7, "toy end-to-end", med_student <= med_teacher && dt < 900.0, buf);
}

// ---------------------------------------------------------------------------
// Criterion 8: repeated selftrain runs are bit-identical across worker counts.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void criterion_8(const SmallFixture& fx, const fs::path& base) {
  TrainingConfig cfg = small_config(TrainingMode::kStSaug);
  cfg.generations = 2;

  const fs::path run_a = base / "det_run_a";
  const fs::path run_b = base / "det_run_b";
  fs::remove_all(run_a);
  fs::remove_all(run_b);

  setenv("KWST_THREADS", "1", 1);
  run_self_training(fx.labeled, fx.unlabeled, cfg, run_a.string(), &fx.test);
  setenv("KWST_THREADS", "4", 1);
  run_self_training(fx.labeled, fx.unlabeled, cfg, run_b.string(), &fx.test);
  unsetenv("KWST_THREADS");

  bool identical = true;
  for (int k = 0; k <= 2; ++k) {
    const std::string g = "g" + std::to_string(k);
    identical =
        identical && slurp(run_a / g / "checkpoint.kwst") == slurp(run_b / g / "checkpoint.kwst");
    identical = identical && slurp(run_a / g / "report.json") == slurp(run_b / g / "report.json");
  }
  report(8, "determinism", identical,
         identical ? "g0-g2 checkpoints and reports byte-identical across KWST_THREADS=1/4"
                   : "artifacts differ across worker counts");
}

// Criterion 9: generation hand-off. Retraining generation k+1 from the
// persisted generation-k checkpoint reproduces the recorded parameters
// bit-for-bit for k = 1..2.
void criterion_9(const SmallFixture& fx, const fs::path& base) {
  TrainingConfig cfg = small_config(TrainingMode::kStSaug);
  cfg.generations = 2;
  const fs::path run_dir = base / "det_run_a";  // written by criterion 8

  bool ok = true;
  std::string detail;
  for (int k = 0; k <= 1; ++k) {
    const ModelCheckpoint from =
        load_checkpoint((run_dir / ("g" + std::to_string(k)) / "checkpoint.kwst").string());
    const ModelCheckpoint next = train_student(from, fx.labeled, fx.unlabeled, cfg);
    const ModelCheckpoint recorded =
        load_checkpoint((run_dir / ("g" + std::to_string(k + 1)) / "checkpoint.kwst").string());
    const bool same = next.params.digest() == recorded.params.digest() &&
                      next.generation == recorded.generation;
    ok = ok && same;
    if (!detail.empty()) detail += ", ";
    detail += "g" + std::to_string(k) + "->g" + std::to_string(k + 1) + (same ? " ok" : " BAD");
  }
  report(9, "generation hand-off", ok, detail);
}

// Criterion 10: checkpoint round-trips bit-exactly on random parameter sets;
// corrupted payloads are rejected.
void criterion_10(const fs::path& base) {
  const fs::path path = base / "ckpt_roundtrip.kwst";
  bool roundtrip_ok = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ModelCheckpoint ckpt;
    ckpt.arch = seed % 2 == 0 ? small_arch()
                              : make_tiny_arch(3 + seed % 3, 2 + static_cast<int>(seed % 4), 3);
    ckpt.generation = static_cast<int>(seed % 4);
    ckpt.params = init_params(ckpt.arch, derive_key(seed, "acc-ckpt"));
    ckpt.training_config_hash = to_hex(seed);
    save_checkpoint(ckpt, path.string());
    const ModelCheckpoint back = load_checkpoint(path.string());
    roundtrip_ok = roundtrip_ok && flatten_params(back.params) == flatten_params(ckpt.params) &&
                   back.generation == ckpt.generation && back.arch == ckpt.arch &&
                   back.training_config_hash == ckpt.training_config_hash;
  }

  const std::string bytes = slurp(path);
  bool corrupt_ok = true;
  {
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes.substr(0, bytes.size() - 5);
    try {
      load_checkpoint(path.string());
      corrupt_ok = false;
    } catch (const CorruptionError&) {
    }
  }
  {
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes << "trailing";
    try {
      load_checkpoint(path.string());
      corrupt_ok = false;
    } catch (const CorruptionError&) {
    }
  }
  {
    std::string bad = bytes;
    bad[0] = 'Z';
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bad;
    try {
      load_checkpoint(path.string());
      corrupt_ok = false;
    } catch (const FormatError&) {
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "10 round trips %s, corruption rejected %s",
                roundtrip_ok ? "bit-exact" : "BAD", corrupt_ok ? "ok" : "BAD");
  report(10, "checkpoint round-trip", roundtrip_ok && corrupt_ok, buf);
}

}  // namespace

int main() {
  const fs::path base = fs::temp_directory_path() / "kwst_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);

  criterion_1();
  criterion_2();
  criterion_3();

  const SmallFixture fx(base / "small_corpus");
  criterion_4(fx);
  criterion_5(fx);
  criterion_6(fx.test);
  criterion_7(base);
  criterion_8(fx, base);
  criterion_9(fx, base);
  criterion_10(base);

  std::printf("%d/10 criteria passed\n", 10 - g_failures);
  if (g_failures == 0) fs::remove_all(base);
  return g_failures == 0 ? 0 : 1;
}
