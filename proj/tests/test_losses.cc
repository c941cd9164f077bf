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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kwst/error.h"
#include "kwst/losses.h"
#include "kwst/nn.h"
#include "kwst/rng.h"

using namespace kwst;

namespace {

Matrix uniform_rows(int t, int m) { return Matrix(t, m, 1.0 / m); }

Matrix random_stochastic(int t, int m, std::uint64_t key) {
  RngStream rng(key);
  Matrix out(t, m);
  for (int r = 0; r < t; ++r) {
    double sum = 0.0;
    for (int c = 0; c < m; ++c) {
      out(r, c) = rng.uniform(0.05, 1.0);
      sum += out(r, c);
    }
    for (int c = 0; c < m; ++c) out(r, c) /= sum;
  }
  return out;
}

ModelOutput fake_output(const Matrix& enc, const Matrix& dec) {
  return ModelOutput{enc, dec};
}

}  // namespace

TEST_CASE("cross entropy of a distribution with itself is its entropy") {
  const Matrix p = uniform_rows(5, 2);
  CHECK(cross_entropy_seq(p, p) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const Matrix q = random_stochastic(7, 4, 1);
  CHECK(cross_entropy_seq(q, q) == doctest::Approx(mean_row_entropy(q)).epsilon(1e-12));
}

TEST_CASE("cross entropy with a matching one-hot prediction is zero") {
  Matrix target(3, 2), pred(3, 2);
  for (int t = 0; t < 3; ++t) {
    target(t, 0) = 1.0;
    pred(t, 0) = 1.0;
  }
  CHECK(cross_entropy_seq(target, pred) == 0.0);
}

TEST_CASE("uniform prediction costs ln M for any target") {
  const int m = 5;
  const Matrix target = random_stochastic(6, m, 2);
  const Matrix pred = uniform_rows(6, m);
  CHECK(cross_entropy_seq(target, pred) == doctest::Approx(std::log(double(m))).epsilon(1e-12));
}

TEST_CASE("gibbs inequality: CE(t, p) >= H(t), equality iff p == t") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Matrix t = random_stochastic(4, 3, derive_key(seed, "t"));
    const Matrix p = random_stochastic(4, 3, derive_key(seed, "p"));
    const double ce = cross_entropy_seq(t, p);
    const double h = mean_row_entropy(t);
    CHECK(ce >= h - 1e-12);
    CHECK(cross_entropy_seq(t, t) == doctest::Approx(h).epsilon(1e-12));
    if (!t.equals(p)) CHECK(ce > h);
  }
}

TEST_CASE("cross entropy rejects shape mismatches") {
  CHECK_THROWS_AS(cross_entropy_seq(Matrix(3, 2), Matrix(2, 3)), NumericError);
}

TEST_CASE("student_teacher_loss: alpha composition") {
  const Matrix enc_t = random_stochastic(6, 4, 10), enc_s = random_stochastic(6, 4, 11);
  const Matrix dec_t = random_stochastic(6, 2, 12), dec_s = random_stochastic(6, 2, 13);
  const ModelOutput teacher = fake_output(enc_t, dec_t);
  const ModelOutput student = fake_output(enc_s, dec_s);

  const LossBreakdown a0 = student_teacher_loss(teacher, student, 0.0);
  CHECK(a0.total == doctest::Approx(a0.loss_d).epsilon(1e-12));

  const LossBreakdown a1 = student_teacher_loss(teacher, student, 1.0);
  const LossBreakdown a2 = student_teacher_loss(teacher, student, 2.0);
  CHECK(a2.total - a2.loss_d == doctest::Approx(2.0 * (a1.total - a1.loss_d)).epsilon(1e-12));
  CHECK(a1.total == doctest::Approx(1.0 * a1.loss_e + a1.loss_d).epsilon(1e-12));
}

TEST_CASE("student equal to teacher with uniform heads costs ln2 + alpha lnN") {
  const int n = 4, t_count = 9;
  const ModelOutput both = fake_output(uniform_rows(t_count, n), uniform_rows(t_count, 2));
  const double alpha = 1.7;
  const LossBreakdown b = student_teacher_loss(both, both, alpha);
  CHECK(b.total == doctest::Approx(std::log(2.0) + alpha * std::log(double(n))).epsilon(1e-12));
}

TEST_CASE("maxpool positive loss uses the span maximum only") {
  Matrix dec(3, 2);
  dec(0, kKeywordClass) = 0.2;
  dec(1, kKeywordClass) = 0.9;
  dec(2, kKeywordClass) = 0.4;
  for (int t = 0; t < 3; ++t) dec(t, kNonKeywordClass) = 1.0 - dec(t, kKeywordClass);
  const ModelOutput out = fake_output(uniform_rows(3, 4), dec);

  HardLabelSequence label;
  label.positive = true;
  label.keyword_span = {0, 3};
  label.encoder_units = {0, 0, 0};

  const LossBreakdown b = maxpool_supervised_loss(out, label, 0.0);
  CHECK(b.loss_d == doctest::Approx(-std::log(0.9)).epsilon(1e-12));
  CHECK(b.total == doctest::Approx(b.loss_d).epsilon(1e-12));

  // Probabilities outside the span do not change the decoder loss.
  Matrix dec2 = dec;
  dec2(2, kKeywordClass) = 0.1;
  dec2(2, kNonKeywordClass) = 0.9;
  HardLabelSequence label2 = label;
  label2.keyword_span = {0, 2};
  const LossBreakdown b2 =
      maxpool_supervised_loss(fake_output(uniform_rows(3, 4), dec2), label2, 0.0);
  CHECK(b2.loss_d == doctest::Approx(b.loss_d).epsilon(1e-12));
}

TEST_CASE("maxpool negative loss is zero when the non-keyword prob is one") {
  Matrix dec(4, 2);
  for (int t = 0; t < 4; ++t) dec(t, kNonKeywordClass) = 1.0;
  const ModelOutput out = fake_output(uniform_rows(4, 4), dec);
  HardLabelSequence label;
  label.positive = false;
  label.encoder_units = {0, 0, 0, 0};
  CHECK(maxpool_supervised_loss(out, label, 0.0).loss_d == 0.0);
}

TEST_CASE("maxpool positive gradient is nonzero only at the argmax frame") {
  const Matrix enc = random_stochastic(5, 4, 21);
  Matrix dec = random_stochastic(5, 2, 22);
  dec(2, kKeywordClass) = 0.95;  // unambiguous argmax inside the span
  dec(2, kNonKeywordClass) = 0.05;
  const ModelOutput out = fake_output(enc, dec);

  HardLabelSequence label;
  label.positive = true;
  label.keyword_span = {1, 5};
  label.encoder_units = {0, 1, 1, 2, 0};

  Matrix d_dec, d_enc;
  maxpool_supervised_loss_grads(out, label, 0.0, &d_dec, &d_enc);
  for (int t = 0; t < 5; ++t) {
    for (int c = 0; c < 2; ++c) {
      if (t == 2 && c == kKeywordClass) {
        CHECK(d_dec(t, c) == doctest::Approx(-1.0 / 0.95).epsilon(1e-12));
      } else {
        CHECK(d_dec(t, c) == 0.0);
      }
    }
  }

  // Finite-difference check at and off the argmax frame, through the loss.
  const double h = 1e-7;
  auto loss_at = [&](int t, double delta) {
    Matrix d = dec;
    d(t, kKeywordClass) += delta;
    return maxpool_supervised_loss(fake_output(enc, d), label, 0.0).loss_d;
  };
  const double fd_argmax = (loss_at(2, h) - loss_at(2, -h)) / (2 * h);
  CHECK(fd_argmax == doctest::Approx(-1.0 / 0.95).epsilon(1e-5));
  const double fd_off = (loss_at(3, h) - loss_at(3, -h)) / (2 * h);
  CHECK(fd_off == 0.0);
}

TEST_CASE("maxpool ties break to the lowest frame index") {
  Matrix dec(4, 2);
  for (int t = 0; t < 4; ++t) {
    dec(t, kKeywordClass) = 0.6;
    dec(t, kNonKeywordClass) = 0.4;
  }
  const ModelOutput out = fake_output(uniform_rows(4, 4), dec);
  HardLabelSequence label;
  label.positive = true;
  label.keyword_span = {1, 4};
  label.encoder_units = {0, 0, 0, 0};
  Matrix d_dec, d_enc;
  maxpool_supervised_loss_grads(out, label, 0.0, &d_dec, &d_enc);
  CHECK(d_dec(1, kKeywordClass) != 0.0);  // first frame of the span
  CHECK(d_dec(2, kKeywordClass) == 0.0);
  CHECK(d_dec(3, kKeywordClass) == 0.0);
}

TEST_CASE("positive utterances without a span are rejected") {
  const ModelOutput out = fake_output(uniform_rows(3, 4), uniform_rows(3, 2));
  HardLabelSequence label;
  label.positive = true;
  label.keyword_span = {2, 2};  // empty span
  label.encoder_units = {0, 0, 0};
  CHECK_THROWS_AS(maxpool_supervised_loss(out, label, 1.0), ValidationError);
}

TEST_CASE("soft label validation") {
  SoftLabelSequence labels;
  labels.decoder_targets = random_stochastic(4, 2, 31);
  labels.encoder_targets = random_stochastic(4, 3, 32);
  CHECK_NOTHROW(labels.validate());
  labels.encoder_targets(0, 0) += 0.5;
  CHECK_THROWS_AS(labels.validate(), NumericError);
}
