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

#include "kwst/losses.h"

#include <cmath>

#include "kwst/error.h"

namespace kwst {

namespace {

void check_row_stochastic(const Matrix& m, const char* what) {
  for (int t = 0; t < m.rows(); ++t) {
    double sum = 0.0;
    for (int c = 0; c < m.cols(); ++c) {
      const double v = m(t, c);
      if (v < -1e-9 || v > 1.0 + 1e-9) throw NumericError(std::string(what) + ": entry outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw NumericError(std::string(what) + ": row does not sum to 1");
  }
}

}  // namespace

void SoftLabelSequence::validate() const {
  if (decoder_targets.rows() != encoder_targets.rows())
    throw NumericError("soft labels: head length mismatch");
  check_row_stochastic(decoder_targets, "soft decoder targets");
  check_row_stochastic(encoder_targets, "soft encoder targets");
}

double cross_entropy_seq(const Matrix& target, const Matrix& pred) {
  if (!target.same_shape(pred)) throw NumericError("cross entropy: shape mismatch");
  if (target.rows() == 0) throw NumericError("cross entropy: empty sequence");
  double acc = 0.0;
  for (int t = 0; t < target.rows(); ++t) {
    const double* tr = target.row(t);
    const double* pr = pred.row(t);
    for (int c = 0; c < target.cols(); ++c) {
      if (tr[c] == 0.0) continue;
      acc -= tr[c] * std::log(std::max(pr[c], kProbClamp));
    }
  }
  return acc / target.rows();
}

Matrix cross_entropy_seq_grad(const Matrix& target, const Matrix& pred) {
  if (!target.same_shape(pred)) throw NumericError("cross entropy: shape mismatch");
  Matrix d(pred.rows(), pred.cols());
  const double inv_t = 1.0 / pred.rows();
  for (int t = 0; t < pred.rows(); ++t) {
    const double* tr = target.row(t);
    const double* pr = pred.row(t);
    double* dr = d.row(t);
    for (int c = 0; c < pred.cols(); ++c) {
      if (tr[c] == 0.0 || pr[c] <= kProbClamp) continue;
      dr[c] = -inv_t * tr[c] / pr[c];
    }
  }
  return d;
}

double mean_row_entropy(const Matrix& probs) {
  double acc = 0.0;
  for (int t = 0; t < probs.rows(); ++t) {
    const double* pr = probs.row(t);
    for (int c = 0; c < probs.cols(); ++c) {
      if (pr[c] <= 0.0) continue;
      acc -= pr[c] * std::log(pr[c]);
    }
  }
  return probs.rows() ? acc / probs.rows() : 0.0;
}

LossBreakdown student_teacher_loss(const ModelOutput& teacher_out, const ModelOutput& student_out,
                                   double alpha) {
  LossBreakdown b;
  b.alpha = alpha;
  b.loss_d = cross_entropy_seq(teacher_out.decoder_probs, student_out.decoder_probs);
  b.loss_e = cross_entropy_seq(teacher_out.encoder_probs, student_out.encoder_probs);
  b.total = alpha * b.loss_e + b.loss_d;
  return b;
}

void student_teacher_loss_grads(const ModelOutput& teacher_out, const ModelOutput& student_out,
                                double alpha, Matrix* d_student_dec, Matrix* d_student_enc) {
  *d_student_dec = cross_entropy_seq_grad(teacher_out.decoder_probs, student_out.decoder_probs);
  *d_student_enc = cross_entropy_seq_grad(teacher_out.encoder_probs, student_out.encoder_probs);
  d_student_enc->scale(alpha);
}

namespace {

// Argmax frame of the keyword posterior within the span; ties take the
// lowest index.
int maxpool_frame(const Matrix& dec_probs, const std::pair<int, int>& span) {
  int best = span.first;
  double best_p = dec_probs(span.first, kKeywordClass);
  for (int t = span.first + 1; t < span.second; ++t) {
    const double p = dec_probs(t, kKeywordClass);
    if (p > best_p) {
      best_p = p;
      best = t;
    }
  }
  return best;
}

void validate_hard_label(const ModelOutput& out, const HardLabelSequence& label) {
  const int t_count = out.decoder_probs.rows();
  if (label.positive) {
    if (label.keyword_span.first < 0 || label.keyword_span.first >= label.keyword_span.second ||
        label.keyword_span.second > t_count)
      throw ValidationError("maxpool loss: positive utterance without a valid keyword span");
  }
  if (static_cast<int>(label.encoder_units.size()) != t_count)
    throw ValidationError("maxpool loss: encoder unit length mismatch");
  for (int u : label.encoder_units)
    if (u < 0 || u >= out.encoder_probs.cols())
      throw ValidationError("maxpool loss: encoder unit out of range");
}

}  // namespace

LossBreakdown maxpool_supervised_loss(const ModelOutput& out, const HardLabelSequence& label,
                                      double alpha) {
  validate_hard_label(out, label);
  const int t_count = out.decoder_probs.rows();
  LossBreakdown b;
  b.alpha = alpha;

  if (label.positive) {
    const int t_star = maxpool_frame(out.decoder_probs, label.keyword_span);
    b.loss_d = -std::log(std::max(out.decoder_probs(t_star, kKeywordClass), kProbClamp));
  } else {
    double acc = 0.0;
    for (int t = 0; t < t_count; ++t)
      acc -= std::log(std::max(out.decoder_probs(t, kNonKeywordClass), kProbClamp));
    b.loss_d = acc / t_count;
  }

  double acc_e = 0.0;
  for (int t = 0; t < t_count; ++t)
    acc_e -= std::log(std::max(out.encoder_probs(t, label.encoder_units[t]), kProbClamp));
  b.loss_e = acc_e / t_count;

  b.total = alpha * b.loss_e + b.loss_d;
  return b;
}

void maxpool_supervised_loss_grads(const ModelOutput& out, const HardLabelSequence& label,
                                   double alpha, Matrix* d_dec, Matrix* d_enc) {
  validate_hard_label(out, label);
  const int t_count = out.decoder_probs.rows();
  *d_dec = Matrix(t_count, out.decoder_probs.cols());
  *d_enc = Matrix(t_count, out.encoder_probs.cols());

  if (label.positive) {
    const int t_star = maxpool_frame(out.decoder_probs, label.keyword_span);
    const double p = out.decoder_probs(t_star, kKeywordClass);
    if (p > kProbClamp) (*d_dec)(t_star, kKeywordClass) = -1.0 / p;
  } else {
    for (int t = 0; t < t_count; ++t) {
      const double p = out.decoder_probs(t, kNonKeywordClass);
      if (p > kProbClamp) (*d_dec)(t, kNonKeywordClass) = -1.0 / (t_count * p);
    }
  }

  for (int t = 0; t < t_count; ++t) {
    const double p = out.encoder_probs(t, label.encoder_units[t]);
    if (p > kProbClamp) (*d_enc)(t, label.encoder_units[t]) = -alpha / (t_count * p);
  }
}

}  // namespace kwst
