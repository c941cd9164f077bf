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

#ifndef KWST_LOSSES_H_
#define KWST_LOSSES_H_

#include <utility>
#include <vector>

#include "kwst/matrix.h"
#include "kwst/model.h"

namespace kwst {

// Predictions are clamped here before the log so silent zeros cannot
// produce -inf; gradients are zero inside the clamp region.
constexpr double kProbClamp = 1e-12;

struct LossBreakdown {
  double total = 0.0;
  double loss_d = 0.0;  // decoder head
  double loss_e = 0.0;  // encoder head
  double alpha = 0.0;   // total = alpha * loss_e + loss_d
};

// Per-frame teacher distributions for both heads.
struct SoftLabelSequence {
  Matrix decoder_targets;  // T x 2, row-stochastic
  Matrix encoder_targets;  // T x N, row-stochastic
  void validate() const;
};

// Supervised per-utterance label: utterance polarity with keyword span, and
// the per-frame sound-unit targets.
struct HardLabelSequence {
  bool positive = false;
  std::pair<int, int> keyword_span = {0, 0};  // [start, end), frames
  std::vector<int> encoder_units;             // length T, values in [0, N)
};

// Mean over frames of the per-frame cross entropy
//   (1/T) * sum_t sum_m -target[t][m] * ln(pred[t][m]).
double cross_entropy_seq(const Matrix& target, const Matrix& pred);

// dL/dpred of cross_entropy_seq.
Matrix cross_entropy_seq_grad(const Matrix& target, const Matrix& pred);

// Mean over frames of the per-frame entropy; the CE lower bound.
double mean_row_entropy(const Matrix& probs);

// Distillation loss: alpha * CE(teacher_enc, student_enc) + CE(teacher_dec,
// student_dec). The teacher is a constant; gradients flow only through the
// student outputs.
LossBreakdown student_teacher_loss(const ModelOutput& teacher_out, const ModelOutput& student_out,
                                   double alpha);
void student_teacher_loss_grads(const ModelOutput& teacher_out, const ModelOutput& student_out,
                                double alpha, Matrix* d_student_dec, Matrix* d_student_enc);

// Supervised baseline loss. Decoder part: for positives, -ln of the max
// keyword posterior within the span (ties break to the lowest frame index);
// for negatives, mean -ln of the non-keyword posterior over all frames.
// Encoder part: mean per-frame CE against the one-hot unit targets.
LossBreakdown maxpool_supervised_loss(const ModelOutput& out, const HardLabelSequence& label,
                                      double alpha);
void maxpool_supervised_loss_grads(const ModelOutput& out, const HardLabelSequence& label,
                                   double alpha, Matrix* d_dec, Matrix* d_enc);

}  // namespace kwst

#endif  // KWST_LOSSES_H_
