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

#ifndef KWST_NN_H_
#define KWST_NN_H_

#include "kwst/matrix.h"

namespace kwst {

// Rank-1 factored time x feature convolution. Per output channel c the input
// frame is first projected to a scalar s_t = feature_filters[c] . x_t, then a
// causal length-K filter runs over the projection sequence:
//   y[t][c] = relu(sum_{j=0..K-1} time_filters[c][j] * s[t-j] + bias[c])
// with zero left-padding (s at negative indices is 0).
struct SvdfParams {
  Matrix feature_filters;  // C_out x C_in
  Matrix time_filters;     // C_out x K
  Matrix bias;             // 1 x C_out

  int out_channels() const { return feature_filters.rows(); }
  int in_channels() const { return feature_filters.cols(); }
  int kernel() const { return time_filters.cols(); }
  void validate() const;
};

// Memory of the last K-1 feature projections, oldest row first: (K-1) x C_out.
// A zero memory equals the batch zero left-padding.
struct SvdfState {
  Matrix memory;
};

SvdfState make_svdf_state(const SvdfParams& p);

// Intermediates cached by the forward pass for the exact backward pass.
struct SvdfCache {
  Matrix projections;     // T x C_out, the s_t values
  Matrix preactivations;  // T x C_out, z before relu
};

// Batch forward. When `state` is given its memory supplies the left context
// and is advanced past the chunk, so chunked processing matches whole-sequence
// processing exactly.
Matrix svdf_forward(const Matrix& x, const SvdfParams& p, SvdfCache* cache = nullptr,
                    SvdfState* state = nullptr);

struct SvdfGrads {
  Matrix d_feature_filters;
  Matrix d_time_filters;
  Matrix d_bias;
};

// Analytic gradients of svdf_forward (zero left-padding case). Returns dL/dx.
Matrix svdf_backward(const Matrix& x, const SvdfParams& p, const SvdfCache& cache,
                     const Matrix& d_out, SvdfGrads* grads);

// Per-frame affine map y_t = W x_t + b (no activation).
struct ProjParams {
  Matrix weight;  // C_out x C_in
  Matrix bias;    // 1 x C_out

  int out_channels() const { return weight.rows(); }
  int in_channels() const { return weight.cols(); }
  void validate() const;
};

Matrix projection_forward(const Matrix& x, const ProjParams& p);

struct ProjGrads {
  Matrix d_weight;
  Matrix d_bias;
};

Matrix projection_backward(const Matrix& x, const ProjParams& p, const Matrix& d_out,
                           ProjGrads* grads);

Matrix relu(const Matrix& x);

// Row-wise stabilized softmax; each output row is positive and sums to 1.
Matrix softmax_rows(const Matrix& logits);

// Given probs = softmax_rows(logits) and dL/dprobs, returns dL/dlogits.
Matrix softmax_backward_rows(const Matrix& probs, const Matrix& d_probs);

// p <- p - lr * g, elementwise.
void sgd_step(Matrix& params, const Matrix& grads, double lr);

}  // namespace kwst

#endif  // KWST_NN_H_
