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

#include "kwst/nn.h"

#include <cmath>

#include "kwst/error.h"

namespace kwst {

void SvdfParams::validate() const {
  if (time_filters.rows() != feature_filters.rows() || bias.cols() != feature_filters.rows() ||
      bias.rows() != 1 || time_filters.cols() < 1) {
    throw NumericError("svdf: inconsistent parameter shapes");
  }
}

void ProjParams::validate() const {
  if (bias.rows() != 1 || bias.cols() != weight.rows())
    throw NumericError("projection: inconsistent parameter shapes");
}

SvdfState make_svdf_state(const SvdfParams& p) {
  return SvdfState{Matrix(p.kernel() - 1, p.out_channels())};
}

Matrix svdf_forward(const Matrix& x, const SvdfParams& p, SvdfCache* cache, SvdfState* state) {
  p.validate();
  const int t_count = x.rows();
  const int c_in = p.in_channels();
  const int c_out = p.out_channels();
  const int k = p.kernel();
  if (x.cols() != c_in) throw NumericError("svdf: input width mismatch");
  if (state && (state->memory.rows() != k - 1 || state->memory.cols() != c_out))
    throw NumericError("svdf: state shape mismatch");

  Matrix s(t_count, c_out);
  for (int t = 0; t < t_count; ++t) {
    const double* xr = x.row(t);
    double* sr = s.row(t);
    for (int c = 0; c < c_out; ++c) {
      const double* f = p.feature_filters.row(c);
      double acc = 0.0;
      for (int i = 0; i < c_in; ++i) acc += f[i] * xr[i];
      sr[c] = acc;
    }
  }

  // s at a negative chunk index comes from the state memory (or zero padding).
  auto s_at = [&](int t, int c) -> double {
    if (t >= 0) return s(t, c);
    if (state == nullptr) return 0.0;
    const int row = (k - 1) + t;  // t in [-(k-1), -1] -> rows oldest..newest
    return state->memory(row, c);
  };

  Matrix z(t_count, c_out);
  for (int t = 0; t < t_count; ++t) {
    double* zr = z.row(t);
    for (int c = 0; c < c_out; ++c) {
      const double* tf = p.time_filters.row(c);
      double acc = p.bias(0, c);
      const int jmax = state ? k : std::min(k, t + 1);
      for (int j = 0; j < jmax; ++j) acc += tf[j] * s_at(t - j, c);
      zr[c] = acc;
    }
  }

  Matrix y(t_count, c_out);
  for (int t = 0; t < t_count; ++t)
    for (int c = 0; c < c_out; ++c) y(t, c) = z(t, c) > 0.0 ? z(t, c) : 0.0;
  y.check_finite("svdf output");

  if (state && k > 1) {
    Matrix next(k - 1, c_out);
    for (int r = 0; r < k - 1; ++r) {
      const int t = t_count - (k - 1) + r;  // the last k-1 projections
      for (int c = 0; c < c_out; ++c) next(r, c) = s_at(t, c);
    }
    state->memory = std::move(next);
  }

  if (cache) {
    cache->projections = std::move(s);
    cache->preactivations = std::move(z);
  }
  return y;
}

Matrix svdf_backward(const Matrix& x, const SvdfParams& p, const SvdfCache& cache,
                     const Matrix& d_out, SvdfGrads* grads) {
  p.validate();
  const int t_count = x.rows();
  const int c_in = p.in_channels();
  const int c_out = p.out_channels();
  const int k = p.kernel();
  if (d_out.rows() != t_count || d_out.cols() != c_out)
    throw NumericError("svdf backward: gradient shape mismatch");
  if (cache.projections.rows() != t_count || cache.preactivations.rows() != t_count)
    throw NumericError("svdf backward: cache shape mismatch");

  Matrix dz(t_count, c_out);
  for (int t = 0; t < t_count; ++t)
    for (int c = 0; c < c_out; ++c)
      dz(t, c) = cache.preactivations(t, c) > 0.0 ? d_out(t, c) : 0.0;

  if (grads) {
    grads->d_feature_filters = Matrix(c_out, c_in);
    grads->d_time_filters = Matrix(c_out, k);
    grads->d_bias = Matrix(1, c_out);
  }

  if (grads) {
    for (int t = 0; t < t_count; ++t)
      for (int c = 0; c < c_out; ++c) grads->d_bias(0, c) += dz(t, c);

    for (int c = 0; c < c_out; ++c) {
      double* dtf = grads->d_time_filters.row(c);
      for (int j = 0; j < k; ++j) {
        double acc = 0.0;
        for (int t = j; t < t_count; ++t) acc += dz(t, c) * cache.projections(t - j, c);
        dtf[j] = acc;
      }
    }
  }

  // ds[t][c] = sum_j dz[t+j][c] * tf[c][j]
  Matrix ds(t_count, c_out);
  for (int t = 0; t < t_count; ++t) {
    double* dsr = ds.row(t);
    for (int c = 0; c < c_out; ++c) {
      const double* tf = p.time_filters.row(c);
      double acc = 0.0;
      const int jmax = std::min(k, t_count - t);
      for (int j = 0; j < jmax; ++j) acc += dz(t + j, c) * tf[j];
      dsr[c] = acc;
    }
  }

  if (grads) {
    for (int t = 0; t < t_count; ++t) {
      const double* xr = x.row(t);
      const double* dsr = ds.row(t);
      for (int c = 0; c < c_out; ++c) {
        double* dff = grads->d_feature_filters.row(c);
        const double d = dsr[c];
        if (d == 0.0) continue;
        for (int i = 0; i < c_in; ++i) dff[i] += d * xr[i];
      }
    }
  }

  Matrix dx(t_count, c_in);
  for (int t = 0; t < t_count; ++t) {
    const double* dsr = ds.row(t);
    double* dxr = dx.row(t);
    for (int c = 0; c < c_out; ++c) {
      const double d = dsr[c];
      if (d == 0.0) continue;
      const double* f = p.feature_filters.row(c);
      for (int i = 0; i < c_in; ++i) dxr[i] += d * f[i];
    }
  }
  return dx;
}

Matrix projection_forward(const Matrix& x, const ProjParams& p) {
  p.validate();
  const int t_count = x.rows();
  const int c_in = p.in_channels();
  const int c_out = p.out_channels();
  if (x.cols() != c_in) throw NumericError("projection: input width mismatch");

  Matrix y(t_count, c_out);
  for (int t = 0; t < t_count; ++t) {
    const double* xr = x.row(t);
    double* yr = y.row(t);
    for (int c = 0; c < c_out; ++c) {
      const double* w = p.weight.row(c);
      double acc = p.bias(0, c);
      for (int i = 0; i < c_in; ++i) acc += w[i] * xr[i];
      yr[c] = acc;
    }
  }
  y.check_finite("projection output");
  return y;
}

Matrix projection_backward(const Matrix& x, const ProjParams& p, const Matrix& d_out,
                           ProjGrads* grads) {
  p.validate();
  const int t_count = x.rows();
  const int c_in = p.in_channels();
  const int c_out = p.out_channels();
  if (d_out.rows() != t_count || d_out.cols() != c_out)
    throw NumericError("projection backward: gradient shape mismatch");

  if (grads) {
    grads->d_weight = Matrix(c_out, c_in);
    grads->d_bias = Matrix(1, c_out);
    for (int t = 0; t < t_count; ++t) {
      const double* xr = x.row(t);
      const double* dr = d_out.row(t);
      for (int c = 0; c < c_out; ++c) {
        grads->d_bias(0, c) += dr[c];
        double* dw = grads->d_weight.row(c);
        const double d = dr[c];
        for (int i = 0; i < c_in; ++i) dw[i] += d * xr[i];
      }
    }
  }

  Matrix dx(t_count, c_in);
  for (int t = 0; t < t_count; ++t) {
    const double* dr = d_out.row(t);
    double* dxr = dx.row(t);
    for (int c = 0; c < c_out; ++c) {
      const double d = dr[c];
      if (d == 0.0) continue;
      const double* w = p.weight.row(c);
      for (int i = 0; i < c_in; ++i) dxr[i] += d * w[i];
    }
  }
  return dx;
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.data())
    if (v < 0.0) v = 0.0;
  return y;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix probs(logits.rows(), logits.cols());
  for (int t = 0; t < logits.rows(); ++t) {
    const double* lr = logits.row(t);
    double* pr = probs.row(t);
    double mx = lr[0];
    for (int c = 1; c < logits.cols(); ++c) mx = std::max(mx, lr[c]);
    double sum = 0.0;
    for (int c = 0; c < logits.cols(); ++c) {
      pr[c] = std::exp(lr[c] - mx);
      sum += pr[c];
    }
    for (int c = 0; c < logits.cols(); ++c) pr[c] /= sum;
  }
  probs.check_finite("softmax output");
  return probs;
}

Matrix softmax_backward_rows(const Matrix& probs, const Matrix& d_probs) {
  if (!probs.same_shape(d_probs)) throw NumericError("softmax backward: shape mismatch");
  Matrix dz(probs.rows(), probs.cols());
  for (int t = 0; t < probs.rows(); ++t) {
    const double* pr = probs.row(t);
    const double* dr = d_probs.row(t);
    double dot = 0.0;
    for (int c = 0; c < probs.cols(); ++c) dot += dr[c] * pr[c];
    double* dzr = dz.row(t);
    for (int c = 0; c < probs.cols(); ++c) dzr[c] = pr[c] * (dr[c] - dot);
  }
  return dz;
}

void sgd_step(Matrix& params, const Matrix& grads, double lr) {
  params.axpy(-lr, grads);
}

}  // namespace kwst
