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

#include "kwst/matrix.h"

#include <cmath>
#include <string>

#include "kwst/error.h"
#include "kwst/rng.h"

namespace kwst {

void Matrix::axpy(double alpha, const Matrix& other) {
  if (!same_shape(other)) throw NumericError("axpy: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * other.data_[i];
}

void Matrix::scale(double alpha) {
  for (double& v : data_) v *= alpha;
}

void Matrix::fill(double v) {
  for (double& x : data_) x = v;
}

void Matrix::check_finite(const char* what) const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value in ") + what);
    }
  }
}

bool Matrix::equals(const Matrix& other) const {
  return same_shape(other) && data_ == other.data_;
}

std::uint64_t Matrix::content_digest() const {
  Fnv1a h;
  h.update_u64(static_cast<std::uint64_t>(rows_));
  h.update_u64(static_cast<std::uint64_t>(cols_));
  h.update(data_.data(), data_.size() * sizeof(double));
  return h.digest();
}

}  // namespace kwst
