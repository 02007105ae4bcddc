// Copyright 2026 The LightMC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lightmc/matrix_optimizer.h"

#include <cmath>
#include <string>

#include "lightmc/error.h"

namespace lightmc {

ClassGradientStats AccumulateClassGradients(const Matrix& grad_rows,
                                            std::span<const int> labels,
                                            int num_classes) {
  if (grad_rows.rows() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "gradient rows and labels differ in length");
  }
  if (num_classes < 1) {
    throw Error(ErrorCode::kInvalidArg, "num_classes must be positive");
  }
  ClassGradientStats stats;
  stats.sums = Matrix(num_classes, grad_rows.cols());
  stats.counts.assign(num_classes, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int k = labels[i];
    if (k < 0 || k >= num_classes) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "label " + std::to_string(k) + " at row " + std::to_string(i));
    }
    auto sum_row = stats.sums.row(k);
    const auto g = grad_rows.row(i);
    for (std::size_t j = 0; j < g.size(); ++j) sum_row[j] += g[j];
    ++stats.counts[k];
  }
  return stats;
}

CodingMatrix UpdateCodingMatrix(const CodingMatrix& matrix,
                                const ClassGradientStats& stats, double lr) {
  if (!(lr > 0.0)) {
    throw Error(ErrorCode::kInvalidArg, "matrix learning rate must be positive");
  }
  if (stats.sums.rows() != static_cast<std::size_t>(matrix.num_classes()) ||
      stats.sums.cols() != static_cast<std::size_t>(matrix.code_length()) ||
      stats.counts.size() != static_cast<std::size_t>(matrix.num_classes())) {
    throw Error(ErrorCode::kDimensionMismatch,
                "gradient stats do not match the coding matrix");
  }
  Matrix entries = matrix.entries();
  for (int k = 0; k < matrix.num_classes(); ++k) {
    if (stats.counts[k] <= 0) continue;
    const double inv_count = 1.0 / static_cast<double>(stats.counts[k]);
    for (int j = 0; j < matrix.code_length(); ++j) {
      const double beta = stats.sums(k, j) * inv_count;
      const double updated = entries(k, j) - lr * beta;
      if (!std::isfinite(updated)) {
        throw Error(ErrorCode::kNonFiniteGradient,
                    "coding matrix update at (" + std::to_string(k) + ", " +
                        std::to_string(j) + ") is not finite");
      }
      entries(k, j) = updated;
    }
  }
  return CodingMatrix(std::move(entries));
}

}  // namespace lightmc
