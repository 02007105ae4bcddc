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

#ifndef LIGHTMC_MATRIX_OPTIMIZER_H_
#define LIGHTMC_MATRIX_OPTIMIZER_H_

#include <span>
#include <vector>

#include "lightmc/codebook.h"
#include "lightmc/matrix.h"

namespace lightmc {

// Per-class sums of output gradients and instance counts. Dividing row k of
// `sums` by counts[k] estimates dJ/dM_k.
struct ClassGradientStats {
  Matrix sums;               // K x L
  std::vector<long> counts;  // K
};

// S_kj = sum over instances of class k of G_ij, C_k = #instances of class k.
// Rows are summed in index order so results are reproducible.
ClassGradientStats AccumulateClassGradients(const Matrix& grad_rows,
                                            std::span<const int> labels,
                                            int num_classes);

// M_kj <- M_kj - lr * S_kj / C_k for every class with C_k > 0. Classes with
// no instances keep their codeword unchanged.
CodingMatrix UpdateCodingMatrix(const CodingMatrix& matrix,
                                const ClassGradientStats& stats, double lr);

}  // namespace lightmc

#endif  // LIGHTMC_MATRIX_OPTIMIZER_H_
