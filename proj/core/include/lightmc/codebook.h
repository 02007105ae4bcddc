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

#ifndef LIGHTMC_CODEBOOK_H_
#define LIGHTMC_CODEBOOK_H_

#include <cstdint>
#include <iosfwd>
#include <span>

#include "lightmc/matrix.h"

namespace lightmc {

// K x L coding matrix. Row k is the codeword of class k; column j holds the
// regression targets of base learner j. Entries start out as +-1 and become
// arbitrary reals once the matrix is refined by gradient steps.
class CodingMatrix {
 public:
  // Takes ownership of `entries`. Requires K >= 3, L >= 1 and finite values.
  explicit CodingMatrix(Matrix entries);

  int num_classes() const { return static_cast<int>(entries_.rows()); }
  int code_length() const { return static_cast<int>(entries_.cols()); }

  double operator()(int k, int j) const { return entries_(k, j); }
  std::span<const double> codeword(int k) const { return entries_.row(k); }
  const Matrix& entries() const { return entries_; }

  // True when every entry is exactly +1 or -1.
  bool IsBinary() const;

  friend bool operator==(const CodingMatrix&, const CodingMatrix&) = default;

 private:
  Matrix entries_;
};

// Draws a random +-1 matrix with distinct, non-complementary rows and no
// constant column. Offending rows/columns are redrawn until the matrix is
// valid; the result is a pure function of the arguments.
//
// Throws InfeasibleCode when 2^(L-1) <= K (not enough complement-free
// codewords) and InvalidArg for K < 3 or L < 1.
CodingMatrix InitRandomCodingMatrix(int num_classes, int code_length,
                                    std::uint64_t seed);

// min(5*log2(K-1)+1, K/2), rounded half away from zero, at least 1.
int SuggestedCodeLength(int num_classes);

// Smallest L for which a valid binary K-class matrix exists.
int MinimumFeasibleCodeLength(int num_classes);

// One-versus-all layout: +1 on the diagonal, -1 elsewhere (K x K).
CodingMatrix OneVersusAllMatrix(int num_classes);

// argmin_k 0.5 * sum_j |M_kj - sgn(o_j)| with sgn(0) = +1. Ties go to the
// lowest class index.
int HammingDecode(const CodingMatrix& matrix, std::span<const double> outputs);

// Squared Euclidean distance between two codewords (4x the Hamming distance
// for binary rows).
double CodewordDistance(const CodingMatrix& matrix, int class_a, int class_b);

// "lightmc-codebook v1 K L" followed by K rows of L reals.
void WriteCodingMatrix(std::ostream& out, const CodingMatrix& matrix);
CodingMatrix ReadCodingMatrix(std::istream& in);

}  // namespace lightmc

#endif  // LIGHTMC_CODEBOOK_H_
