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

#include "lightmc/codebook.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "lightmc/error.h"
#include "lightmc/text_format.h"

namespace lightmc {
namespace {

constexpr std::string_view kCodebookMagic = "lightmc-codebook";

double RandomSign(std::mt19937_64& rng) {
  return (rng() >> 63) != 0 ? 1.0 : -1.0;
}

// Row k clashes with an earlier row if it is identical or complementary.
bool RowClashes(const Matrix& m, std::size_t k) {
  for (std::size_t other = 0; other < k; ++other) {
    bool same = true;
    bool complement = true;
    for (std::size_t j = 0; j < m.cols() && (same || complement); ++j) {
      same = same && m(k, j) == m(other, j);
      complement = complement && m(k, j) == -m(other, j);
    }
    if (same || complement) return true;
  }
  return false;
}

bool ColumnIsConstant(const Matrix& m, std::size_t j) {
  for (std::size_t k = 1; k < m.rows(); ++k) {
    if (m(k, j) != m(0, j)) return false;
  }
  return true;
}

}  // namespace

CodingMatrix::CodingMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 3) {
    throw Error(ErrorCode::kInvalidArg, "coding matrix needs at least 3 classes");
  }
  if (entries_.cols() < 1) {
    throw Error(ErrorCode::kInvalidArg, "coding matrix needs code length >= 1");
  }
  for (double v : entries_.data()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteInput, "coding matrix entry is not finite");
    }
  }
}

bool CodingMatrix::IsBinary() const {
  for (double v : entries_.data()) {
    if (v != 1.0 && v != -1.0) return false;
  }
  return true;
}

int MinimumFeasibleCodeLength(int num_classes) {
  if (num_classes < 3) {
    throw Error(ErrorCode::kInvalidArg, "num_classes must be >= 3");
  }
  int length = 2;
  while (length - 1 < 63 &&
         (std::uint64_t{1} << (length - 1)) <= static_cast<std::uint64_t>(num_classes)) {
    ++length;
  }
  return length;
}

CodingMatrix InitRandomCodingMatrix(int num_classes, int code_length,
                                    std::uint64_t seed) {
  if (num_classes < 3) {
    throw Error(ErrorCode::kInvalidArg, "num_classes must be >= 3");
  }
  if (code_length < 1) {
    throw Error(ErrorCode::kInvalidArg, "code_length must be >= 1");
  }
  if (code_length < MinimumFeasibleCodeLength(num_classes)) {
    throw Error(ErrorCode::kInfeasibleCode,
                "2^(L-1) <= K: no valid code with K=" +
                    std::to_string(num_classes) +
                    ", L=" + std::to_string(code_length));
  }

  std::mt19937_64 rng(seed);
  Matrix m(num_classes, code_length);
  for (double& v : m.data()) v = RandomSign(rng);

  for (;;) {
    for (std::size_t k = 1; k < m.rows(); ++k) {
      while (RowClashes(m, k)) {
        for (double& v : m.row(k)) v = RandomSign(rng);
      }
    }
    bool redrew_column = false;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!ColumnIsConstant(m, j)) continue;
      for (std::size_t k = 0; k < m.rows(); ++k) m(k, j) = RandomSign(rng);
      redrew_column = true;
    }
    if (!redrew_column) break;
  }
  return CodingMatrix(std::move(m));
}

int SuggestedCodeLength(int num_classes) {
  if (num_classes < 3) {
    throw Error(ErrorCode::kInvalidArg, "num_classes must be >= 3");
  }
  const double by_log = 5.0 * std::log2(static_cast<double>(num_classes - 1)) + 1.0;
  const double by_half = static_cast<double>(num_classes) / 2.0;
  const long rounded = std::lround(std::min(by_log, by_half));
  return static_cast<int>(std::max(1L, rounded));
}

CodingMatrix OneVersusAllMatrix(int num_classes) {
  if (num_classes < 3) {
    throw Error(ErrorCode::kInvalidArg, "num_classes must be >= 3");
  }
  Matrix m(num_classes, num_classes, -1.0);
  for (int k = 0; k < num_classes; ++k) m(k, k) = 1.0;
  return CodingMatrix(std::move(m));
}

int HammingDecode(const CodingMatrix& matrix, std::span<const double> outputs) {
  if (static_cast<int>(outputs.size()) != matrix.code_length()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(matrix.code_length()) +
                    " outputs, got " + std::to_string(outputs.size()));
  }
  int best = 0;
  double best_distance = 0.0;
  for (int k = 0; k < matrix.num_classes(); ++k) {
    double distance = 0.0;
    for (int j = 0; j < matrix.code_length(); ++j) {
      const double sign = outputs[j] >= 0.0 ? 1.0 : -1.0;
      distance += std::abs(matrix(k, j) - sign);
    }
    distance *= 0.5;
    if (k == 0 || distance < best_distance) {
      best = k;
      best_distance = distance;
    }
  }
  return best;
}

double CodewordDistance(const CodingMatrix& matrix, int class_a, int class_b) {
  const int k = matrix.num_classes();
  if (class_a < 0 || class_a >= k || class_b < 0 || class_b >= k) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "class index outside [0, " + std::to_string(k) + ")");
  }
  double sum = 0.0;
  for (int j = 0; j < matrix.code_length(); ++j) {
    const double d = matrix(class_a, j) - matrix(class_b, j);
    sum += d * d;
  }
  return sum;
}

void WriteCodingMatrix(std::ostream& out, const CodingMatrix& matrix) {
  out << kCodebookMagic << " v1 " << matrix.num_classes() << ' '
      << matrix.code_length() << '\n';
  for (int k = 0; k < matrix.num_classes(); ++k) {
    text::WriteRow(out, matrix.codeword(k));
  }
}

CodingMatrix ReadCodingMatrix(std::istream& in) {
  const std::string header = text::ReadLine(in, "codebook header");
  const auto tokens = text::SplitWhitespace(header);
  if (tokens.size() != 4 || tokens[0] != kCodebookMagic || tokens[1] != "v1") {
    throw Error(ErrorCode::kParseError, "bad codebook header: '" + header + "'");
  }
  const long long k = text::ParseInt(tokens[2]);
  const long long l = text::ParseInt(tokens[3]);
  if (k < 3 || l < 1) {
    throw Error(ErrorCode::kParseError, "bad codebook dimensions");
  }
  Matrix m(k, l);
  for (long long r = 0; r < k; ++r) {
    const auto values = text::ReadRow(in, l, "codebook row");
    std::copy(values.begin(), values.end(), m.row(r).begin());
  }
  return CodingMatrix(std::move(m));
}

}  // namespace lightmc
