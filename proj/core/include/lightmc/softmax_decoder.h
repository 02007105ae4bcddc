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

#ifndef LIGHTMC_SOFTMAX_DECODER_H_
#define LIGHTMC_SOFTMAX_DECODER_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lightmc/codebook.h"
#include "lightmc/matrix.h"

namespace lightmc {

// Linear softmax decoder: t_k = 0.5 * (theta_k . o + b_k), y_hat = softmax(t).
// Starting from theta = M and b = L, argmax t coincides with Hamming decoding
// for +-1 outputs, because |-M_kj - o_j| = 1 + M_kj * o_j there.
struct DecoderParams {
  Matrix weights;               // K x L
  std::vector<double> biases;   // K

  int num_classes() const { return static_cast<int>(weights.rows()); }
  int code_length() const { return static_cast<int>(weights.cols()); }

  friend bool operator==(const DecoderParams&, const DecoderParams&) = default;
};

struct DecodeResult {
  std::vector<double> scores;         // t
  std::vector<double> probabilities;  // softmax(t)
  int predicted = 0;
};

struct LossGradients {
  Matrix weights;                    // dJ/dtheta, K x L
  std::vector<double> biases;        // dJ/db, K
  std::vector<double> outputs;       // dJ/do, L
};

// Probability clamp applied before every logarithm and 1/(1-p) term.
inline constexpr double kProbabilityEpsilon = 1e-12;

DecoderParams InitDecoderFromMatrix(const CodingMatrix& matrix);

// Throws DimensionMismatch or NonFiniteInput.
DecodeResult Decode(const DecoderParams& params, std::span<const double> outputs);

// J = -sum_k [(1 - y_k) log(1 - p_k) + y_k log p_k] with y one-hot at
// `label`. This is a sum of per-class binary cross-entropies over the softmax
// outputs, not the usual softmax cross-entropy.
double DecoderLoss(std::span<const double> probabilities, int label);

// dJ/dt for the loss above, chained through the full softmax Jacobian.
std::vector<double> ScoreGradient(std::span<const double> probabilities,
                                  int label);

LossGradients ComputeLossGradients(const DecoderParams& params,
                                   std::span<const double> outputs, int label);

// dJ/do only; the per-instance row G_i consumed by the coding-matrix update.
std::vector<double> OutputGradient(const DecoderParams& params,
                                   std::span<const double> outputs, int label);

// Mean DecoderLoss over the rows of `outputs`.
double MeanDecoderLoss(const DecoderParams& params, const Matrix& outputs,
                       std::span<const int> labels);

struct DecoderTrainOptions {
  double learning_rate = 0.1;  // gamma1
  int batch_size = 256;
  int epochs = 1;
  double l2 = 0.0;             // applied to weights, not biases
  std::uint64_t seed = 0;      // shuffle seed
};

// Mini-batch gradient descent on (weights, biases). Each epoch visits a
// seeded permutation of the rows; the trailing short batch is kept. Throws
// NonFiniteGradient instead of writing NaN/Inf into the parameters.
DecoderParams TrainDecoding(DecoderParams params, const Matrix& outputs,
                            std::span<const int> labels,
                            const DecoderTrainOptions& options);

// "lightmc-decoder v1 K L", K rows of weights, then one row of K biases.
void WriteDecoderParams(std::ostream& out, const DecoderParams& params);
DecoderParams ReadDecoderParams(std::istream& in);

}  // namespace lightmc

#endif  // LIGHTMC_SOFTMAX_DECODER_H_
