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

#include "lightmc/softmax_decoder.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "lightmc/error.h"
#include "lightmc/text_format.h"

namespace lightmc {
namespace {

constexpr std::string_view kDecoderMagic = "lightmc-decoder";

void CheckLabel(int label, int num_classes) {
  if (label < 0 || label >= num_classes) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "label " + std::to_string(label) + " outside [0, " +
                    std::to_string(num_classes) + ")");
  }
}

void CheckOutputs(const DecoderParams& params, std::span<const double> outputs) {
  if (static_cast<int>(outputs.size()) != params.code_length()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "expected " + std::to_string(params.code_length()) +
                    " outputs, got " + std::to_string(outputs.size()));
  }
  for (double o : outputs) {
    if (!std::isfinite(o)) {
      throw Error(ErrorCode::kNonFiniteInput, "base learner output is not finite");
    }
  }
}

}  // namespace

DecoderParams InitDecoderFromMatrix(const CodingMatrix& matrix) {
  DecoderParams params;
  params.weights = matrix.entries();
  params.biases.assign(matrix.num_classes(),
                       static_cast<double>(matrix.code_length()));
  return params;
}

DecodeResult Decode(const DecoderParams& params, std::span<const double> outputs) {
  CheckOutputs(params, outputs);
  const int k_count = params.num_classes();
  DecodeResult result;
  result.scores.resize(k_count);
  for (int k = 0; k < k_count; ++k) {
    const auto theta = params.weights.row(k);
    const double dot = std::inner_product(theta.begin(), theta.end(),
                                          outputs.begin(), 0.0);
    result.scores[k] = 0.5 * (dot + params.biases[k]);
  }

  const double max_score =
      *std::max_element(result.scores.begin(), result.scores.end());
  result.probabilities.resize(k_count);
  double total = 0.0;
  for (int k = 0; k < k_count; ++k) {
    result.probabilities[k] = std::exp(result.scores[k] - max_score);
    total += result.probabilities[k];
  }
  for (double& p : result.probabilities) p /= total;

  result.predicted = static_cast<int>(
      std::max_element(result.probabilities.begin(), result.probabilities.end()) -
      result.probabilities.begin());
  return result;
}

double DecoderLoss(std::span<const double> probabilities, int label) {
  CheckLabel(label, static_cast<int>(probabilities.size()));
  double loss = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    const double p = probabilities[k];
    if (static_cast<int>(k) == label) {
      loss -= std::log(std::max(p, kProbabilityEpsilon));
    } else {
      loss -= std::log(std::max(1.0 - p, kProbabilityEpsilon));
    }
  }
  return loss;
}

std::vector<double> ScoreGradient(std::span<const double> probabilities,
                                  int label) {
  const int k_count = static_cast<int>(probabilities.size());
  CheckLabel(label, k_count);
  // a_k = p_k * dJ/dp_k; dJ/dt_m = a_m - p_m * sum_k a_k.
  std::vector<double> a(k_count);
  double a_sum = 0.0;
  for (int k = 0; k < k_count; ++k) {
    const double p = probabilities[k];
    a[k] = k == label ? -1.0 : p / std::max(1.0 - p, kProbabilityEpsilon);
    a_sum += a[k];
  }
  std::vector<double> grad(k_count);
  for (int m = 0; m < k_count; ++m) {
    grad[m] = a[m] - probabilities[m] * a_sum;
  }
  return grad;
}

LossGradients ComputeLossGradients(const DecoderParams& params,
                                   std::span<const double> outputs, int label) {
  const DecodeResult decoded = Decode(params, outputs);
  const std::vector<double> dt = ScoreGradient(decoded.probabilities, label);
  const int k_count = params.num_classes();
  const int l_count = params.code_length();

  LossGradients grads;
  grads.weights = Matrix(k_count, l_count);
  grads.biases.resize(k_count);
  grads.outputs.assign(l_count, 0.0);
  for (int k = 0; k < k_count; ++k) {
    const double half = 0.5 * dt[k];
    grads.biases[k] = half;
    for (int j = 0; j < l_count; ++j) {
      grads.weights(k, j) = half * outputs[j];
      grads.outputs[j] += half * params.weights(k, j);
    }
  }
  return grads;
}

std::vector<double> OutputGradient(const DecoderParams& params,
                                   std::span<const double> outputs, int label) {
  const DecodeResult decoded = Decode(params, outputs);
  const std::vector<double> dt = ScoreGradient(decoded.probabilities, label);
  std::vector<double> grad(params.code_length(), 0.0);
  for (int k = 0; k < params.num_classes(); ++k) {
    const double half = 0.5 * dt[k];
    const auto theta = params.weights.row(k);
    for (int j = 0; j < params.code_length(); ++j) grad[j] += half * theta[j];
  }
  return grad;
}

double MeanDecoderLoss(const DecoderParams& params, const Matrix& outputs,
                       std::span<const int> labels) {
  if (outputs.rows() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "outputs/labels row count differ");
  }
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    total += DecoderLoss(Decode(params, outputs.row(i)).probabilities, labels[i]);
  }
  return total / static_cast<double>(labels.size());
}

DecoderParams TrainDecoding(DecoderParams params, const Matrix& outputs,
                            std::span<const int> labels,
                            const DecoderTrainOptions& options) {
  const std::size_t n = labels.size();
  if (outputs.rows() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "outputs/labels row count differ");
  }
  if (static_cast<int>(outputs.cols()) != params.code_length()) {
    throw Error(ErrorCode::kDimensionMismatch, "outputs width differs from L");
  }
  if (n == 0) throw Error(ErrorCode::kEmptyDataset, "no rows to train the decoder on");
  if (!(options.learning_rate > 0.0) || options.batch_size < 1 ||
      options.epochs < 0 || !(options.l2 >= 0.0)) {
    throw Error(ErrorCode::kInvalidArg, "bad decoder training options");
  }

  const int k_count = params.num_classes();
  const int l_count = params.code_length();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(options.seed);

  Matrix grad_w(k_count, l_count);
  std::vector<double> grad_b(k_count);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += options.batch_size) {
      const std::size_t stop = std::min(n, start + options.batch_size);
      std::fill(grad_w.data().begin(), grad_w.data().end(), 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);
      for (std::size_t pos = start; pos < stop; ++pos) {
        const std::size_t i = order[pos];
        const auto o = outputs.row(i);
        const DecodeResult decoded = Decode(params, o);
        const std::vector<double> dt = ScoreGradient(decoded.probabilities, labels[i]);
        for (int k = 0; k < k_count; ++k) {
          const double half = 0.5 * dt[k];
          grad_b[k] += half;
          auto gw = grad_w.row(k);
          for (int j = 0; j < l_count; ++j) gw[j] += half * o[j];
        }
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (int k = 0; k < k_count; ++k) {
        for (int j = 0; j < l_count; ++j) {
          const double g = grad_w(k, j) * scale + options.l2 * params.weights(k, j);
          if (!std::isfinite(g)) {
            throw Error(ErrorCode::kNonFiniteGradient,
                        "decoder weight gradient at (" + std::to_string(k) + ", " +
                            std::to_string(j) + ") is not finite");
          }
          grad_w(k, j) = g;
        }
        grad_b[k] *= scale;
        if (!std::isfinite(grad_b[k])) {
          throw Error(ErrorCode::kNonFiniteGradient,
                      "decoder bias gradient " + std::to_string(k) + " is not finite");
        }
      }
      for (int k = 0; k < k_count; ++k) {
        for (int j = 0; j < l_count; ++j) {
          params.weights(k, j) -= options.learning_rate * grad_w(k, j);
        }
        params.biases[k] -= options.learning_rate * grad_b[k];
      }
    }
  }
  return params;
}

void WriteDecoderParams(std::ostream& out, const DecoderParams& params) {
  out << kDecoderMagic << " v1 " << params.num_classes() << ' '
      << params.code_length() << '\n';
  for (int k = 0; k < params.num_classes(); ++k) {
    text::WriteRow(out, params.weights.row(k));
  }
  text::WriteRow(out, params.biases);
}

DecoderParams ReadDecoderParams(std::istream& in) {
  const std::string header = text::ReadLine(in, "decoder header");
  const auto tokens = text::SplitWhitespace(header);
  if (tokens.size() != 4 || tokens[0] != kDecoderMagic || tokens[1] != "v1") {
    throw Error(ErrorCode::kParseError, "bad decoder header: '" + header + "'");
  }
  const long long k = text::ParseInt(tokens[2]);
  const long long l = text::ParseInt(tokens[3]);
  if (k < 1 || l < 1) throw Error(ErrorCode::kParseError, "bad decoder dimensions");
  DecoderParams params;
  params.weights = Matrix(k, l);
  for (long long r = 0; r < k; ++r) {
    const auto values = text::ReadRow(in, l, "decoder weights");
    std::copy(values.begin(), values.end(), params.weights.row(r).begin());
  }
  params.biases = text::ReadRow(in, k, "decoder biases");
  return params;
}

}  // namespace lightmc
