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

#ifndef LIGHTMC_TESTS_ORACLES_H_
#define LIGHTMC_TESTS_ORACLES_H_

// Test-only reference computations. Nothing here calls into the decoder
// implementation, so the checks stay independent of the code under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace lightmc::testing {

// Direct evaluation of the decoding loss from raw parameters:
// t_k = 0.5 (theta_k . o + b_k), p = softmax(t),
// J = -sum_k [(1 - y_k) log(1 - p_k) + y_k log p_k].
inline double ReferenceLoss(const std::vector<double>& theta,  // K*L row-major
                            const std::vector<double>& bias, const std::vector<double>& o,
                            int label) {
  const std::size_t k_count = bias.size();
  const std::size_t l_count = o.size();
  std::vector<double> t(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    double dot = 0.0;
    for (std::size_t j = 0; j < l_count; ++j) dot += theta[k * l_count + j] * o[j];
    t[k] = 0.5 * (dot + bias[k]);
  }
  const double m = *std::max_element(t.begin(), t.end());
  double z = 0.0;
  for (double v : t) z += std::exp(v - m);
  double loss = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double p = std::exp(t[k] - m) / z;
    loss -= static_cast<int>(k) == label ? std::log(p) : std::log(1.0 - p);
  }
  return loss;
}

// Central difference of f around x[i].
inline double CentralDifference(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x, std::size_t i, double h) {
  const double saved = x[i];
  x[i] = saved + h;
  const double up = f(x);
  x[i] = saved - h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

// |a - b| relative to the larger magnitude, with an absolute floor for
// components that are essentially zero.
inline double RelativeError(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline int HammingDistance(const std::vector<double>& a, const std::vector<double>& b) {
  int d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) d += (a[j] >= 0) != (b[j] >= 0);
  return d;
}

}  // namespace lightmc::testing

#endif  // LIGHTMC_TESTS_ORACLES_H_
