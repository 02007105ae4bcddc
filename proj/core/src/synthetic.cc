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

#include "lightmc/synthetic.h"

#include <cmath>
#include <random>
#include <string>

#include "lightmc/error.h"

namespace lightmc {

BlobData GeneratePairedBlobs(const BlobOptions& options) {
  if (options.num_pairs < 2 || options.num_features < 1 ||
      options.train_per_class < 1 || options.test_per_class < 1) {
    throw Error(ErrorCode::kInvalidArg, "bad blob options");
  }
  const int num_classes = 2 * options.num_pairs;
  const int d = options.num_features;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::vector<double>> pair_centers(options.num_pairs, std::vector<double>(d));
  const int half = options.num_pairs / 2;
  for (int p = 0; p < options.num_pairs; ++p) {
    if (options.mirror_pairs && p >= half && p - half < half) {
      for (int f = 0; f < d; ++f) pair_centers[p][f] = -pair_centers[p - half][f];
    } else {
      for (int f = 0; f < d; ++f) pair_centers[p][f] = options.center_spread * gauss(rng);
    }
  }

  std::vector<std::vector<double>> class_centers(num_classes, std::vector<double>(d));
  for (int p = 0; p < options.num_pairs; ++p) {
    std::vector<double> u(d);
    double norm = 0.0;
    for (double& v : u) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (int f = 0; f < d; ++f) {
      class_centers[2 * p][f] = pair_centers[p][f] + options.pair_offset * u[f] / norm;
      class_centers[2 * p + 1][f] = pair_centers[p][f] - options.pair_offset * u[f] / norm;
    }
  }

  LabelMap labels;
  for (int k = 0; k < num_classes; ++k) labels.Intern("c" + std::to_string(k));

  auto draw = [&](int per_class) {
    SparseDatasetBuilder builder(labels);
    std::vector<std::pair<int, double>> row(d);
    // Interleave classes so file order does not sort by label.
    for (int r = 0; r < per_class; ++r) {
      for (int k = 0; k < num_classes; ++k) {
        for (int f = 0; f < d; ++f) {
          row[f] = {f, class_centers[k][f] + options.noise * gauss(rng)};
        }
        builder.AddRow(k, row);
      }
    }
    return std::move(builder).Build(d);
  };

  BlobData blobs;
  blobs.train = draw(options.train_per_class);
  blobs.test = draw(options.test_per_class);
  for (int p = 0; p < options.num_pairs; ++p) blobs.correlated_pairs.emplace_back(2 * p, 2 * p + 1);
  if (options.mirror_pairs) {
    for (int p = 0; p < half; ++p) {
      blobs.anti_correlated_pairs.emplace_back(2 * p, 2 * (p + half));
    }
  }
  return blobs;
}

}  // namespace lightmc
