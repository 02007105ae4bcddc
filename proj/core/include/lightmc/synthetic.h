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

#ifndef LIGHTMC_SYNTHETIC_H_
#define LIGHTMC_SYNTHETIC_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "lightmc/data_io.h"

namespace lightmc {

// Gaussian blobs arranged as correlated class pairs. Pair p has a random
// center c_p; its two classes sit at c_p +- pair_offset * u_p for a random
// unit vector u_p, so they overlap. When `mirror_pairs` is set, pair
// p + P/2 is centred at -c_p, which makes class 2p and class 2(p + P/2)
// anti-correlated.
struct BlobOptions {
  int num_pairs = 10;
  int num_features = 20;
  int train_per_class = 200;
  int test_per_class = 100;
  double center_spread = 3.0;
  double pair_offset = 1.0;
  double noise = 1.0;
  bool mirror_pairs = true;
  std::uint64_t seed = 1;
};

struct BlobData {
  SparseDataset train;
  SparseDataset test;
  std::vector<std::pair<int, int>> correlated_pairs;
  std::vector<std::pair<int, int>> anti_correlated_pairs;
};

// Class labels are "c0".."c{2P-1}" and interned in class order, so dense id k
// is class k in both splits.
BlobData GeneratePairedBlobs(const BlobOptions& options);

}  // namespace lightmc

#endif  // LIGHTMC_SYNTHETIC_H_
