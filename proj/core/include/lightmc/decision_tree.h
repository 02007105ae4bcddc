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

#ifndef LIGHTMC_DECISION_TREE_H_
#define LIGHTMC_DECISION_TREE_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lightmc/data_io.h"

namespace lightmc {

// One node of a regression tree. Internal nodes send rows with
// x[feature] <= threshold to `left`; absent sparse features read as 0.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Nodes are stored in pre-order; node 0 is the root.
class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes);

  // A single leaf predicting `value`.
  static RegressionTree Constant(double value);

  double Predict(std::span<const int> indices, std::span<const double> values) const;
  double Predict(const SparseDataset& data, std::size_t row) const {
    return Predict(data.row_indices(row), data.row_values(row));
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int num_leaves() const;

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

// "tree <n>" then n lines of "id feature threshold left right value".
void WriteTree(std::ostream& out, const RegressionTree& tree);
RegressionTree ReadTree(std::istream& in);

// Nonzero feature values sorted per feature, built once per training set and
// shared by every tree fitted on it.
class PresortedFeatures {
 public:
  struct Entry {
    int row;
    double value;
  };

  explicit PresortedFeatures(const SparseDataset& data);

  std::size_t num_rows() const { return num_rows_; }
  int num_features() const { return num_features_; }
  std::span<const Entry> column(int f) const {
    return {entries_.data() + offsets_[f], offsets_[f + 1] - offsets_[f]};
  }
  const std::vector<Entry>& entries() const { return entries_; }
  const std::vector<std::size_t>& offsets() const { return offsets_; }

 private:
  std::size_t num_rows_ = 0;
  int num_features_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<Entry> entries_;
};

struct TreeOptions {
  int max_leaves = 31;
  int min_samples_leaf = 20;
};

// Exact greedy least-squares CART, grown leaf-wise: the leaf with the largest
// variance reduction is split next until max_leaves is reached or no split
// helps. Split ties go to the lowest feature, then the lowest threshold.
// Leaf values are the mean residual. Holds scratch buffers, so one builder
// per thread.
class TreeBuilder {
 public:
  explicit TreeBuilder(const PresortedFeatures& features);

  RegressionTree Fit(std::span<const double> residuals, const TreeOptions& options);

 private:
  struct Split;
  struct Leaf;

  Split FindBestSplit(const Leaf& leaf, std::span<const double> residuals,
                      const TreeOptions& options) const;
  void Partition(Leaf& parent, const Split& split, Leaf& left, Leaf& right);

  const PresortedFeatures& features_;
  std::vector<PresortedFeatures::Entry> work_;
  std::vector<PresortedFeatures::Entry> scratch_;
  std::vector<char> goes_left_;
  double min_gain_ = 0.0;
};

}  // namespace lightmc

#endif  // LIGHTMC_DECISION_TREE_H_
