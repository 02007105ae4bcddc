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

#include "lightmc/decision_tree.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "lightmc/error.h"
#include "lightmc/text_format.h"

namespace lightmc {
namespace {

// Threshold strictly between two sorted neighbours a < b, never equal to b.
double Midpoint(double a, double b) {
  const double mid = a + (b - a) * 0.5;
  return mid < b ? mid : a;
}

void RenumberPreorder(const std::vector<TreeNode>& in, int node,
                      std::vector<TreeNode>& out) {
  const int id = static_cast<int>(out.size());
  out.push_back(in[node]);
  if (in[node].is_leaf()) return;
  const int left_id = static_cast<int>(out.size());
  RenumberPreorder(in, in[node].left, out);
  const int right_id = static_cast<int>(out.size());
  RenumberPreorder(in, in[node].right, out);
  out[id].left = left_id;
  out[id].right = right_id;
}

}  // namespace

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(ErrorCode::kInvalidArg, "tree has no nodes");
  const int n = static_cast<int>(nodes_.size());
  for (int i = 0; i < n; ++i) {
    const TreeNode& node = nodes_[i];
    if (node.is_leaf()) continue;
    if (node.left <= i || node.left >= n || node.right <= i || node.right >= n) {
      throw Error(ErrorCode::kInvalidArg,
                  "tree node " + std::to_string(i) + " has bad children");
    }
  }
}

RegressionTree RegressionTree::Constant(double value) {
  TreeNode leaf;
  leaf.value = value;
  return RegressionTree({leaf});
}

double RegressionTree::Predict(std::span<const int> indices,
                               std::span<const double> values) const {
  int node = 0;
  while (!nodes_[node].is_leaf()) {
    const TreeNode& n = nodes_[node];
    auto it = std::lower_bound(indices.begin(), indices.end(), n.feature);
    const double x =
        (it != indices.end() && *it == n.feature) ? values[it - indices.begin()] : 0.0;
    node = x <= n.threshold ? n.left : n.right;
  }
  return nodes_[node].value;
}

int RegressionTree::num_leaves() const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(),
                                        [](const TreeNode& n) { return n.is_leaf(); }));
}

void WriteTree(std::ostream& out, const RegressionTree& tree) {
  out << "tree " << tree.nodes().size() << '\n';
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    const TreeNode& n = tree.nodes()[i];
    out << i << ' ' << n.feature << ' ' << text::FormatDouble(n.threshold) << ' '
        << n.left << ' ' << n.right << ' ' << text::FormatDouble(n.value) << '\n';
  }
}

RegressionTree ReadTree(std::istream& in) {
  const std::string header = text::ReadLine(in, "tree header");
  const auto tokens = text::SplitWhitespace(header);
  if (tokens.size() != 2 || tokens[0] != "tree") {
    throw Error(ErrorCode::kParseError, "bad tree header: '" + header + "'");
  }
  const long long count = text::ParseInt(tokens[1]);
  if (count < 1) throw Error(ErrorCode::kParseError, "tree must have nodes");
  std::vector<TreeNode> nodes(count);
  for (long long i = 0; i < count; ++i) {
    const std::string line = text::ReadLine(in, "tree node");
    const auto f = text::SplitWhitespace(line);
    if (f.size() != 6 || text::ParseInt(f[0]) != i) {
      throw Error(ErrorCode::kParseError, "bad tree node line: '" + line + "'");
    }
    nodes[i].feature = static_cast<int>(text::ParseInt(f[1]));
    nodes[i].threshold = text::ParseDouble(f[2]);
    nodes[i].left = static_cast<int>(text::ParseInt(f[3]));
    nodes[i].right = static_cast<int>(text::ParseInt(f[4]));
    nodes[i].value = text::ParseDouble(f[5]);
  }
  try {
    return RegressionTree(std::move(nodes));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

PresortedFeatures::PresortedFeatures(const SparseDataset& data)
    : num_rows_(data.num_rows()), num_features_(data.num_features()) {
  std::vector<std::size_t> counts(num_features_ + 1, 0);
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    const auto idx = data.row_indices(i);
    const auto val = data.row_values(i);
    for (std::size_t p = 0; p < idx.size(); ++p) {
      if (val[p] != 0.0) ++counts[idx[p] + 1];
    }
  }
  offsets_.assign(num_features_ + 1, 0);
  for (int f = 0; f < num_features_; ++f) offsets_[f + 1] = offsets_[f] + counts[f + 1];
  entries_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    const auto idx = data.row_indices(i);
    const auto val = data.row_values(i);
    for (std::size_t p = 0; p < idx.size(); ++p) {
      if (val[p] != 0.0) entries_[cursor[idx[p]]++] = {static_cast<int>(i), val[p]};
    }
  }
  for (int f = 0; f < num_features_; ++f) {
    std::stable_sort(entries_.begin() + offsets_[f], entries_.begin() + offsets_[f + 1],
                     [](const Entry& a, const Entry& b) { return a.value < b.value; });
  }
}

struct TreeBuilder::Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  bool valid() const { return feature >= 0; }
};

struct TreeBuilder::Leaf {
  int node = 0;
  std::vector<int> rows;
  std::vector<std::size_t> seg_begin;  // per feature, into work_
  std::vector<std::size_t> seg_end;
  double sum = 0.0;
  Split best;
};

TreeBuilder::TreeBuilder(const PresortedFeatures& features)
    : features_(features), goes_left_(features.num_rows(), 0) {}

TreeBuilder::Split TreeBuilder::FindBestSplit(const Leaf& leaf,
                                              std::span<const double> residuals,
                                              const TreeOptions& options) const {
  const long n = static_cast<long>(leaf.rows.size());
  const double total = leaf.sum;
  const double parent_score = total * total / static_cast<double>(n);
  const long min_leaf = options.min_samples_leaf;

  Split best;
  best.gain = min_gain_;
  int feature = 0;
  auto consider = [&](double left_sum, long left_count, double threshold) {
    const long right_count = n - left_count;
    if (left_count < min_leaf || right_count < min_leaf) return;
    const double right_sum = total - left_sum;
    const double gain = left_sum * left_sum / static_cast<double>(left_count) +
                        right_sum * right_sum / static_cast<double>(right_count) -
                        parent_score;
    if (gain > best.gain ||
        (best.valid() && gain == best.gain && feature == best.feature &&
         threshold < best.threshold)) {
      best.feature = feature;
      best.threshold = threshold;
      best.gain = gain;
    }
  };

  if (n < 2 * min_leaf) return best;
  for (feature = 0; feature < features_.num_features(); ++feature) {
    const std::size_t begin = leaf.seg_begin[feature];
    const std::size_t end = leaf.seg_end[feature];
    if (begin == end) continue;

    // Negative values, ascending: left side is the running prefix.
    double neg_sum = 0.0;
    long neg_count = 0;
    double max_neg = 0.0;
    std::size_t p = begin;
    for (; p < end && work_[p].value < 0.0; ++p) {
      const double v = work_[p].value;
      if (neg_count > 0 && v > max_neg) consider(neg_sum, neg_count, Midpoint(max_neg, v));
      neg_sum += residuals[work_[p].row];
      ++neg_count;
      max_neg = v;
    }
    // Positive values, descending: right side is the running suffix.
    double pos_sum = 0.0;
    long pos_count = 0;
    double min_pos = 0.0;
    for (std::size_t q = end; q > p; --q) {
      const double v = work_[q - 1].value;
      if (pos_count > 0 && v < min_pos) {
        consider(total - pos_sum, n - pos_count, Midpoint(v, min_pos));
      }
      pos_sum += residuals[work_[q - 1].row];
      ++pos_count;
      min_pos = v;
    }
    const long zero_count = n - neg_count - pos_count;
    if (neg_count > 0 && zero_count > 0) {
      consider(neg_sum, neg_count, Midpoint(max_neg, 0.0));
    }
    if (pos_count > 0 && (zero_count > 0 || neg_count > 0)) {
      const double below = zero_count > 0 ? 0.0 : max_neg;
      consider(total - pos_sum, n - pos_count, Midpoint(below, min_pos));
    }
  }
  return best;
}

void TreeBuilder::Partition(Leaf& parent, const Split& split, Leaf& left, Leaf& right) {
  const bool zero_goes_left = 0.0 <= split.threshold;
  for (int row : parent.rows) goes_left_[row] = zero_goes_left;
  for (std::size_t p = parent.seg_begin[split.feature]; p < parent.seg_end[split.feature];
       ++p) {
    goes_left_[work_[p].row] = work_[p].value <= split.threshold;
  }

  left.rows.clear();
  right.rows.clear();
  for (int row : parent.rows) (goes_left_[row] ? left.rows : right.rows).push_back(row);

  const int num_features = features_.num_features();
  left.seg_begin.resize(num_features);
  left.seg_end.resize(num_features);
  right.seg_begin.resize(num_features);
  right.seg_end.resize(num_features);
  for (int f = 0; f < num_features; ++f) {
    const std::size_t begin = parent.seg_begin[f];
    const std::size_t end = parent.seg_end[f];
    std::size_t write = begin;
    scratch_.clear();
    for (std::size_t p = begin; p < end; ++p) {
      if (goes_left_[work_[p].row]) {
        work_[write++] = work_[p];
      } else {
        scratch_.push_back(work_[p]);
      }
    }
    std::copy(scratch_.begin(), scratch_.end(), work_.begin() + write);
    left.seg_begin[f] = begin;
    left.seg_end[f] = write;
    right.seg_begin[f] = write;
    right.seg_end[f] = end;
  }
}

RegressionTree TreeBuilder::Fit(std::span<const double> residuals,
                                const TreeOptions& options) {
  if (residuals.size() != features_.num_rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "residual count differs from row count");
  }
  if (residuals.empty()) throw Error(ErrorCode::kEmptyDataset, "no rows to fit");
  if (options.max_leaves < 2 || options.min_samples_leaf < 1) {
    throw Error(ErrorCode::kInvalidArg, "max_leaves >= 2 and min_samples_leaf >= 1");
  }

  work_ = features_.entries();
  double sum_sq = 0.0;
  for (double r : residuals) sum_sq += r * r;
  // Splits must beat rounding noise on the variance reduction.
  min_gain_ = 1e-12 * (1.0 + sum_sq);

  std::vector<TreeNode> nodes(1);
  std::vector<Leaf> leaves(1);
  Leaf& root = leaves[0];
  root.node = 0;
  root.rows.resize(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) root.rows[i] = static_cast<int>(i);
  const auto& offsets = features_.offsets();
  root.seg_begin.assign(offsets.begin(), offsets.end() - 1);
  root.seg_end.assign(offsets.begin() + 1, offsets.end());
  for (double r : residuals) root.sum += r;
  root.best = FindBestSplit(root, residuals, options);

  while (static_cast<int>(leaves.size()) < options.max_leaves) {
    int chosen = -1;
    for (int i = 0; i < static_cast<int>(leaves.size()); ++i) {
      if (!leaves[i].best.valid()) continue;
      if (chosen < 0 || leaves[i].best.gain > leaves[chosen].best.gain ||
          (leaves[i].best.gain == leaves[chosen].best.gain &&
           leaves[i].node < leaves[chosen].node)) {
        chosen = i;
      }
    }
    if (chosen < 0) break;

    Leaf parent = std::move(leaves[chosen]);
    Leaf left;
    Leaf right;
    Partition(parent, parent.best, left, right);
    left.node = static_cast<int>(nodes.size());
    right.node = left.node + 1;
    nodes.resize(nodes.size() + 2);
    TreeNode& split_node = nodes[parent.node];
    split_node.feature = parent.best.feature;
    split_node.threshold = parent.best.threshold;
    split_node.left = left.node;
    split_node.right = right.node;

    for (int row : left.rows) left.sum += residuals[row];
    for (int row : right.rows) right.sum += residuals[row];
    left.best = FindBestSplit(left, residuals, options);
    right.best = FindBestSplit(right, residuals, options);
    leaves[chosen] = std::move(left);
    leaves.push_back(std::move(right));
  }

  for (const Leaf& leaf : leaves) {
    nodes[leaf.node].value = leaf.sum / static_cast<double>(leaf.rows.size());
  }
  std::vector<TreeNode> ordered;
  ordered.reserve(nodes.size());
  RenumberPreorder(nodes, 0, ordered);
  return RegressionTree(std::move(ordered));
}

}  // namespace lightmc
