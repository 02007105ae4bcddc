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

#ifndef LIGHTMC_DATA_IO_H_
#define LIGHTMC_DATA_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lightmc {

// Maps original label tokens to dense class ids in first-appearance order.
class LabelMap {
 public:
  LabelMap() = default;

  // Returns the dense id of `name`, assigning the next id if unseen.
  int Intern(const std::string& name);
  // -1 when unknown.
  int Find(const std::string& name) const;

  const std::string& Name(int id) const { return names_.at(id); }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  static LabelMap FromNames(std::vector<std::string> names);

  friend bool operator==(const LabelMap& a, const LabelMap& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> ids_;
};

// "original<TAB>dense" per line.
void WriteLabelMap(std::ostream& out, const LabelMap& labels);
LabelMap ReadLabelMap(std::istream& in);

// Immutable row-sparse dataset in CSR layout. Row indices are strictly
// increasing and < num_features; labels lie in [0, num_classes).
class SparseDataset {
 public:
  SparseDataset() = default;
  SparseDataset(std::vector<std::size_t> row_offsets, std::vector<int> indices,
                std::vector<double> values, std::vector<int> labels,
                int num_features, LabelMap label_map);

  std::size_t num_rows() const { return labels_.size(); }
  int num_features() const { return num_features_; }
  int num_classes() const { return label_map_.size(); }
  std::size_t num_nonzeros() const { return values_.size(); }

  std::span<const int> row_indices(std::size_t i) const {
    return {indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  // Value of feature `f` in row `i`, zero when absent.
  double Feature(std::size_t i, int f) const;

  std::span<const int> labels() const { return labels_; }
  int label(std::size_t i) const { return labels_[i]; }
  const LabelMap& label_map() const { return label_map_; }

  // Rows `rows` (in the given order) sharing this dataset's feature space
  // and label map.
  SparseDataset Subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const SparseDataset&, const SparseDataset&) = default;

 private:
  std::vector<std::size_t> row_offsets_{0};
  std::vector<int> indices_;
  std::vector<double> values_;
  std::vector<int> labels_;
  int num_features_ = 0;
  LabelMap label_map_;
};

// Incremental construction; each AddRow validates its own row.
class SparseDatasetBuilder {
 public:
  explicit SparseDatasetBuilder(LabelMap labels = {}) : labels_(std::move(labels)) {}

  // `features` must have strictly increasing indices and finite values.
  void AddRow(const std::string& label,
              std::span<const std::pair<int, double>> features);
  void AddRow(int dense_label, std::span<const std::pair<int, double>> features);

  // num_features is max(observed index + 1, min_features).
  SparseDataset Build(int min_features = 0) &&;

  LabelMap& labels() { return labels_; }

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<int> indices_;
  std::vector<double> values_;
  std::vector<int> row_labels_;
  int max_index_ = -1;
  LabelMap labels_;
};

struct LoadOptions {
  bool zero_based = false;  // feature indices are 1-based by default
  // Pre-existing label ids (e.g. from a trained model). New tokens extend it.
  LabelMap label_map;
  // When > 0, fixes num_features; indices >= num_features are dropped.
  int num_features = 0;
};

// Parses "<label> <idx>:<val> ..." lines. Blank lines and lines starting with
// '#' are skipped; trailing "# ..." comments are ignored. Throws ParseError
// (with the 1-based line number) or EmptyFile.
SparseDataset LoadSparseText(const std::filesystem::path& path,
                             const LoadOptions& options = {});
SparseDataset ParseSparseText(std::istream& in, const LoadOptions& options = {});

// Writes labels using their original tokens, so reloading with the same label
// map reproduces the dataset.
void WriteSparseText(std::ostream& out, const SparseDataset& data,
                     bool zero_based = false);

// Per-class seeded split; round(fraction * n_k) rows of class k, clamped to
// [1, n_k - 1], go to validation. Row order is preserved within each part.
// Throws TooFewInstances when a class has fewer than two rows.
std::pair<SparseDataset, SparseDataset> StratifiedSplit(const SparseDataset& data,
                                                        double valid_fraction,
                                                        std::uint64_t seed);

// Minimal CSV reader for the files this tool writes (no quoting).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int Column(const std::string& name) const;
};
CsvTable ReadCsv(const std::filesystem::path& path);
CsvTable ParseCsv(std::istream& in);

}  // namespace lightmc

#endif  // LIGHTMC_DATA_IO_H_
