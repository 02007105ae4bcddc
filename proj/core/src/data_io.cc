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

#include "lightmc/data_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "lightmc/error.h"
#include "lightmc/text_format.h"

namespace lightmc {

int LabelMap::Intern(const std::string& name) {
  auto [it, inserted] = ids_.emplace(name, static_cast<int>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

int LabelMap::Find(const std::string& name) const {
  auto it = ids_.find(name);
  return it == ids_.end() ? -1 : it->second;
}

LabelMap LabelMap::FromNames(std::vector<std::string> names) {
  LabelMap map;
  for (auto& name : names) {
    if (map.Find(name) >= 0) {
      throw Error(ErrorCode::kParseError, "duplicate label '" + name + "'");
    }
    map.Intern(name);
  }
  return map;
}

void WriteLabelMap(std::ostream& out, const LabelMap& labels) {
  for (int id = 0; id < labels.size(); ++id) {
    out << labels.Name(id) << '\t' << id << '\n';
  }
}

LabelMap ReadLabelMap(std::istream& in) {
  std::vector<std::string> names;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kParseError,
                  "labels.map line " + std::to_string(line_no) + ": missing tab");
    }
    const long long id = text::ParseInt(std::string_view(line).substr(tab + 1));
    if (id != static_cast<long long>(names.size())) {
      throw Error(ErrorCode::kParseError,
                  "labels.map line " + std::to_string(line_no) +
                      ": ids must be dense and in order");
    }
    names.push_back(line.substr(0, tab));
  }
  return LabelMap::FromNames(std::move(names));
}

SparseDataset::SparseDataset(std::vector<std::size_t> row_offsets,
                             std::vector<int> indices, std::vector<double> values,
                             std::vector<int> labels, int num_features,
                             LabelMap label_map)
    : row_offsets_(std::move(row_offsets)),
      indices_(std::move(indices)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      num_features_(num_features),
      label_map_(std::move(label_map)) {
  if (row_offsets_.size() != labels_.size() + 1 || row_offsets_.front() != 0 ||
      row_offsets_.back() != indices_.size() || indices_.size() != values_.size()) {
    throw Error(ErrorCode::kInvalidArg, "inconsistent CSR layout");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= label_map_.size()) {
      throw Error(ErrorCode::kIndexOutOfRange, "label outside the label map");
    }
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      if (indices_[p] < 0 || indices_[p] >= num_features_ ||
          (p > row_offsets_[i] && indices_[p] <= indices_[p - 1])) {
        throw Error(ErrorCode::kInvalidArg, "row " + std::to_string(i) +
                                                ": feature indices must increase");
      }
      if (!std::isfinite(values_[p])) {
        throw Error(ErrorCode::kNonFiniteInput, "row " + std::to_string(i) +
                                                    ": non-finite feature value");
      }
    }
  }
}

double SparseDataset::Feature(std::size_t i, int f) const {
  const auto idx = row_indices(i);
  auto it = std::lower_bound(idx.begin(), idx.end(), f);
  if (it == idx.end() || *it != f) return 0.0;
  return row_values(i)[it - idx.begin()];
}

SparseDataset SparseDataset::Subset(std::span<const std::size_t> rows) const {
  std::vector<std::size_t> offsets{0};
  std::vector<int> indices;
  std::vector<double> values;
  std::vector<int> labels;
  offsets.reserve(rows.size() + 1);
  labels.reserve(rows.size());
  for (std::size_t i : rows) {
    if (i >= num_rows()) {
      throw Error(ErrorCode::kIndexOutOfRange, "subset row out of range");
    }
    const auto idx = row_indices(i);
    const auto val = row_values(i);
    indices.insert(indices.end(), idx.begin(), idx.end());
    values.insert(values.end(), val.begin(), val.end());
    offsets.push_back(indices.size());
    labels.push_back(labels_[i]);
  }
  return SparseDataset(std::move(offsets), std::move(indices), std::move(values),
                       std::move(labels), num_features_, label_map_);
}

void SparseDatasetBuilder::AddRow(const std::string& label,
                                  std::span<const std::pair<int, double>> features) {
  AddRow(labels_.Intern(label), features);
}

void SparseDatasetBuilder::AddRow(int dense_label,
                                  std::span<const std::pair<int, double>> features) {
  if (dense_label < 0 || dense_label >= labels_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "dense label outside the label map");
  }
  int previous = -1;
  for (const auto& [index, value] : features) {
    if (index < 0 || index <= previous) {
      throw Error(ErrorCode::kParseError, "feature indices must be strictly increasing");
    }
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::kNonFiniteInput, "non-finite feature value");
    }
    previous = index;
  }
  for (const auto& [index, value] : features) {
    indices_.push_back(index);
    values_.push_back(value);
  }
  max_index_ = std::max(max_index_, previous);
  offsets_.push_back(indices_.size());
  row_labels_.push_back(dense_label);
}

SparseDataset SparseDatasetBuilder::Build(int min_features) && {
  const int num_features = std::max(max_index_ + 1, min_features);
  return SparseDataset(std::move(offsets_), std::move(indices_), std::move(values_),
                       std::move(row_labels_), num_features, std::move(labels_));
}

SparseDataset ParseSparseText(std::istream& in, const LoadOptions& options) {
  SparseDatasetBuilder builder(options.label_map);
  std::string line;
  int line_no = 0;
  std::vector<std::pair<int, double>> features;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = text::SplitWhitespace(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;

    features.clear();
    try {
      for (std::size_t t = 1; t < tokens.size(); ++t) {
        const auto token = tokens[t];
        if (token.front() == '#') break;
        const auto colon = token.find(':');
        if (colon == std::string_view::npos) {
          throw Error(ErrorCode::kParseError,
                      "expected idx:val, got '" + std::string(token) + "'");
        }
        long long index = text::ParseInt(token.substr(0, colon));
        if (!options.zero_based) --index;
        if (index < 0 || index > std::numeric_limits<int>::max()) {
          throw Error(ErrorCode::kParseError,
                      "feature index out of range in '" + std::string(token) + "'");
        }
        const double value = text::ParseDouble(token.substr(colon + 1));
        if (!features.empty() && index <= features.back().first) {
          throw Error(ErrorCode::kParseError, "feature indices must be strictly increasing");
        }
        features.emplace_back(static_cast<int>(index), value);
      }
      if (options.num_features > 0) {
        std::erase_if(features, [&](const auto& f) { return f.first >= options.num_features; });
      }
      builder.AddRow(std::string(tokens[0]), features);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  SparseDataset data = std::move(builder).Build(options.num_features);
  if (data.num_rows() == 0) throw Error(ErrorCode::kEmptyFile, "no data rows");
  return data;
}

SparseDataset LoadSparseText(const std::filesystem::path& path,
                             const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  try {
    return ParseSparseText(in, options);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void WriteSparseText(std::ostream& out, const SparseDataset& data, bool zero_based) {
  const int shift = zero_based ? 0 : 1;
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    out << data.label_map().Name(data.label(i));
    const auto idx = data.row_indices(i);
    const auto val = data.row_values(i);
    for (std::size_t p = 0; p < idx.size(); ++p) {
      out << ' ' << (idx[p] + shift) << ':' << text::FormatDouble(val[p]);
    }
    out << '\n';
  }
}

std::pair<SparseDataset, SparseDataset> StratifiedSplit(const SparseDataset& data,
                                                        double valid_fraction,
                                                        std::uint64_t seed) {
  if (!(valid_fraction > 0.0 && valid_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArg, "valid_fraction must lie in (0, 1)");
  }
  std::vector<std::vector<std::size_t>> by_class(data.num_classes());
  for (std::size_t i = 0; i < data.num_rows(); ++i) by_class[data.label(i)].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<char> is_valid(data.num_rows(), 0);
  for (int k = 0; k < data.num_classes(); ++k) {
    auto& rows = by_class[k];
    if (rows.empty()) continue;
    if (rows.size() < 2) {
      throw Error(ErrorCode::kTooFewInstances,
                  "class '" + data.label_map().Name(k) + "' has fewer than 2 rows");
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    const long n = static_cast<long>(rows.size());
    const long take = std::clamp(std::lround(valid_fraction * n), 1L, n - 1);
    for (long r = 0; r < take; ++r) is_valid[rows[r]] = 1;
  }

  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> valid_rows;
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    (is_valid[i] ? valid_rows : train_rows).push_back(i);
  }
  return {data.Subset(train_rows), data.Subset(valid_rows)};
}

int CsvTable::Column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

CsvTable ParseCsv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return fields;
  };
  CsvTable table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::kParseError,
                  "csv line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields");
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw Error(ErrorCode::kEmptyFile, "csv has no header");
  return table;
}

CsvTable ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return ParseCsv(in);
}

}  // namespace lightmc
