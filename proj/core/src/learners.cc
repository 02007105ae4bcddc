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

#include "lightmc/learners.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lightmc/error.h"
#include "lightmc/text_format.h"

namespace lightmc {
namespace {

constexpr std::string_view kEnsembleMagic = "lightmc-ensemble";

// Normalised LMS epoch: the step alpha / (1 + |x|^2) keeps squared-error SGD
// stable for any feature scale when alpha is in (0, 1].
void LinearEpochs(LinearModel& model, const SparseDataset& data,
                  std::span<const double> targets, const LearnerSpec& spec,
                  int column, int round) {
  std::vector<std::size_t> order(data.num_rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(column), static_cast<std::uint32_t>(round)};
  std::mt19937_64 rng(seq);
  for (int epoch = 0; epoch < spec.epochs_per_round; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const auto idx = data.row_indices(i);
      const auto val = data.row_values(i);
      double norm_sq = 0.0;
      for (double v : val) norm_sq += v * v;
      const double error = model.Predict(idx, val) - targets[i];
      const double step = spec.learning_rate / (1.0 + norm_sq);
      for (std::size_t p = 0; p < idx.size(); ++p) {
        model.weights[idx[p]] -= step * error * val[p];
      }
      model.bias -= step * error;
    }
  }
}

TreeOptions TreeOptionsFrom(const LearnerSpec& spec) {
  return {spec.max_leaves, spec.min_samples_leaf};
}

void CheckTargets(const CodingMatrix& matrix, const SparseDataset& data, int members) {
  if (data.num_rows() == 0) throw Error(ErrorCode::kEmptyDataset, "no training rows");
  if (matrix.code_length() != members) {
    throw Error(ErrorCode::kDimensionMismatch,
                "coding matrix has " + std::to_string(matrix.code_length()) +
                    " columns for " + std::to_string(members) + " learners");
  }
}

}  // namespace

std::string_view LearnerKindName(LearnerKind kind) {
  return kind == LearnerKind::kBoostedTrees ? "boosted_trees" : "linear_sgd";
}

LearnerKind ParseLearnerKind(std::string_view name) {
  if (name == "boosted_trees" || name == "trees") return LearnerKind::kBoostedTrees;
  if (name == "linear_sgd" || name == "linear") return LearnerKind::kLinearSgd;
  throw Error(ErrorCode::kConfigInvalid, "unknown learner kind '" + std::string(name) + "'");
}

void LearnerSpec::Validate() const {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorCode::kConfigInvalid, "learning rate must lie in (0, 1]");
  }
  if (max_leaves < 2) throw Error(ErrorCode::kConfigInvalid, "max_leaves must be >= 2");
  if (min_samples_leaf < 1) {
    throw Error(ErrorCode::kConfigInvalid, "min_samples_leaf must be >= 1");
  }
  if (epochs_per_round < 1) {
    throw Error(ErrorCode::kConfigInvalid, "epochs_per_round must be >= 1");
  }
}

double LinearModel::Predict(std::span<const int> indices,
                            std::span<const double> values) const {
  double sum = bias;
  for (std::size_t p = 0; p < indices.size(); ++p) {
    if (indices[p] < static_cast<int>(weights.size())) sum += weights[indices[p]] * values[p];
  }
  return sum;
}

BaseLearnerEnsemble::BaseLearnerEnsemble(LearnerKind kind, int num_members,
                                         int num_features, double shrinkage)
    : kind_(kind),
      num_members_(num_members),
      num_features_(num_features),
      shrinkage_(shrinkage) {
  if (num_members < 1) throw Error(ErrorCode::kInvalidArg, "ensemble needs members");
  if (num_features < 0) throw Error(ErrorCode::kInvalidArg, "negative feature count");
  if (is_boosting()) {
    trees_.resize(num_members);
  } else {
    linear_.assign(num_members, LinearModel{std::vector<double>(num_features, 0.0), 0.0});
  }
}

double BaseLearnerEnsemble::PredictMember(int member, std::span<const int> indices,
                                          std::span<const double> values) const {
  if (!is_boosting()) return linear_[member].Predict(indices, values);
  double sum = 0.0;
  for (const RegressionTree& tree : trees_[member]) sum += tree.Predict(indices, values);
  return shrinkage_ * sum;
}

Matrix BaseLearnerEnsemble::PredictAll(const SparseDataset& data) const {
  if (data.num_features() != num_features_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dataset has " + std::to_string(data.num_features()) +
                    " features, ensemble was trained on " + std::to_string(num_features_));
  }
  const long n = static_cast<long>(data.num_rows());
  Matrix out(n, num_members_);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const auto idx = data.row_indices(i);
    const auto val = data.row_values(i);
    for (int j = 0; j < num_members_; ++j) out(i, j) = PredictMember(j, idx, val);
  }
  return out;
}

BaseLearnerEnsemble BaseLearnerEnsemble::Truncated(int rounds) const {
  BaseLearnerEnsemble copy = *this;
  if (!is_boosting() || rounds >= rounds_) return copy;
  rounds = std::max(rounds, 0);
  for (auto& member : copy.trees_) member.resize(rounds);
  copy.rounds_ = rounds;
  return copy;
}

void BaseLearnerEnsemble::AppendTrees(std::vector<RegressionTree> per_member) {
  if (!is_boosting() || static_cast<int>(per_member.size()) != num_members_) {
    throw Error(ErrorCode::kDimensionMismatch, "need one tree per boosted member");
  }
  for (int j = 0; j < num_members_; ++j) trees_[j].push_back(std::move(per_member[j]));
  ++rounds_;
}

void BaseLearnerEnsemble::SetLinear(std::vector<LinearModel> per_member) {
  if (is_boosting() || static_cast<int>(per_member.size()) != num_members_) {
    throw Error(ErrorCode::kDimensionMismatch, "need one linear model per member");
  }
  linear_ = std::move(per_member);
  ++rounds_;
}

std::vector<double> MakeTargets(const CodingMatrix& matrix, std::span<const int> labels,
                                int column) {
  if (column < 0 || column >= matrix.code_length()) {
    throw Error(ErrorCode::kIndexOutOfRange, "code column " + std::to_string(column));
  }
  std::vector<double> targets(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= matrix.num_classes()) {
      throw Error(ErrorCode::kIndexOutOfRange, "label " + std::to_string(labels[i]));
    }
    targets[i] = matrix(labels[i], column);
  }
  return targets;
}

BaseLearnerEnsemble TrainRound(BaseLearnerEnsemble ensemble, const SparseDataset& data,
                               const CodingMatrix& matrix, const LearnerSpec& spec) {
  spec.Validate();
  CheckTargets(matrix, data, ensemble.size());
  if (ensemble.kind() != spec.kind) {
    throw Error(ErrorCode::kConfigInvalid, "learner kind differs from the ensemble");
  }
  const Matrix current = ensemble.PredictAll(data);
  const int members = ensemble.size();
  if (ensemble.is_boosting()) {
    const PresortedFeatures presorted(data);
    std::vector<RegressionTree> trees(members);
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < members; ++j) {
      std::vector<double> residuals = MakeTargets(matrix, data.labels(), j);
      for (std::size_t i = 0; i < residuals.size(); ++i) residuals[i] -= current(i, j);
      TreeBuilder builder(presorted);
      trees[j] = builder.Fit(residuals, TreeOptionsFrom(spec));
    }
    ensemble.AppendTrees(std::move(trees));
  } else {
    std::vector<LinearModel> models(members);
    const int round = ensemble.rounds();
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < members; ++j) {
      models[j] = ensemble.linear(j);
      LinearEpochs(models[j], data, MakeTargets(matrix, data.labels(), j), spec, j, round);
    }
    ensemble.SetLinear(std::move(models));
  }
  return ensemble;
}

EnsembleTrainer::EnsembleTrainer(const SparseDataset& train, int num_members,
                                 const LearnerSpec& spec)
    : train_(train),
      spec_(spec),
      ensemble_(spec.kind, num_members, train.num_features(),
                spec.is_boosting() ? spec.learning_rate : 1.0),
      train_outputs_(train.num_rows(), num_members) {
  spec_.Validate();
  if (train.num_rows() == 0) throw Error(ErrorCode::kEmptyDataset, "no training rows");
  if (spec_.is_boosting()) presorted_ = std::make_unique<PresortedFeatures>(train);
}

int EnsembleTrainer::AddEvalSet(const SparseDataset& data) {
  eval_sets_.push_back(&data);
  eval_outputs_.push_back(ensemble_.PredictAll(data));
  return static_cast<int>(eval_sets_.size()) - 1;
}

void EnsembleTrainer::TrainRound(const CodingMatrix& matrix) {
  CheckTargets(matrix, train_, ensemble_.size());
  const int members = ensemble_.size();
  const std::size_t n = train_.num_rows();

  if (ensemble_.is_boosting()) {
    std::vector<RegressionTree> trees(members);
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < members; ++j) {
      std::vector<double> residuals = MakeTargets(matrix, train_.labels(), j);
      for (std::size_t i = 0; i < n; ++i) residuals[i] -= train_outputs_(i, j);
      TreeBuilder builder(*presorted_);
      trees[j] = builder.Fit(residuals, TreeOptionsFrom(spec_));
      for (std::size_t i = 0; i < n; ++i) {
        train_outputs_(i, j) += spec_.learning_rate * trees[j].Predict(train_, i);
      }
      for (std::size_t e = 0; e < eval_sets_.size(); ++e) {
        const SparseDataset& eval = *eval_sets_[e];
        for (std::size_t i = 0; i < eval.num_rows(); ++i) {
          eval_outputs_[e](i, j) += spec_.learning_rate * trees[j].Predict(eval, i);
        }
      }
    }
    ensemble_.AppendTrees(std::move(trees));
    return;
  }

  std::vector<LinearModel> models(members);
  const int round = ensemble_.rounds();
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < members; ++j) {
    models[j] = ensemble_.linear(j);
    LinearEpochs(models[j], train_, MakeTargets(matrix, train_.labels(), j), spec_, j,
                 round);
  }
  ensemble_.SetLinear(std::move(models));
  train_outputs_ = ensemble_.PredictAll(train_);
  for (std::size_t e = 0; e < eval_sets_.size(); ++e) {
    eval_outputs_[e] = ensemble_.PredictAll(*eval_sets_[e]);
  }
}

void SetNumThreads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

void WriteEnsemble(std::ostream& out, const BaseLearnerEnsemble& ensemble) {
  out << kEnsembleMagic << " v1 " << ensemble.size() << ' '
      << LearnerKindName(ensemble.kind()) << '\n';
  out << "shrinkage " << text::FormatDouble(ensemble.shrinkage()) << " features "
      << ensemble.num_features() << " rounds " << ensemble.rounds() << '\n';
  for (int j = 0; j < ensemble.size(); ++j) {
    if (ensemble.is_boosting()) {
      out << "member " << j << " trees " << ensemble.trees(j).size() << '\n';
      for (const RegressionTree& tree : ensemble.trees(j)) WriteTree(out, tree);
    } else {
      out << "member " << j << " linear\n";
      text::WriteRow(out, ensemble.linear(j).weights);
      out << text::FormatDouble(ensemble.linear(j).bias) << '\n';
    }
  }
}

BaseLearnerEnsemble ReadEnsemble(std::istream& in) {
  std::string line = text::ReadLine(in, "ensemble header");
  auto tokens = text::SplitWhitespace(line);
  if (tokens.size() != 4 || tokens[0] != kEnsembleMagic || tokens[1] != "v1") {
    throw Error(ErrorCode::kParseError, "bad ensemble header: '" + line + "'");
  }
  const long long members = text::ParseInt(tokens[2]);
  const LearnerKind kind = ParseLearnerKind(tokens[3]);

  line = text::ReadLine(in, "ensemble parameters");
  tokens = text::SplitWhitespace(line);
  if (tokens.size() != 6 || tokens[0] != "shrinkage" || tokens[2] != "features" ||
      tokens[4] != "rounds") {
    throw Error(ErrorCode::kParseError, "bad ensemble parameter line: '" + line + "'");
  }
  const double shrinkage = text::ParseDouble(tokens[1]);
  const long long features = text::ParseInt(tokens[3]);
  const long long rounds = text::ParseInt(tokens[5]);
  if (members < 1 || features < 0 || rounds < 0) {
    throw Error(ErrorCode::kParseError, "bad ensemble dimensions");
  }

  BaseLearnerEnsemble ensemble(kind, static_cast<int>(members), static_cast<int>(features),
                               shrinkage);
  std::vector<std::vector<RegressionTree>> trees(members);
  std::vector<LinearModel> linear(members);
  for (long long j = 0; j < members; ++j) {
    line = text::ReadLine(in, "ensemble member");
    tokens = text::SplitWhitespace(line);
    if (tokens.size() < 3 || tokens[0] != "member" || text::ParseInt(tokens[1]) != j) {
      throw Error(ErrorCode::kParseError, "bad member line: '" + line + "'");
    }
    if (kind == LearnerKind::kBoostedTrees) {
      if (tokens.size() != 4 || tokens[2] != "trees" || text::ParseInt(tokens[3]) != rounds) {
        throw Error(ErrorCode::kParseError, "bad member line: '" + line + "'");
      }
      for (long long t = 0; t < rounds; ++t) trees[j].push_back(ReadTree(in));
    } else {
      if (tokens.size() != 3 || tokens[2] != "linear") {
        throw Error(ErrorCode::kParseError, "bad member line: '" + line + "'");
      }
      linear[j].weights = text::ReadRow(in, features, "linear weights");
      linear[j].bias = text::ReadRow(in, 1, "linear bias").front();
    }
  }
  if (kind == LearnerKind::kBoostedTrees) {
    ensemble.trees_ = std::move(trees);
  } else {
    ensemble.linear_ = std::move(linear);
  }
  ensemble.rounds_ = static_cast<int>(rounds);
  return ensemble;
}

}  // namespace lightmc
