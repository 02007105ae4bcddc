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

#ifndef LIGHTMC_LEARNERS_H_
#define LIGHTMC_LEARNERS_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "lightmc/codebook.h"
#include "lightmc/data_io.h"
#include "lightmc/decision_tree.h"
#include "lightmc/matrix.h"

namespace lightmc {

enum class LearnerKind { kBoostedTrees, kLinearSgd };

std::string_view LearnerKindName(LearnerKind kind);
LearnerKind ParseLearnerKind(std::string_view name);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::kBoostedTrees;
  double learning_rate = 0.1;  // alpha: tree shrinkage, or SGD step size
  int max_leaves = 31;
  int min_samples_leaf = 20;
  int epochs_per_round = 1;    // linear_sgd only
  std::uint64_t seed = 0;      // linear_sgd shuffle seed

  bool is_boosting() const { return kind == LearnerKind::kBoostedTrees; }
  // Throws ConfigInvalid.
  void Validate() const;
};

// Linear regressor w.x + b.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;

  double Predict(std::span<const int> indices, std::span<const double> values) const;
  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

// L independent regressors, member j trained on code column j. Boosted
// members predict shrinkage * sum(tree outputs).
class BaseLearnerEnsemble {
 public:
  BaseLearnerEnsemble() = default;
  BaseLearnerEnsemble(LearnerKind kind, int num_members, int num_features,
                      double shrinkage);

  LearnerKind kind() const { return kind_; }
  bool is_boosting() const { return kind_ == LearnerKind::kBoostedTrees; }
  int size() const { return num_members_; }
  int num_features() const { return num_features_; }
  double shrinkage() const { return shrinkage_; }

  // Boosting rounds performed (trees per member); linear: rounds trained.
  int rounds() const { return rounds_; }

  const std::vector<RegressionTree>& trees(int member) const { return trees_.at(member); }
  const LinearModel& linear(int member) const { return linear_.at(member); }

  double PredictMember(int member, std::span<const int> indices,
                       std::span<const double> values) const;

  // Row i, column j = member j on instance i. Throws DimensionMismatch when
  // the feature spaces differ.
  Matrix PredictAll(const SparseDataset& data) const;

  // First `rounds` trees of every boosted member.
  BaseLearnerEnsemble Truncated(int rounds) const;

  void AppendTrees(std::vector<RegressionTree> per_member);
  void SetLinear(std::vector<LinearModel> per_member);

  friend bool operator==(const BaseLearnerEnsemble&, const BaseLearnerEnsemble&) = default;
  friend BaseLearnerEnsemble ReadEnsemble(std::istream& in);

 private:
  LearnerKind kind_ = LearnerKind::kBoostedTrees;
  int num_members_ = 0;
  int num_features_ = 0;
  double shrinkage_ = 1.0;
  int rounds_ = 0;
  std::vector<std::vector<RegressionTree>> trees_;
  std::vector<LinearModel> linear_;
};

// target_i = M[labels_i, column].
std::vector<double> MakeTargets(const CodingMatrix& matrix, std::span<const int> labels,
                                int column);

// One training round from scratch state: predictions are recomputed from the
// ensemble. EnsembleTrainer is the incremental equivalent used by the trainer.
BaseLearnerEnsemble TrainRound(BaseLearnerEnsemble ensemble, const SparseDataset& data,
                               const CodingMatrix& matrix, const LearnerSpec& spec);

// Keeps training-set (and evaluation-set) outputs current across rounds, so a
// boosting round costs one tree fit per column instead of a full re-predict.
class EnsembleTrainer {
 public:
  EnsembleTrainer(const SparseDataset& train, int num_members, const LearnerSpec& spec);

  // Trains every member one round against the current codewords.
  void TrainRound(const CodingMatrix& matrix);

  // Registers a dataset whose outputs are tracked; returns its handle.
  int AddEvalSet(const SparseDataset& data);

  const Matrix& train_outputs() const { return train_outputs_; }
  const Matrix& eval_outputs(int handle) const { return eval_outputs_.at(handle); }
  const BaseLearnerEnsemble& ensemble() const { return ensemble_; }

 private:
  const SparseDataset& train_;
  LearnerSpec spec_;
  BaseLearnerEnsemble ensemble_;
  std::unique_ptr<PresortedFeatures> presorted_;
  Matrix train_outputs_;
  std::vector<const SparseDataset*> eval_sets_;
  std::vector<Matrix> eval_outputs_;
};

// Sets the OpenMP thread count used by training and prediction (no-op when
// built without OpenMP). `threads <= 0` keeps the runtime default.
void SetNumThreads(int threads);

// "lightmc-ensemble v1 L kind", "shrinkage <a> features <F> rounds <r>", then
// per member either "member j trees T" plus T tree dumps or "member j linear"
// plus a weights row and a bias row.
void WriteEnsemble(std::ostream& out, const BaseLearnerEnsemble& ensemble);
BaseLearnerEnsemble ReadEnsemble(std::istream& in);

}  // namespace lightmc

#endif  // LIGHTMC_LEARNERS_H_
