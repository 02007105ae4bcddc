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

#ifndef LIGHTMC_TRAINER_H_
#define LIGHTMC_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "lightmc/codebook.h"
#include "lightmc/data_io.h"
#include "lightmc/learners.h"
#include "lightmc/softmax_decoder.h"

namespace lightmc {

enum class TrainMode { kLightMC, kEcocFixed, kOva };

std::string_view TrainModeName(TrainMode mode);
TrainMode ParseTrainMode(std::string_view name);

struct TrainConfig {
  TrainMode mode = TrainMode::kLightMC;
  int code_length = 0;             // 0 selects the suggested length
  int max_rounds = 500;            // T
  int start_round = 30;            // i_s
  LearnerSpec learner;
  double gamma1 = 0.1;             // decoder learning rate
  double gamma2 = 0.2;             // coding-matrix learning rate
  int decoder_batch = 256;
  int decoder_epochs_per_call = 1;
  double l2 = 0.0;
  int matrix_batch = 0;            // 0: full-batch matrix update
  std::uint64_t seed = 1;
  int early_stop_rounds = 20;      // 0 disables
  bool decoder_update = true;      // lightmc mode only
  bool matrix_update = true;       // lightmc mode only

  // Throws ConfigInvalid.
  void Validate() const;
};

// Whether decoder/matrix updates run after base-learner round `round`
// (1-based). Non-boosting learners update every round; boosting learners at
// start_round + m * round(1 / alpha).
bool IsUpdateRound(int round, const TrainConfig& config);
std::vector<int> UpdateRounds(const TrainConfig& config);

// Code length used for `num_classes`: the configured value, or the suggested
// length raised to the smallest feasible one when `auto`.
int ResolveCodeLength(const TrainConfig& config, int num_classes);

struct RoundRecord {
  int round = 0;
  double elapsed_seconds = 0.0;
  double train_loss = 0.0;
  double valid_error = 0.0;
};

struct TrainedModel {
  TrainMode mode = TrainMode::kLightMC;
  CodingMatrix matrix;
  DecoderParams decoder;
  BaseLearnerEnsemble ensemble;
  std::vector<RoundRecord> history;
  int best_round = 0;
};

struct RoundEvent {
  const RoundRecord& record;
  const CodingMatrix& matrix;
  const DecoderParams& decoder;
  bool updated = false;
};

struct FitOptions {
  // Shared starting matrix for paired comparisons; must be K x L.
  std::optional<CodingMatrix> initial_matrix;
  std::function<void(const RoundEvent&)> on_round;
};

// Alternates one base-learner round with, on update rounds, one
// TrainDecoding call and one coding-matrix step whose output gradients are
// taken under the freshly trained decoder. Returns the snapshot with the
// lowest validation error. ecoc_fixed runs the same loop with both updates
// off; ova dispatches to FitOva.
//
// Throws MissingClass when a class has no training rows, ConfigInvalid,
// DimensionMismatch when the validation feature space differs.
TrainedModel Fit(const SparseDataset& train, const SparseDataset& valid,
                 const TrainConfig& config, const FitOptions& options = {});

// K learners with +1/-1 one-versus-all targets; prediction is the argmax of
// raw outputs.
TrainedModel FitOva(const SparseDataset& train, const SparseDataset& valid,
                    const TrainConfig& config, const FitOptions& options = {});

// Class predictions from base-learner outputs (rows of `outputs`).
std::vector<int> PredictFromOutputs(const TrainedModel& model, const Matrix& outputs);
std::vector<int> Predict(const TrainedModel& model, const SparseDataset& data);

// Fraction of rows whose prediction differs from the label.
double ClassificationError(std::span<const int> predicted, std::span<const int> labels);

// Model bundle directory: codebook.txt, decoder.txt, ensemble.txt,
// history.csv, model.meta and labels.map.
void SaveModel(const std::filesystem::path& dir, const TrainedModel& model,
               const LabelMap& labels);
struct LoadedModel {
  TrainedModel model;
  LabelMap labels;
};
LoadedModel LoadModel(const std::filesystem::path& dir);

void WriteHistoryCsv(const std::filesystem::path& path,
                     const std::vector<RoundRecord>& history);

}  // namespace lightmc

#endif  // LIGHTMC_TRAINER_H_
