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

#include "lightmc/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "lightmc/error.h"
#include "lightmc/matrix_optimizer.h"
#include "lightmc/text_format.h"

namespace lightmc {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void CheckTrainingData(const SparseDataset& train, const SparseDataset& valid) {
  if (train.num_rows() == 0) throw Error(ErrorCode::kEmptyDataset, "training set is empty");
  if (valid.num_rows() == 0) throw Error(ErrorCode::kEmptyDataset, "validation set is empty");
  if (train.num_classes() < 3) {
    throw Error(ErrorCode::kConfigInvalid, "need at least 3 classes");
  }
  std::vector<char> seen(train.num_classes(), 0);
  for (int y : train.labels()) seen[y] = 1;
  for (int k = 0; k < train.num_classes(); ++k) {
    if (!seen[k]) {
      throw Error(ErrorCode::kMissingClass,
                  "class '" + train.label_map().Name(k) + "' has no training rows");
    }
  }
  if (valid.num_features() != train.num_features()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "validation set has " + std::to_string(valid.num_features()) +
                    " features, training set " + std::to_string(train.num_features()));
  }
}

std::vector<int> ArgmaxRows(const Matrix& outputs) {
  std::vector<int> result(outputs.rows());
  for (std::size_t i = 0; i < outputs.rows(); ++i) {
    const auto row = outputs.row(i);
    result[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return result;
}

std::vector<int> DecodeRows(const DecoderParams& decoder, const Matrix& outputs) {
  std::vector<int> result(outputs.rows());
  for (std::size_t i = 0; i < outputs.rows(); ++i) {
    result[i] = Decode(decoder, outputs.row(i)).predicted;
  }
  return result;
}

CodingMatrix StepCodingMatrix(CodingMatrix matrix, const DecoderParams& decoder,
                              const Matrix& outputs, std::span<const int> labels,
                              const TrainConfig& config) {
  const std::size_t n = labels.size();
  const std::size_t batch = config.matrix_batch > 0 ? config.matrix_batch : n;
  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t stop = std::min(n, start + batch);
    Matrix grads(stop - start, outputs.cols());
    for (std::size_t i = start; i < stop; ++i) {
      const std::vector<double> g = OutputGradient(decoder, outputs.row(i), labels[i]);
      std::copy(g.begin(), g.end(), grads.row(i - start).begin());
    }
    const ClassGradientStats stats = AccumulateClassGradients(
        grads, labels.subspan(start, stop - start), matrix.num_classes());
    matrix = UpdateCodingMatrix(matrix, stats, config.gamma2);
  }
  return matrix;
}

struct LoopSetup {
  TrainMode mode;
  CodingMatrix matrix;
  bool decoder_update;
  bool matrix_update;
};

TrainedModel RunLoop(const SparseDataset& train, const SparseDataset& valid,
                     const TrainConfig& config, LoopSetup setup,
                     const FitOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  const int code_length = setup.matrix.code_length();
  LearnerSpec learner = config.learner;
  learner.seed = config.seed;
  EnsembleTrainer trainer(train, code_length, learner);
  const int valid_handle = trainer.AddEvalSet(valid);
  const auto labels = train.labels();

  CodingMatrix matrix = std::move(setup.matrix);
  DecoderParams decoder = InitDecoderFromMatrix(matrix);

  TrainedModel best{setup.mode, matrix, decoder, {}, {}, 0};
  std::optional<BaseLearnerEnsemble> best_linear;
  double best_error = std::numeric_limits<double>::infinity();
  std::vector<RoundRecord> history;
  int stale = 0;

  for (int round = 1; round <= config.max_rounds; ++round) {
    trainer.TrainRound(matrix);
    const Matrix& outputs = trainer.train_outputs();

    bool updated = false;
    if ((setup.decoder_update || setup.matrix_update) && IsUpdateRound(round, config)) {
      if (setup.decoder_update) {
        DecoderTrainOptions opts;
        opts.learning_rate = config.gamma1;
        opts.batch_size = config.decoder_batch;
        opts.epochs = config.decoder_epochs_per_call;
        opts.l2 = config.l2;
        opts.seed = SplitMix64(config.seed ^ SplitMix64(static_cast<std::uint64_t>(round)));
        decoder = TrainDecoding(std::move(decoder), outputs, labels, opts);
      }
      if (setup.matrix_update) {
        matrix = StepCodingMatrix(std::move(matrix), decoder, outputs, labels, config);
      }
      updated = true;
    }

    RoundRecord record;
    record.round = round;
    record.train_loss = MeanDecoderLoss(decoder, outputs, labels);
    const Matrix& valid_outputs = trainer.eval_outputs(valid_handle);
    const std::vector<int> valid_pred = setup.mode == TrainMode::kOva
                                            ? ArgmaxRows(valid_outputs)
                                            : DecodeRows(decoder, valid_outputs);
    record.valid_error = ClassificationError(valid_pred, valid.labels());
    record.elapsed_seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    if (!history.empty() && record.elapsed_seconds <= history.back().elapsed_seconds) {
      record.elapsed_seconds = std::nextafter(history.back().elapsed_seconds,
                                              std::numeric_limits<double>::infinity());
    }
    history.push_back(record);
    if (options.on_round) options.on_round(RoundEvent{record, matrix, decoder, updated});

    if (record.valid_error < best_error) {
      best_error = record.valid_error;
      best.matrix = matrix;
      best.decoder = decoder;
      best.best_round = round;
      if (!trainer.ensemble().is_boosting()) best_linear = trainer.ensemble();
      stale = 0;
    } else if (config.early_stop_rounds > 0 && ++stale >= config.early_stop_rounds) {
      break;
    }
  }

  best.ensemble = best_linear ? std::move(*best_linear)
                              : trainer.ensemble().Truncated(best.best_round);
  best.history = std::move(history);
  return best;
}

}  // namespace

std::string_view TrainModeName(TrainMode mode) {
  switch (mode) {
    case TrainMode::kLightMC: return "lightmc";
    case TrainMode::kEcocFixed: return "ecoc_fixed";
    case TrainMode::kOva: return "ova";
  }
  return "unknown";
}

TrainMode ParseTrainMode(std::string_view name) {
  if (name == "lightmc") return TrainMode::kLightMC;
  if (name == "ecoc_fixed") return TrainMode::kEcocFixed;
  if (name == "ova") return TrainMode::kOva;
  throw Error(ErrorCode::kConfigInvalid, "unknown mode '" + std::string(name) + "'");
}

void TrainConfig::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigInvalid, what); };
  if (code_length < 0) fail("code_length must be >= 0 (0 = auto)");
  if (max_rounds < 1) fail("max_rounds must be >= 1");
  if (start_round < 1) fail("start_round must be >= 1");
  if (mode == TrainMode::kLightMC) {
    if (decoder_update && !(gamma1 > 0.0)) fail("gamma1 must be positive");
    if (matrix_update && !(gamma2 > 0.0)) fail("gamma2 must be positive");
  }
  if (decoder_batch < 1) fail("decoder_batch must be >= 1");
  if (decoder_epochs_per_call < 0) fail("decoder_epochs_per_call must be >= 0");
  if (!(l2 >= 0.0)) fail("l2 must be >= 0");
  if (matrix_batch < 0) fail("matrix_batch must be >= 0");
  if (early_stop_rounds < 0) fail("early_stop_rounds must be >= 0");
  learner.Validate();
}

bool IsUpdateRound(int round, const TrainConfig& config) {
  if (round < 1) return false;
  if (!config.learner.is_boosting()) return true;
  const long period = std::max(1L, std::lround(1.0 / config.learner.learning_rate));
  return round >= config.start_round && (round - config.start_round) % period == 0;
}

std::vector<int> UpdateRounds(const TrainConfig& config) {
  std::vector<int> rounds;
  for (int r = 1; r <= config.max_rounds; ++r) {
    if (IsUpdateRound(r, config)) rounds.push_back(r);
  }
  return rounds;
}

int ResolveCodeLength(const TrainConfig& config, int num_classes) {
  if (config.code_length > 0) return config.code_length;
  return std::max(SuggestedCodeLength(num_classes), MinimumFeasibleCodeLength(num_classes));
}

TrainedModel Fit(const SparseDataset& train, const SparseDataset& valid,
                 const TrainConfig& config, const FitOptions& options) {
  config.Validate();
  if (config.mode == TrainMode::kOva) return FitOva(train, valid, config, options);
  CheckTrainingData(train, valid);

  const int num_classes = train.num_classes();
  CodingMatrix matrix =
      options.initial_matrix
          ? *options.initial_matrix
          : InitRandomCodingMatrix(num_classes, ResolveCodeLength(config, num_classes),
                                   config.seed);
  if (matrix.num_classes() != num_classes) {
    throw Error(ErrorCode::kDimensionMismatch, "initial matrix has the wrong class count");
  }
  const bool lightmc = config.mode == TrainMode::kLightMC;
  return RunLoop(train, valid, config,
                 {config.mode, std::move(matrix), lightmc && config.decoder_update,
                  lightmc && config.matrix_update},
                 options);
}

TrainedModel FitOva(const SparseDataset& train, const SparseDataset& valid,
                    const TrainConfig& config, const FitOptions& options) {
  config.Validate();
  CheckTrainingData(train, valid);
  return RunLoop(train, valid, config,
                 {TrainMode::kOva, OneVersusAllMatrix(train.num_classes()), false, false},
                 options);
}

std::vector<int> PredictFromOutputs(const TrainedModel& model, const Matrix& outputs) {
  if (static_cast<int>(outputs.cols()) != model.ensemble.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "output width differs from ensemble size");
  }
  return model.mode == TrainMode::kOva ? ArgmaxRows(outputs)
                                       : DecodeRows(model.decoder, outputs);
}

std::vector<int> Predict(const TrainedModel& model, const SparseDataset& data) {
  return PredictFromOutputs(model, model.ensemble.PredictAll(data));
}

double ClassificationError(std::span<const int> predicted, std::span<const int> labels) {
  if (predicted.size() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "prediction/label count differ");
  }
  if (labels.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) wrong += predicted[i] != labels[i];
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

void WriteHistoryCsv(const std::filesystem::path& path,
                     const std::vector<RoundRecord>& history) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "round,elapsed_seconds,train_loss,valid_error\n";
  for (const RoundRecord& r : history) {
    out << r.round << ',' << text::FormatDouble(r.elapsed_seconds) << ','
        << text::FormatDouble(r.train_loss) << ',' << text::FormatDouble(r.valid_error)
        << '\n';
  }
}

namespace {

std::ofstream OpenForWrite(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  return out;
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  return in;
}

}  // namespace

void SaveModel(const std::filesystem::path& dir, const TrainedModel& model,
               const LabelMap& labels) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
  {
    auto out = OpenForWrite(dir / "model.meta");
    out << "lightmc-model v1\nmode " << TrainModeName(model.mode) << "\nbest_round "
        << model.best_round << '\n';
  }
  {
    auto out = OpenForWrite(dir / "codebook.txt");
    WriteCodingMatrix(out, model.matrix);
  }
  {
    auto out = OpenForWrite(dir / "decoder.txt");
    WriteDecoderParams(out, model.decoder);
  }
  {
    auto out = OpenForWrite(dir / "ensemble.txt");
    WriteEnsemble(out, model.ensemble);
  }
  {
    auto out = OpenForWrite(dir / "labels.map");
    WriteLabelMap(out, labels);
  }
  WriteHistoryCsv(dir / "history.csv", model.history);
}

LoadedModel LoadModel(const std::filesystem::path& dir) {
  TrainMode mode = TrainMode::kLightMC;
  int best_round = 0;
  {
    auto in = OpenForRead(dir / "model.meta");
    if (text::ReadLine(in, "model.meta") != "lightmc-model v1") {
      throw Error(ErrorCode::kParseError, "bad model.meta header");
    }
    for (std::string line; std::getline(in, line);) {
      const auto tokens = text::SplitWhitespace(line);
      if (tokens.size() != 2) continue;
      if (tokens[0] == "mode") mode = ParseTrainMode(tokens[1]);
      if (tokens[0] == "best_round") best_round = static_cast<int>(text::ParseInt(tokens[1]));
    }
  }
  auto codebook_in = OpenForRead(dir / "codebook.txt");
  CodingMatrix matrix = ReadCodingMatrix(codebook_in);
  auto decoder_in = OpenForRead(dir / "decoder.txt");
  DecoderParams decoder = ReadDecoderParams(decoder_in);
  auto ensemble_in = OpenForRead(dir / "ensemble.txt");
  BaseLearnerEnsemble ensemble = ReadEnsemble(ensemble_in);
  auto labels_in = OpenForRead(dir / "labels.map");
  LabelMap labels = ReadLabelMap(labels_in);

  std::vector<RoundRecord> history;
  if (std::filesystem::exists(dir / "history.csv")) {
    const CsvTable table = ReadCsv(dir / "history.csv");
    const int c_round = table.Column("round");
    const int c_elapsed = table.Column("elapsed_seconds");
    const int c_loss = table.Column("train_loss");
    const int c_error = table.Column("valid_error");
    if (c_round < 0 || c_elapsed < 0 || c_loss < 0 || c_error < 0) {
      throw Error(ErrorCode::kParseError, "history.csv is missing columns");
    }
    for (const auto& row : table.rows) {
      history.push_back({static_cast<int>(text::ParseInt(row[c_round])),
                         text::ParseDouble(row[c_elapsed]), text::ParseDouble(row[c_loss]),
                         text::ParseDouble(row[c_error])});
    }
  }

  const int k = matrix.num_classes();
  if (decoder.num_classes() != k || decoder.code_length() != matrix.code_length() ||
      ensemble.size() != matrix.code_length() || labels.size() != k) {
    throw Error(ErrorCode::kDimensionMismatch, "model bundle parts disagree on K or L");
  }
  return {TrainedModel{mode, std::move(matrix), std::move(decoder), std::move(ensemble),
                       std::move(history), best_round},
          std::move(labels)};
}

}  // namespace lightmc
