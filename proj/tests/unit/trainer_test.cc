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

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "dense_data.h"
#include "lightmc/error.h"
#include "lightmc/synthetic.h"

namespace lightmc {
namespace {

using testing::FromDense;

BlobData Blobs(std::uint64_t seed, int pairs = 3, int per_class = 60) {
  BlobOptions opts;
  opts.num_pairs = pairs;
  opts.num_features = 10;
  opts.train_per_class = per_class;
  opts.test_per_class = per_class / 2;
  opts.seed = seed;
  return GeneratePairedBlobs(opts);
}

TrainConfig SmallConfig() {
  TrainConfig c;
  c.max_rounds = 25;
  c.start_round = 5;
  c.learner.learning_rate = 0.25;  // cadence period 4
  c.learner.max_leaves = 8;
  c.learner.min_samples_leaf = 5;
  c.early_stop_rounds = 0;
  c.decoder_batch = 32;
  return c;
}

TEST(Cadence, BoostingFiresEveryRoundedInversePeriod) {
  TrainConfig c;
  c.max_rounds = 100;
  c.start_round = 30;
  c.learner.learning_rate = 0.1;
  EXPECT_EQ(UpdateRounds(c), (std::vector<int>{30, 40, 50, 60, 70, 80, 90, 100}));
  c.learner.learning_rate = 0.05;
  EXPECT_EQ(UpdateRounds(c), (std::vector<int>{30, 50, 70, 90}));
  c.learner.learning_rate = 0.5;
  c.max_rounds = 36;
  EXPECT_EQ(UpdateRounds(c), (std::vector<int>{30, 32, 34, 36}));
  // 1 / 0.3 rounds to 3.
  c.learner.learning_rate = 0.3;
  c.max_rounds = 40;
  EXPECT_EQ(UpdateRounds(c), (std::vector<int>{30, 33, 36, 39}));
  c.start_round = 50;
  EXPECT_TRUE(UpdateRounds(c).empty());
}

TEST(Cadence, NonBoostingFiresEveryRound) {
  TrainConfig c;
  c.learner.kind = LearnerKind::kLinearSgd;
  c.max_rounds = 7;
  EXPECT_EQ(UpdateRounds(c), (std::vector<int>{1, 2, 3, 4, 5, 6, 7}));
  EXPECT_FALSE(IsUpdateRound(0, c));
}

TEST(Cadence, FitUpdatesExactlyOnCadenceRounds) {
  const BlobData blobs = Blobs(1);
  const TrainConfig c = SmallConfig();
  std::vector<int> fired;
  std::vector<int> matrix_changed;
  std::optional<CodingMatrix> previous;
  FitOptions opts;
  opts.on_round = [&](const RoundEvent& e) {
    if (e.updated) fired.push_back(e.record.round);
    if (previous && !(*previous == e.matrix)) matrix_changed.push_back(e.record.round);
    previous = e.matrix;
  };
  Fit(blobs.train, blobs.test, c, opts);
  EXPECT_EQ(fired, UpdateRounds(c));
  EXPECT_EQ(fired, (std::vector<int>{5, 9, 13, 17, 21, 25}));
  EXPECT_EQ(matrix_changed, fired);
}

TEST(ResolveCodeLength, AutoAndExplicit) {
  TrainConfig c;
  EXPECT_EQ(ResolveCodeLength(c, 20), 10);
  EXPECT_EQ(ResolveCodeLength(c, 1000), 51);
  // Suggested 2 is infeasible for K = 4; auto raises it.
  EXPECT_EQ(ResolveCodeLength(c, 4), 4);
  c.code_length = 7;
  EXPECT_EQ(ResolveCodeLength(c, 20), 7);
}

TEST(Fit, EcocFixedKeepsMatrixAndDecoder) {
  const BlobData blobs = Blobs(2);
  TrainConfig c = SmallConfig();
  c.mode = TrainMode::kEcocFixed;
  const CodingMatrix initial = InitRandomCodingMatrix(6, 5, 3);
  FitOptions opts;
  opts.initial_matrix = initial;
  int rounds = 0;
  opts.on_round = [&](const RoundEvent& e) {
    ++rounds;
    EXPECT_FALSE(e.updated);
    EXPECT_EQ(e.matrix, initial);
    EXPECT_EQ(e.decoder, InitDecoderFromMatrix(initial));
  };
  const TrainedModel m = Fit(blobs.train, blobs.test, c, opts);
  EXPECT_EQ(rounds, c.max_rounds);
  EXPECT_EQ(m.matrix, initial);
  EXPECT_EQ(m.decoder, InitDecoderFromMatrix(initial));
}

TEST(Fit, DisabledUpdatesInLightMCModeMatchEcocFixed) {
  const BlobData blobs = Blobs(3);
  TrainConfig c = SmallConfig();
  c.decoder_update = false;
  c.matrix_update = false;
  const TrainedModel a = Fit(blobs.train, blobs.test, c);
  c.mode = TrainMode::kEcocFixed;
  const TrainedModel b = Fit(blobs.train, blobs.test, c);
  EXPECT_EQ(a.ensemble, b.ensemble);
  EXPECT_EQ(a.matrix, b.matrix);
  EXPECT_EQ(a.decoder, b.decoder);
}

TEST(Fit, MissingClassIsReported) {
  const SparseDataset train = FromDense({{1.0}, {2.0}, {3.0}}, {0, 1, 1}, 3);
  try {
    Fit(train, train, SmallConfig());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingClass);
  }
}

TEST(Fit, InvalidConfigIsReported) {
  const BlobData blobs = Blobs(4);
  std::vector<TrainConfig> bad(7, SmallConfig());
  bad[0].start_round = 0;
  bad[1].max_rounds = 0;
  bad[2].gamma1 = 0.0;
  bad[3].gamma2 = -1.0;
  bad[4].early_stop_rounds = -1;
  bad[5].learner.learning_rate = 2.0;
  bad[6].code_length = -3;
  for (const TrainConfig& c : bad) {
    try {
      Fit(blobs.train, blobs.test, c);
      ADD_FAILURE() << "config accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfigInvalid);
    }
  }
  // gamma2 is irrelevant when the matrix update is off.
  TrainConfig ok = SmallConfig();
  ok.gamma2 = 0.0;
  ok.matrix_update = false;
  ok.max_rounds = 2;
  EXPECT_NO_THROW(Fit(blobs.train, blobs.test, ok));
}

TEST(Fit, InfeasibleExplicitCodeLength) {
  const BlobData blobs = Blobs(4);
  TrainConfig c = SmallConfig();
  c.code_length = 2;
  try {
    Fit(blobs.train, blobs.test, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasibleCode);
  }
}

void ExpectSameModel(const TrainedModel& a, const TrainedModel& b) {
  EXPECT_EQ(a.matrix, b.matrix);
  EXPECT_EQ(a.decoder, b.decoder);
  EXPECT_EQ(a.ensemble, b.ensemble);
  EXPECT_EQ(a.best_round, b.best_round);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].round, b.history[i].round);
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.history[i].valid_error, b.history[i].valid_error);
  }
}

TEST(Fit, Reproducible) {
  const BlobData blobs = Blobs(5);
  for (LearnerKind kind : {LearnerKind::kBoostedTrees, LearnerKind::kLinearSgd}) {
    TrainConfig c = SmallConfig();
    c.learner.kind = kind;
    c.learner.learning_rate = kind == LearnerKind::kLinearSgd ? 0.05 : 0.25;
    c.matrix_batch = 50;
    ExpectSameModel(Fit(blobs.train, blobs.test, c), Fit(blobs.train, blobs.test, c));
  }
}

TEST(Fit, HistoryIsStrictlyIncreasing) {
  const BlobData blobs = Blobs(6);
  const TrainedModel m = Fit(blobs.train, blobs.test, SmallConfig());
  ASSERT_EQ(m.history.size(), 25u);
  for (std::size_t i = 0; i < m.history.size(); ++i) {
    EXPECT_EQ(m.history[i].round, static_cast<int>(i) + 1);
    if (i > 0) EXPECT_GT(m.history[i].elapsed_seconds, m.history[i - 1].elapsed_seconds);
    EXPECT_GE(m.history[i].valid_error, 0.0);
    EXPECT_LE(m.history[i].valid_error, 1.0);
  }
}

TEST(Fit, ReturnsBestSnapshot) {
  const BlobData blobs = Blobs(7, 4, 40);
  for (LearnerKind kind : {LearnerKind::kBoostedTrees, LearnerKind::kLinearSgd}) {
    TrainConfig c = SmallConfig();
    c.learner.kind = kind;
    c.learner.learning_rate = kind == LearnerKind::kLinearSgd ? 0.05 : 0.25;
    c.max_rounds = 60;
    c.early_stop_rounds = 5;
    const TrainedModel m = Fit(blobs.train, blobs.test, c);

    double best = 2.0;
    int best_round = 0;
    for (const RoundRecord& r : m.history) {
      if (r.valid_error < best) {
        best = r.valid_error;
        best_round = r.round;
      }
    }
    EXPECT_EQ(m.best_round, best_round);
    // Stops once 5 evaluations pass without improvement.
    EXPECT_LE(static_cast<int>(m.history.size()), std::min(60, best_round + 5));
    const double tol = 1.0 / static_cast<double>(blobs.test.num_rows()) + 1e-12;
    EXPECT_NEAR(ClassificationError(Predict(m, blobs.test), blobs.test.labels()), best, tol);

    // Recorded train loss is the mean loss under the snapshot's decoder.
    const double loss = MeanDecoderLoss(m.decoder, m.ensemble.PredictAll(blobs.train),
                                        blobs.train.labels());
    EXPECT_NEAR(loss, m.history[best_round - 1].train_loss, 1e-9);
  }
}

TEST(Predict, IdealizedOutputsAreAlwaysCorrect) {
  const CodingMatrix matrix = InitRandomCodingMatrix(9, 6, 8);
  TrainedModel model{TrainMode::kLightMC, matrix, InitDecoderFromMatrix(matrix),
                     BaseLearnerEnsemble(LearnerKind::kBoostedTrees, 6, 1, 0.1), {}, 0};
  Matrix outputs(90, 6);
  std::vector<int> labels;
  for (int i = 0; i < 90; ++i) {
    labels.push_back(i % 9);
    for (int j = 0; j < 6; ++j) outputs(i, j) = matrix(i % 9, j);
  }
  EXPECT_EQ(PredictFromOutputs(model, outputs), labels);
  EXPECT_THROW(PredictFromOutputs(model, Matrix(2, 5)), Error);
}

TEST(Predict, SingleRowMatchesBatch) {
  const BlobData blobs = Blobs(9);
  const TrainedModel m = Fit(blobs.train, blobs.test, SmallConfig());
  const std::vector<int> batch = Predict(m, blobs.test);
  for (std::size_t i = 0; i < blobs.test.num_rows(); i += 7) {
    const std::vector<std::size_t> one{i};
    EXPECT_EQ(Predict(m, blobs.test.Subset(one)).front(), batch[i]);
  }
}

TEST(Predict, HeldOutAccuracyWellAboveChance) {
  const BlobData blobs = Blobs(10, 3, 100);
  TrainConfig c = SmallConfig();
  c.max_rounds = 60;
  const TrainedModel m = Fit(blobs.train, blobs.test, c);
  EXPECT_LT(ClassificationError(Predict(m, blobs.test), blobs.test.labels()), 0.5);
}

TEST(FitOva, OneMemberPerClassAndArgmax) {
  const BlobData blobs = Blobs(11);
  TrainConfig c = SmallConfig();
  c.mode = TrainMode::kOva;
  const TrainedModel m = Fit(blobs.train, blobs.test, c);
  EXPECT_EQ(m.mode, TrainMode::kOva);
  EXPECT_EQ(m.ensemble.size(), 6);
  EXPECT_EQ(m.matrix, OneVersusAllMatrix(6));

  // Softmax decoding with the one-versus-all matrix ranks classes like argmax.
  const Matrix outputs = m.ensemble.PredictAll(blobs.test);
  const std::vector<int> argmax = PredictFromOutputs(m, outputs);
  const DecoderParams ova = InitDecoderFromMatrix(OneVersusAllMatrix(6));
  int agree = 0;
  for (std::size_t i = 0; i < outputs.rows(); ++i) {
    agree += Decode(ova, outputs.row(i)).predicted == argmax[i];
    const auto row = outputs.row(i);
    EXPECT_EQ(argmax[i], std::max_element(row.begin(), row.end()) - row.begin());
  }
  EXPECT_EQ(agree, static_cast<int>(outputs.rows()));
}

TEST(Fit, ThreeClassLightMCLossNotAboveFixed) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> x;
  std::vector<int> labels;
  for (int i = 0; i < 1500; ++i) {
    const int k = i % 3;
    std::vector<double> row(10);
    for (int f = 0; f < 10; ++f) row[f] = g(rng) * 1.5 + (f % 3 == k ? 1.0 : 0.0);
    x.push_back(row);
    labels.push_back(k);
  }
  const SparseDataset data = FromDense(x, labels, 3);
  TrainConfig c = SmallConfig();
  c.max_rounds = 40;
  c.decoder_batch = 256;
  FitOptions opts;
  opts.initial_matrix = InitRandomCodingMatrix(3, ResolveCodeLength(c, 3), 12);
  const TrainedModel light = Fit(data, data, c, opts);
  c.mode = TrainMode::kEcocFixed;
  const TrainedModel fixed = Fit(data, data, c, opts);
  ASSERT_EQ(light.history.size(), fixed.history.size());
  EXPECT_LE(light.history.back().train_loss, fixed.history.back().train_loss);
}

TEST(Fit, MiniBatchMatrixUpdateStillTrains) {
  const BlobData blobs = Blobs(13);
  TrainConfig c = SmallConfig();
  c.matrix_batch = 17;
  const TrainedModel m = Fit(blobs.train, blobs.test, c);
  EXPECT_FALSE(m.matrix.IsBinary());
}

TEST(ModelBundle, SaveLoadRoundTrip) {
  const BlobData blobs = Blobs(14);
  const auto dir = std::filesystem::temp_directory_path() / "lightmc_trainer_bundle";
  std::filesystem::remove_all(dir);
  for (TrainMode mode : {TrainMode::kLightMC, TrainMode::kOva}) {
    TrainConfig c = SmallConfig();
    c.mode = mode;
    const TrainedModel m = Fit(blobs.train, blobs.test, c);
    SaveModel(dir, m, blobs.train.label_map());
    for (const char* f : {"model.meta", "codebook.txt", "decoder.txt", "ensemble.txt",
                          "labels.map", "history.csv"}) {
      EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    }
    const LoadedModel back = LoadModel(dir);
    EXPECT_EQ(back.labels, blobs.train.label_map());
    EXPECT_EQ(back.model.mode, mode);
    EXPECT_EQ(back.model.best_round, m.best_round);
    EXPECT_EQ(Predict(back.model, blobs.test), Predict(m, blobs.test));
    ASSERT_EQ(back.model.history.size(), m.history.size());
    EXPECT_EQ(back.model.history.back().elapsed_seconds, m.history.back().elapsed_seconds);
  }
  std::filesystem::remove(dir / "decoder.txt");
  try {
    LoadModel(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
  std::filesystem::remove_all(dir);
}

TEST(TrainMode, Names) {
  for (TrainMode m : {TrainMode::kLightMC, TrainMode::kEcocFixed, TrainMode::kOva}) {
    EXPECT_EQ(ParseTrainMode(TrainModeName(m)), m);
  }
  EXPECT_THROW(ParseTrainMode("ovo"), Error);
}

TEST(ClassificationError, Counts) {
  const std::vector<int> p{0, 1, 2, 2};
  const std::vector<int> y{0, 2, 2, 1};
  EXPECT_DOUBLE_EQ(ClassificationError(p, y), 0.5);
  EXPECT_THROW(ClassificationError(p, std::vector<int>{0}), Error);
}

}  // namespace
}  // namespace lightmc
