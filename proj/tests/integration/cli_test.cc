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

#include "commands.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "lightmc/data_io.h"

namespace lightmc::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunCli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Shared scratch directory with a 20-class blob corpus.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "lightmc_cli_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    const Result r = RunCli({"gen-blobs", "--pairs", "10", "--features", "20",
                             "--train-per-class", "30", "--test-per-class", "10", "--seed",
                             "3", "--out-train", Path("train.txt"), "--out-test",
                             Path("test.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string Path(const std::string& name) { return (dir_ / name).string(); }

  static std::vector<std::string> TrainArgs(const std::string& out, const std::string& mode) {
    return {"train", "--data", Path("train.txt"), "--test", Path("test.txt"), "--mode", mode,
            "--rounds", "6", "--start-round", "2", "--alpha", "0.5", "--min-samples-leaf",
            "5", "--seed", "1", "--out", Path(out)};
  }

  static inline fs::path dir_;
};

TEST_F(CliTest, TrainWritesCompleteBundle) {
  const Result r = RunCli(TrainArgs("lightmc_run", "lightmc"));
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"codebook.txt", "decoder.txt", "ensemble.txt", "history.csv",
                        "labels.map", "model.meta"}) {
    EXPECT_TRUE(fs::exists(dir_ / "lightmc_run" / f)) << f;
  }
  const std::regex report(
      R"(mode=lightmc final_test_error=[01]\.\d{4} convergence_seconds=\S+ rounds_run=6 history=\S+history\.csv\n)");
  EXPECT_TRUE(std::regex_match(r.out, report)) << r.out;
  // Auto code length for 20 classes.
  EXPECT_EQ(Slurp(dir_ / "lightmc_run" / "ensemble.txt").substr(0, 39),
            "lightmc-ensemble v1 10 boosted_trees\nsh");
  EXPECT_EQ(Slurp(dir_ / "lightmc_run" / "codebook.txt").substr(0, 26),
            "lightmc-codebook v1 20 10\n");
}

TEST_F(CliTest, OvaTrainsOneMemberPerClass) {
  const Result r = RunCli(TrainArgs("ova_run", "ova"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Slurp(dir_ / "ova_run" / "ensemble.txt").rfind("lightmc-ensemble v1 20 ", 0), 0u);
}

TEST_F(CliTest, RerunsAreByteIdenticalApartFromTimings) {
  ASSERT_EQ(RunCli(TrainArgs("rerun_a", "lightmc")).code, 0);
  ASSERT_EQ(RunCli(TrainArgs("rerun_b", "lightmc")).code, 0);
  for (const char* f : {"codebook.txt", "decoder.txt", "ensemble.txt", "labels.map",
                        "model.meta"}) {
    EXPECT_EQ(Slurp(dir_ / "rerun_a" / f), Slurp(dir_ / "rerun_b" / f)) << f;
  }
  const CsvTable a = ReadCsv(dir_ / "rerun_a" / "history.csv");
  const CsvTable b = ReadCsv(dir_ / "rerun_b" / "history.csv");
  ASSERT_EQ(a.rows.size(), b.rows.size());
  const int elapsed = a.Column("elapsed_seconds");
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    for (std::size_t c = 0; c < a.header.size(); ++c) {
      if (static_cast<int>(c) != elapsed) EXPECT_EQ(a.rows[i][c], b.rows[i][c]);
    }
  }
}

TEST_F(CliTest, EvaluatePrintsFourDecimals) {
  ASSERT_EQ(RunCli(TrainArgs("eval_run", "ecoc_fixed")).code, 0);
  const Result r = RunCli({"evaluate", Path("eval_run"), Path("test.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::regex_match(r.out, std::regex(R"([01]\.\d{4}\n)"))) << r.out;

  const Result named = RunCli({"evaluate", "--model", Path("eval_run"), "--data", Path("test.txt")});
  EXPECT_EQ(named.out, r.out);

  const Result predicted = RunCli({"predict", Path("eval_run"), Path("test.txt")});
  ASSERT_EQ(predicted.code, 0) << predicted.err;
  EXPECT_EQ(std::count(predicted.out.begin(), predicted.out.end(), '\n'), 200);
  EXPECT_EQ(predicted.out.front(), 'c');
}

TEST_F(CliTest, EvaluateMissingBundleExitsOne) {
  const Result r = RunCli({"evaluate", Path("no_such_bundle"), Path("test.txt")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("model.meta"), std::string::npos) << r.err;
}

TEST_F(CliTest, CorruptBundleExitsOne) {
  ASSERT_EQ(RunCli(TrainArgs("corrupt_run", "lightmc")).code, 0);
  std::ofstream(dir_ / "corrupt_run" / "decoder.txt") << "lightmc-decoder v1 20 10\n1 2\n";
  EXPECT_EQ(RunCli({"evaluate", Path("corrupt_run"), Path("test.txt")}).code, 1);
}

TEST_F(CliTest, PerfectModelOnSeparableData) {
  {
    std::ofstream out(dir_ / "onehot.txt");
    for (int i = 0; i < 80; ++i) out << "k" << i % 4 << ' ' << (i % 4) + 1 << ":1\n";
  }
  const Result r = RunCli({"train", "--data", Path("onehot.txt"), "--valid", Path("onehot.txt"),
                           "--rounds", "40", "--start-round", "1", "--alpha", "0.5",
                           "--min-samples-leaf", "1", "--out", Path("onehot_run")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(RunCli({"evaluate", Path("onehot_run"), Path("onehot.txt")}).out, "0.0000\n");
}

TEST_F(CliTest, ShuffledLabelsGiveChanceLevelError) {
  ASSERT_EQ(RunCli({"train", "--data", Path("train.txt"), "--rounds", "20", "--start-round",
                    "2", "--alpha", "0.5", "--min-samples-leaf", "5", "--out",
                    Path("chance_run")})
                .code,
            0);
  // Shuffle the label column of the test file across rows.
  std::ifstream in(Path("test.txt"));
  std::vector<std::string> labels;
  std::vector<std::string> rests;
  for (std::string line; std::getline(in, line);) {
    const auto space = line.find(' ');
    labels.push_back(line.substr(0, space));
    rests.push_back(line.substr(space));
  }
  std::mt19937 rng(5);
  std::shuffle(labels.begin(), labels.end(), rng);
  {
    std::ofstream out(Path("shuffled.txt"));
    for (std::size_t i = 0; i < labels.size(); ++i) out << labels[i] << rests[i] << '\n';
  }
  const Result r = RunCli({"evaluate", Path("chance_run"), Path("shuffled.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  const double error = std::stod(r.out);
  EXPECT_GT(error, 0.95 - 0.08);
  EXPECT_LE(error, 1.0);
}

TEST_F(CliTest, CompareWritesReadableCsvs) {
  const Result r = RunCli({"compare", "--data", Path("train.txt"), "--valid", Path("test.txt"),
                           "--modes", "lightmc,ecoc_fixed", "--pairs", "c0:c1,2:12",
                           "--rounds", "6", "--start-round", "2", "--alpha", "0.5",
                           "--min-samples-leaf", "5", "--out", Path("compare_run")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);

  const CsvTable curves = ReadCsv(dir_ / "compare_run" / "compare.csv");
  EXPECT_EQ(curves.header,
            (std::vector<std::string>{"mode", "round", "elapsed_seconds", "valid_error"}));
  EXPECT_EQ(curves.rows.size(), 12u);
  EXPECT_EQ(curves.rows.front()[0], "lightmc");
  EXPECT_EQ(curves.rows.back()[0], "ecoc_fixed");

  const CsvTable dist = ReadCsv(dir_ / "compare_run" / "distances.csv");
  EXPECT_EQ(dist.header, (std::vector<std::string>{"round", "class_a", "class_b", "distance"}));
  ASSERT_EQ(dist.rows.size(), 14u);  // rounds 0..6, two pairs
  EXPECT_EQ(dist.rows[0][0], "0");
  EXPECT_EQ(dist.rows[1][1], "c2");
  EXPECT_EQ(dist.rows[1][2], "c12");
  EXPECT_TRUE(fs::exists(dir_ / "compare_run" / "lightmc_history.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "compare_run" / "ecoc_fixed_history.csv"));

  // Shared initial matrix: both modes start from identical codewords.
  const CsvTable light = ReadCsv(dir_ / "compare_run" / "lightmc_history.csv");
  EXPECT_EQ(light.rows.size(), 6u);
}

TEST_F(CliTest, CompareRejectsEmptyOrUnknownModes) {
  EXPECT_EQ(RunCli({"compare", "--data", Path("train.txt"), "--modes", ""}).code, 2);
  EXPECT_EQ(RunCli({"compare", "--data", Path("train.txt")}).code, 2);
  EXPECT_EQ(RunCli({"compare", "--data", Path("train.txt"), "--modes", "ovo"}).code, 2);
}

TEST_F(CliTest, BadFlagsExitTwo) {
  EXPECT_EQ(RunCli({"train", "--data", Path("train.txt"), "--bogus"}).code, 2);
  EXPECT_EQ(RunCli({"train"}).code, 2);
  EXPECT_EQ(RunCli({"train", "--data", Path("train.txt"), "--mode", "ovo"}).code, 2);
  EXPECT_EQ(RunCli({"train", "--data", Path("train.txt"), "--code-length", "x"}).code, 2);
  EXPECT_EQ(RunCli({"train", "--data", Path("train.txt"), "--rounds", "0"}).code, 2);
  EXPECT_EQ(RunCli({"frobnicate"}).code, 2);
  EXPECT_EQ(RunCli({}).code, 2);
}

TEST_F(CliTest, MissingDataFileExitsOne) {
  const Result r = RunCli({"train", "--data", Path("absent.txt")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("absent.txt"), std::string::npos);
}

TEST_F(CliTest, ConfigFileValuesYieldToFlags) {
  {
    std::ofstream cfg(dir_ / "run.ini");
    cfg << "rounds=4\nstart-round=2\nalpha=0.5\nmin-samples-leaf=5\nearly-stop=0\n";
  }
  const Result from_file =
      RunCli({"train", "--config", Path("run.ini"), "--data", Path("train.txt")});
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_NE(from_file.out.find("rounds_run=4 "), std::string::npos) << from_file.out;

  const Result overridden = RunCli(
      {"train", "--config", Path("run.ini"), "--data", Path("train.txt"), "--rounds", "3"});
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_NE(overridden.out.find("rounds_run=3 "), std::string::npos) << overridden.out;
}

TEST_F(CliTest, ConfigFileErrorsAreUsageErrors) {
  EXPECT_EQ(RunCli({"train", "--config", Path("absent.ini"), "--data", Path("train.txt")}).code,
            2);
  std::ofstream(dir_ / "unknown.ini") << "no-such-flag=1\n";
  EXPECT_EQ(RunCli({"train", "--config", Path("unknown.ini"), "--data", Path("train.txt")}).code,
            2);
}

TEST_F(CliTest, ThreadsFromEnvironment) {
  ::setenv("LIGHTMC_THREADS", "not-a-number", 1);
  const Result bad = RunCli({"train", "--data", Path("train.txt"), "--rounds", "1"});
  ::setenv("LIGHTMC_THREADS", "1", 1);
  const Result ok = RunCli({"train", "--data", Path("train.txt"), "--rounds", "1"});
  ::unsetenv("LIGHTMC_THREADS");
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(ok.code, 0) << ok.err;
}

TEST_F(CliTest, HelpExitsZero) {
  const Result r = RunCli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("compare"), std::string::npos);
}

}  // namespace
}  // namespace lightmc::cli
