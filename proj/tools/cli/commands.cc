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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "lightmc/codebook.h"
#include "lightmc/data_io.h"
#include "lightmc/error.h"
#include "lightmc/learners.h"
#include "lightmc/synthetic.h"
#include "lightmc/text_format.h"
#include "lightmc/trainer.h"

namespace lightmc::cli {
namespace {

namespace fs = std::filesystem;

struct TrainFlags {
  std::string data;
  std::string valid;
  double valid_fraction = 0.2;
  std::string test;
  std::string mode = "lightmc";
  std::string code_length = "auto";
  std::string learner = "trees";
  int threads = 0;
  bool zero_based = false;
  std::string out;
  TrainConfig config;
};

void AddTrainFlags(CLI::App& app, TrainFlags& f, bool with_mode) {
  app.add_option("--config", "flat key=value file; flags override its values");
  app.add_option("--data", f.data, "training data (sparse text)")->required();
  app.add_option("--valid", f.valid, "validation data; default splits --data");
  app.add_option("--valid-fraction", f.valid_fraction, "held-out share when --valid is absent")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--test", f.test, "test data for the final report");
  if (with_mode) {
    app.add_option("--mode", f.mode)->check(CLI::IsMember({"lightmc", "ecoc_fixed", "ova"}));
  }
  app.add_option("--code-length", f.code_length, "auto or a positive integer");
  app.add_option("--rounds", f.config.max_rounds, "max boosting rounds T");
  app.add_option("--start-round", f.config.start_round, "first update round i_s");
  app.add_option("--alpha", f.config.learner.learning_rate, "base learner learning rate");
  app.add_option("--gamma1", f.config.gamma1, "decoder learning rate");
  app.add_option("--gamma2", f.config.gamma2, "coding-matrix learning rate");
  app.add_option("--l2", f.config.l2, "decoder L2 penalty");
  app.add_option("--decoder-batch", f.config.decoder_batch, "decoder mini-batch size");
  app.add_option("--matrix-batch", f.config.matrix_batch, "coding-matrix batch, 0 = full");
  app.add_option("--early-stop", f.config.early_stop_rounds, "patience in rounds, 0 = off");
  app.add_option("--learner", f.learner)->check(CLI::IsMember({"trees", "linear"}));
  app.add_option("--max-leaves", f.config.learner.max_leaves);
  app.add_option("--min-samples-leaf", f.config.learner.min_samples_leaf);
  app.add_option("--threads", f.threads, "worker threads (default: all cores)")
      ->envname("LIGHTMC_THREADS");
  app.add_option("--seed", f.config.seed);
  app.add_flag("--zero-based", f.zero_based, "feature indices start at 0");
}

// Resolves string-valued flags into the config. Throws ConfigInvalid.
void FinishConfig(TrainFlags& f) {
  f.config.mode = ParseTrainMode(f.mode);
  f.config.learner.kind = ParseLearnerKind(f.learner);
  if (f.code_length == "auto") {
    f.config.code_length = 0;
  } else {
    long long length = 0;
    try {
      length = text::ParseInt(f.code_length);
    } catch (const Error&) {
      length = 0;
    }
    if (length < 1) {
      throw Error(ErrorCode::kConfigInvalid,
                  "--code-length must be 'auto' or a positive integer");
    }
    f.config.code_length = static_cast<int>(length);
  }
  SetNumThreads(f.threads);
}

struct Datasets {
  SparseDataset train;
  SparseDataset valid;
  std::optional<SparseDataset> test;
};

Datasets LoadDatasets(const TrainFlags& f) {
  LoadOptions options;
  options.zero_based = f.zero_based;
  SparseDataset full = LoadSparseText(f.data, options);

  Datasets d;
  if (f.valid.empty()) {
    auto [train, valid] = StratifiedSplit(full, f.valid_fraction, f.config.seed);
    d.train = std::move(train);
    d.valid = std::move(valid);
  } else {
    d.train = std::move(full);
  }
  LoadOptions follow = options;
  follow.label_map = d.train.label_map();
  follow.num_features = d.train.num_features();
  if (!f.valid.empty()) d.valid = LoadSparseText(f.valid, follow);
  if (!f.test.empty()) d.test = LoadSparseText(f.test, follow);
  return d;
}

struct RunSummary {
  double final_test_error = 0.0;
  double convergence_seconds = 0.0;
  int rounds_run = 0;
};

RunSummary Summarize(const TrainedModel& model, const Datasets& d) {
  RunSummary s;
  s.rounds_run = model.history.empty() ? 0 : model.history.back().round;
  if (model.best_round > 0) {
    const RoundRecord& best = model.history[model.best_round - 1];
    s.convergence_seconds = best.elapsed_seconds;
    s.final_test_error = best.valid_error;
  }
  if (d.test) s.final_test_error = ClassificationError(Predict(model, *d.test), d.test->labels());
  return s;
}

void PrintReport(std::ostream& out, TrainMode mode, const RunSummary& s,
                 const std::string& history_path) {
  char error[32];
  std::snprintf(error, sizeof(error), "%.4f", s.final_test_error);
  out << "mode=" << TrainModeName(mode) << " final_test_error=" << error
      << " convergence_seconds=" << text::FormatDouble(s.convergence_seconds)
      << " rounds_run=" << s.rounds_run << " history=" << history_path << '\n';
}

int CmdTrain(TrainFlags& f, std::ostream& out) {
  FinishConfig(f);
  const Datasets d = LoadDatasets(f);
  const TrainedModel model = Fit(d.train, d.valid, f.config);
  std::string history = "-";
  if (!f.out.empty()) {
    SaveModel(f.out, model, d.train.label_map());
    history = (fs::path(f.out) / "history.csv").string();
  }
  PrintReport(out, model.mode, Summarize(model, d), history);
  return kExitOk;
}

SparseDataset LoadForModel(const std::string& path, const LoadedModel& loaded,
                           bool zero_based) {
  LoadOptions options;
  options.zero_based = zero_based;
  options.label_map = loaded.labels;
  options.num_features = loaded.model.ensemble.num_features();
  return LoadSparseText(path, options);
}

int CmdPredict(const std::string& model_dir, const std::string& data_path,
               const std::string& out_path, bool zero_based, std::ostream& out) {
  const LoadedModel loaded = LoadModel(model_dir);
  const SparseDataset data = LoadForModel(data_path, loaded, zero_based);
  const std::vector<int> predicted = Predict(loaded.model, data);
  std::ofstream file;
  std::ostream* sink = &out;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw Error(ErrorCode::kIoError, "cannot write " + out_path);
    sink = &file;
  }
  for (int k : predicted) *sink << loaded.labels.Name(k) << '\n';
  return kExitOk;
}

int CmdEvaluate(const std::string& model_dir, const std::string& data_path,
                bool zero_based, std::ostream& out) {
  const LoadedModel loaded = LoadModel(model_dir);
  const SparseDataset data = LoadForModel(data_path, loaded, zero_based);
  const double error = ClassificationError(Predict(loaded.model, data), data.labels());
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", error);
  out << buf << '\n';
  return kExitOk;
}

int ResolveClass(const std::string& token, const LabelMap& labels) {
  const int named = labels.Find(token);
  if (named >= 0) return named;
  long long id = -1;
  try {
    id = text::ParseInt(token);
  } catch (const Error&) {
  }
  if (id < 0 || id >= labels.size()) {
    throw Error(ErrorCode::kConfigInvalid, "unknown class '" + token + "'");
  }
  return static_cast<int>(id);
}

int CmdCompare(TrainFlags& f, const std::vector<std::string>& modes,
               const std::vector<std::string>& pair_specs, std::ostream& out,
               std::ostream& err) {
  if (modes.empty()) {
    err << "compare: --modes needs at least one mode\n";
    return kExitUsage;
  }
  for (const std::string& m : modes) ParseTrainMode(m);
  FinishConfig(f);
  const Datasets d = LoadDatasets(f);
  const LabelMap& labels = d.train.label_map();

  std::vector<std::pair<int, int>> pairs;
  for (const std::string& spec : pair_specs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kConfigInvalid, "pair '" + spec + "' is not a:b");
    }
    pairs.emplace_back(ResolveClass(spec.substr(0, colon), labels),
                       ResolveClass(spec.substr(colon + 1), labels));
  }

  const int num_classes = d.train.num_classes();
  const CodingMatrix shared =
      InitRandomCodingMatrix(num_classes, ResolveCodeLength(f.config, num_classes),
                             f.config.seed);
  // The distance trace follows the first mode whose matrix can move.
  const auto traced = std::find(modes.begin(), modes.end(), "lightmc");
  const std::string traced_mode = traced != modes.end() ? *traced : modes.front();

  const fs::path out_dir = f.out.empty() ? fs::path(".") : fs::path(f.out);
  fs::create_directories(out_dir);
  std::ofstream curves(out_dir / "compare.csv");
  std::ofstream distances(out_dir / "distances.csv");
  if (!curves || !distances) {
    throw Error(ErrorCode::kIoError, "cannot write into " + out_dir.string());
  }
  curves << "mode,round,elapsed_seconds,valid_error\n";
  distances << "round,class_a,class_b,distance\n";

  for (const std::string& name : modes) {
    TrainConfig config = f.config;
    config.mode = ParseTrainMode(name);
    FitOptions options;
    if (config.mode != TrainMode::kOva) options.initial_matrix = shared;
    const bool trace = name == traced_mode && config.mode != TrainMode::kOva;
    if (trace) {
      for (const auto& [a, b] : pairs) {
        distances << 0 << ',' << labels.Name(a) << ',' << labels.Name(b) << ','
                  << text::FormatDouble(CodewordDistance(shared, a, b)) << '\n';
      }
      options.on_round = [&](const RoundEvent& event) {
        for (const auto& [a, b] : pairs) {
          distances << event.record.round << ',' << labels.Name(a) << ','
                    << labels.Name(b) << ','
                    << text::FormatDouble(CodewordDistance(event.matrix, a, b)) << '\n';
        }
      };
    }
    const TrainedModel model = Fit(d.train, d.valid, config, options);
    for (const RoundRecord& r : model.history) {
      curves << name << ',' << r.round << ',' << text::FormatDouble(r.elapsed_seconds) << ','
             << text::FormatDouble(r.valid_error) << '\n';
    }
    const fs::path history = out_dir / (name + "_history.csv");
    WriteHistoryCsv(history, model.history);
    PrintReport(out, model.mode, Summarize(model, d), history.string());
  }
  return kExitOk;
}

int CmdGenBlobs(const BlobOptions& options, const std::string& train_path,
                const std::string& test_path, std::ostream& out) {
  const BlobData blobs = GeneratePairedBlobs(options);
  std::ofstream train(train_path);
  std::ofstream test(test_path);
  if (!train || !test) throw Error(ErrorCode::kIoError, "cannot write blob files");
  WriteSparseText(train, blobs.train);
  WriteSparseText(test, blobs.test);
  out << "wrote " << blobs.train.num_rows() << " train and " << blobs.test.num_rows()
      << " test rows, " << blobs.train.num_classes() << " classes\n";
  return kExitOk;
}

bool MentionsFlag(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// CLI11 only reads config files attached to the root app, so a subcommand's
// --config file is expanded into flags placed before the user's own flags.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty() || rest.empty()) return args;

  std::vector<std::string> injected;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
    const std::string flag = "--" + item.name;
    if (item.name.empty() || MentionsFlag(rest, flag)) continue;
    std::string value;
    for (const std::string& v : item.inputs) value += (value.empty() ? "" : ",") + v;
    injected.push_back(flag + "=" + value);
  }
  rest.insert(rest.begin() + 1, injected.begin(), injected.end());
  return rest;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LightMC multiclass decomposition toolkit", "lightmc"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "train one model and write a bundle");
  AddTrainFlags(*train, train_flags, true);
  train->add_option("--out", train_flags.out, "model bundle directory");

  std::string model_dir;
  std::string data_path;
  std::string predictions_path;
  bool eval_zero_based = false;
  CLI::App* predict = app.add_subcommand("predict", "print predicted labels");
  predict->add_option("model,--model", model_dir, "model bundle directory")->required();
  predict->add_option("data,--data", data_path, "data to classify")->required();
  predict->add_option("--out", predictions_path, "write labels here instead of stdout");
  predict->add_flag("--zero-based", eval_zero_based);

  CLI::App* evaluate = app.add_subcommand("evaluate", "print the classification error");
  evaluate->add_option("model,--model", model_dir, "model bundle directory")->required();
  evaluate->add_option("data,--data", data_path, "labelled data")->required();
  evaluate->add_flag("--zero-based", eval_zero_based);

  TrainFlags compare_flags;
  std::vector<std::string> modes;
  std::vector<std::string> pairs;
  CLI::App* compare = app.add_subcommand("compare", "run several modes on shared settings");
  AddTrainFlags(*compare, compare_flags, false);
  compare->add_option("--modes", modes, "comma-separated modes")
      ->delimiter(',')
      ->required();
  compare->add_option("--pairs", pairs, "class pairs a:b for the distance trace")
      ->delimiter(',');
  compare->add_option("--out", compare_flags.out, "output directory");

  BlobOptions blob_options;
  std::string blob_train = "blobs_train.txt";
  std::string blob_test = "blobs_test.txt";
  CLI::App* gen = app.add_subcommand("gen-blobs", "write paired Gaussian blob data");
  gen->add_option("--pairs", blob_options.num_pairs);
  gen->add_option("--features", blob_options.num_features);
  gen->add_option("--train-per-class", blob_options.train_per_class);
  gen->add_option("--test-per-class", blob_options.test_per_class);
  gen->add_option("--offset", blob_options.pair_offset, "distance of a class from its pair center");
  gen->add_option("--seed", blob_options.seed);
  gen->add_option("--out-train", blob_train);
  gen->add_option("--out-test", blob_test);

  try {
    const std::vector<std::string> expanded = ExpandConfig(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "lightmc: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (train->parsed()) return CmdTrain(train_flags, out);
    if (predict->parsed()) {
      return CmdPredict(model_dir, data_path, predictions_path, eval_zero_based, out);
    }
    if (evaluate->parsed()) return CmdEvaluate(model_dir, data_path, eval_zero_based, out);
    if (compare->parsed()) return CmdCompare(compare_flags, modes, pairs, out, err);
    if (gen->parsed()) return CmdGenBlobs(blob_options, blob_train, blob_test, out);
  } catch (const Error& e) {
    err << "lightmc: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfigInvalid ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "lightmc: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace lightmc::cli
