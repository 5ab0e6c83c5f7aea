#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "eegrc/error.hpp"

namespace eegrc::cli {

namespace fs = std::filesystem;

/// 2 config, 3 data/metric/structural/training, 4 leakage.
int exit_code(ErrorKind kind);

struct SynthArgs {
  int participants = 2;
  int trials = 150;
  int words = 5;
  std::uint64_t seed = 0;
  double effect_scale = 1.0;
  double noise_uv = 5.0;
  double artifact_rate = 0.05;
  double jitter = 0.1;
  fs::path out;
};

struct PreprocessArgs {
  fs::path in;
  fs::path out;
  double threshold_uv = 100.0;
  double target_hz = 500.0;
  double low_hz = 0.5;
  double high_hz = 30.0;
};

struct ErpArgs {
  fs::path in;
  fs::path out;
  fs::path roi_map;
  int n_perm = 10000;
  std::uint64_t seed = 0;
};

struct FeaturesArgs {
  fs::path in;
  fs::path out;
  fs::path roi_map;
};

struct ModelArgs {
  int hidden = 32;
  int heads = 4;
  double lr = 1e-3;
  int batch_size = 8;
  int patience = 5;
  int max_epochs = 100;
  int t_max = 0;  // 0: longest sentence in the feature table
  double holdout = 0.1;
};

struct TrainArgs {
  fs::path features;
  fs::path out;
  std::string task = "token";
  std::uint64_t seed = 0;
  ModelArgs model;
};

struct EvaluateArgs {
  fs::path features;
  fs::path out;
  std::string task = "token";
  std::string scheme = "lopo";
  std::string model_name = "uercm";
  int folds = 10;
  std::uint64_t seed = 0;
  int baseline_draws = 1000;
  bool grid = false;
  fs::path plan;  // reuse a saved split plan instead of building one
  ModelArgs model;
};

struct ReportArgs {
  std::vector<fs::path> runs;
  fs::path out;
};

void run_synth(const SynthArgs& a);
void run_preprocess(const PreprocessArgs& a);
void run_erp(const ErpArgs& a);
void run_features(const FeaturesArgs& a);
void run_train(const TrainArgs& a);
void run_evaluate(const EvaluateArgs& a);
void run_report(const ReportArgs& a);

/// `dir` itself when it holds a manifest, else its subdirectories that do,
/// sorted by name. Throws DataError when there are none.
std::vector<fs::path> find_manifest_dirs(const fs::path& dir);

/// run.lock: command, resolved configuration and library version.
void write_run_lock(const fs::path& dir, const std::string& command, const nlohmann::json& config);

}  // namespace eegrc::cli
