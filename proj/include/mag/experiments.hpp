// Experiment harness: configs, CSV result rows, trend summaries, and the five
// study runners behind the CLI subcommands.
#pragma once

#include "mag/inr.hpp"
#include "mag/train.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mag {

enum class ExperimentKind {
  kSynthApprox,
  kVarianceStudy,
  kToyInr,
  kDistillBench,
  kFuseBench,
};

const char* experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> experiment_from_name(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSynthApprox;
  std::uint64_t seed = 0;
  std::string out_dir = "results";
  std::size_t threads = 0;  // 0 = hardware concurrency

  // synth-approx
  std::size_t d = 128;
  std::size_t l = 128;
  std::size_t samples = 10000;
  std::vector<std::size_t> rf_sweep;  // per-kind default; strictly increasing
  std::size_t seeds = 10;
  std::size_t epochs = 1000;
  double learning_rate = 1e-2;
  std::string target_activation = "both";  // relu | softplus | both
  std::string ensemble = "both";           // orthogonal | iid | both
  bool snnk = true;

  // variance study
  std::size_t trials = 100000;

  // toy INR
  std::size_t image_size = 64;
  std::size_t sdf_grid = 128;
  std::size_t inr_seeds = 3;
  std::size_t inr_epochs = 200;
  std::size_t inr_batch = 1024;
  double inr_learning_rate = 1e-3;
  std::size_t image_features = 256;
  std::size_t sdf_features = 64;

  // distillation bench
  double subsample_fraction = 1.0;
  double ridge = 1e-8;

  // fuse bench
  std::size_t fuse_features = 32;
  std::size_t dr_width = 32;
};

ExperimentConfig default_config(ExperimentKind kind);
// key = value lines, '#' comments; unknown keys are an error.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);
std::string config_to_text(const ExperimentConfig& cfg);
void validate_config(const ExperimentConfig& cfg);

struct ResultRow {
  std::string experiment;
  std::uint64_t seed = 0;
  std::size_t features = 0;  // m column
  std::string method;        // MAG_ORF | MAG_IID | SNNK | BASELINE | DENSE_DR
  std::string metric;
  double value = 0.0;
  double wall_time_s = 0.0;  // informational, excluded from determinism
  std::uint64_t trainable_params = 0;
};

// Canonical order (experiment, seed, m, method, metric); applied before writing.
void sort_rows(std::vector<ResultRow>& rows);
std::string csv_to_string(std::vector<ResultRow> rows);
void write_csv(std::vector<ResultRow> rows, const std::string& path);

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  std::vector<std::string> summary;  // includes one TREND line per check
  bool trends_ok = true;
  std::string csv_path;
  std::string summary_path;
};

ExperimentOutput run_synth_approx(const ExperimentConfig& cfg);
ExperimentOutput run_variance_study(const ExperimentConfig& cfg);
ExperimentOutput run_toy_inr(const ExperimentConfig& cfg);
ExperimentOutput run_distill_bench(const ExperimentConfig& cfg);
ExperimentOutput run_fuse_bench(const ExperimentConfig& cfg);

// Dispatches on cfg.kind and writes <out>/<name>.csv plus <name>_summary.txt.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mag
