#include "mag/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <tuple>

namespace mag {

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.experiment, a.seed, a.features, a.method, a.metric) <
           std::tie(b.experiment, b.seed, b.features, b.method, b.metric);
  });
}

namespace {

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string csv_to_string(std::vector<ResultRow> rows) {
  sort_rows(rows);
  std::string out =
      "experiment,seed,m,method,metric,value,wall_time_seconds,trainable_params\n";
  for (const ResultRow& r : rows) {
    char buf[64];
    out += r.experiment;
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.features);
    out += ',';
    out += r.method;
    out += ',';
    out += r.metric;
    out += ',';
    out += format_value(r.value);
    out += ',';
    std::snprintf(buf, sizeof(buf), "%.6f", r.wall_time_s);
    out += buf;
    out += ',';
    out += std::to_string(r.trainable_params);
    out += '\n';
  }
  return out;
}

void write_csv(std::vector<ResultRow> rows, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write CSV: " + path);
  out << csv_to_string(std::move(rows));
  if (!out) throw std::runtime_error("CSV write failed: " + path);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("spearman: need two equal-length series");
  const std::size_t n = x.size();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = avg;
      i = j + 1;
    }
    return rank;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  if (dx == 0.0 || dy == 0.0) return 0.0;
  return num / std::sqrt(dx * dy);
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentOutput out;
  switch (cfg.kind) {
    case ExperimentKind::kSynthApprox: out = run_synth_approx(cfg); break;
    case ExperimentKind::kVarianceStudy: out = run_variance_study(cfg); break;
    case ExperimentKind::kToyInr: out = run_toy_inr(cfg); break;
    case ExperimentKind::kDistillBench: out = run_distill_bench(cfg); break;
    case ExperimentKind::kFuseBench: out = run_fuse_bench(cfg); break;
  }

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string base = cfg.out_dir + "/" + experiment_name(cfg.kind);
  out.csv_path = base + ".csv";
  out.summary_path = base + "_summary.txt";
  write_csv(out.rows, out.csv_path);

  std::ofstream summary(out.summary_path, std::ios::trunc);
  if (!summary) throw std::runtime_error("cannot write summary: " + out.summary_path);
  summary << "experiment: " << experiment_name(cfg.kind) << "\n\n";
  for (const auto& line : out.summary) summary << line << "\n";
  summary << "\n" << config_to_text(cfg);
  return out;
}

}  // namespace mag
