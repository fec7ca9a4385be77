#include "mag/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace mag {

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kSynthApprox: return "synth-approx";
    case ExperimentKind::kVarianceStudy: return "variance";
    case ExperimentKind::kToyInr: return "toy-inr";
    case ExperimentKind::kDistillBench: return "distill";
    case ExperimentKind::kFuseBench: return "fuse-bench";
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_from_name(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::kSynthApprox, ExperimentKind::kVarianceStudy,
        ExperimentKind::kToyInr, ExperimentKind::kDistillBench,
        ExperimentKind::kFuseBench})
    if (name == experiment_name(k)) return k;
  return std::nullopt;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ExperimentKind::kSynthApprox:
      cfg.rf_sweep = {8, 16, 32, 64, 128};
      break;
    case ExperimentKind::kVarianceStudy:
      cfg.d = 16;
      cfg.rf_sweep = {16, 32, 64, 128};
      break;
    case ExperimentKind::kToyInr:
      cfg.rf_sweep = {};
      break;
    case ExperimentKind::kDistillBench:
      cfg.rf_sweep = {32, 64, 128, 256, 512};
      break;
    case ExperimentKind::kFuseBench:
      cfg.rf_sweep = {};
      break;
  }
  return cfg;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || p != value.data() + value.size())
    throw std::invalid_argument("config: bad count for '" + key + "': " + value);
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for '" + key + "': " + value);
  }
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw std::invalid_argument("config: bad flag for '" + key + "': " + value);
}

std::vector<std::size_t> parse_sweep(const std::string& key,
                                     const std::string& value) {
  std::vector<std::size_t> sweep;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) sweep.push_back(parse_count(key, trim(item)));
  return sweep;
}

}  // namespace

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected 'key = value', got: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "seed") cfg.seed = parse_count(key, value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "threads") cfg.threads = parse_count(key, value);
    else if (key == "d") cfg.d = parse_count(key, value);
    else if (key == "l") cfg.l = parse_count(key, value);
    else if (key == "samples") cfg.samples = parse_count(key, value);
    else if (key == "rf_sweep") cfg.rf_sweep = parse_sweep(key, value);
    else if (key == "seeds") cfg.seeds = parse_count(key, value);
    else if (key == "epochs") cfg.epochs = parse_count(key, value);
    else if (key == "learning_rate") cfg.learning_rate = parse_real(key, value);
    else if (key == "target_activation") cfg.target_activation = value;
    else if (key == "ensemble") cfg.ensemble = value;
    else if (key == "snnk") cfg.snnk = parse_flag(key, value);
    else if (key == "trials") cfg.trials = parse_count(key, value);
    else if (key == "image_size") cfg.image_size = parse_count(key, value);
    else if (key == "sdf_grid") cfg.sdf_grid = parse_count(key, value);
    else if (key == "inr_seeds") cfg.inr_seeds = parse_count(key, value);
    else if (key == "inr_epochs") cfg.inr_epochs = parse_count(key, value);
    else if (key == "inr_batch") cfg.inr_batch = parse_count(key, value);
    else if (key == "inr_learning_rate") cfg.inr_learning_rate = parse_real(key, value);
    else if (key == "image_features") cfg.image_features = parse_count(key, value);
    else if (key == "sdf_features") cfg.sdf_features = parse_count(key, value);
    else if (key == "subsample_fraction") cfg.subsample_fraction = parse_real(key, value);
    else if (key == "ridge") cfg.ridge = parse_real(key, value);
    else if (key == "fuse_features") cfg.fuse_features = parse_count(key, value);
    else if (key == "dr_width") cfg.dr_width = parse_count(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

std::string config_to_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# effective configuration\n";
  out << "seed = " << cfg.seed << "\n";
  out << "out = " << cfg.out_dir << "\n";
  out << "threads = " << cfg.threads << "\n";
  out << "d = " << cfg.d << "\n";
  out << "l = " << cfg.l << "\n";
  out << "samples = " << cfg.samples << "\n";
  out << "rf_sweep = ";
  for (std::size_t i = 0; i < cfg.rf_sweep.size(); ++i)
    out << (i ? "," : "") << cfg.rf_sweep[i];
  out << "\n";
  out << "seeds = " << cfg.seeds << "\n";
  out << "epochs = " << cfg.epochs << "\n";
  out << "learning_rate = " << cfg.learning_rate << "\n";
  out << "target_activation = " << cfg.target_activation << "\n";
  out << "ensemble = " << cfg.ensemble << "\n";
  out << "snnk = " << (cfg.snnk ? "on" : "off") << "\n";
  out << "trials = " << cfg.trials << "\n";
  out << "image_size = " << cfg.image_size << "\n";
  out << "sdf_grid = " << cfg.sdf_grid << "\n";
  out << "inr_seeds = " << cfg.inr_seeds << "\n";
  out << "inr_epochs = " << cfg.inr_epochs << "\n";
  out << "inr_batch = " << cfg.inr_batch << "\n";
  out << "inr_learning_rate = " << cfg.inr_learning_rate << "\n";
  out << "image_features = " << cfg.image_features << "\n";
  out << "sdf_features = " << cfg.sdf_features << "\n";
  out << "subsample_fraction = " << cfg.subsample_fraction << "\n";
  out << "ridge = " << cfg.ridge << "\n";
  out << "fuse_features = " << cfg.fuse_features << "\n";
  out << "dr_width = " << cfg.dr_width << "\n";
  return out.str();
}

void validate_config(const ExperimentConfig& cfg) {
  auto fail = [](const std::string& why) {
    throw std::invalid_argument("config: " + why);
  };
  if (cfg.seeds == 0) fail("seeds must be >= 1");
  if (!std::is_sorted(cfg.rf_sweep.begin(), cfg.rf_sweep.end()) ||
      std::adjacent_find(cfg.rf_sweep.begin(), cfg.rf_sweep.end()) !=
          cfg.rf_sweep.end())
    fail("rf_sweep must be strictly increasing");
  for (std::size_t m : cfg.rf_sweep)
    if (m == 0) fail("rf_sweep entries must be >= 1");
  if (cfg.target_activation != "relu" && cfg.target_activation != "softplus" &&
      cfg.target_activation != "both")
    fail("target_activation must be relu, softplus, or both");
  if (cfg.ensemble != "orthogonal" && cfg.ensemble != "iid" &&
      cfg.ensemble != "both")
    fail("ensemble must be orthogonal, iid, or both");
  if (!(cfg.learning_rate > 0.0) || !(cfg.inr_learning_rate > 0.0))
    fail("learning rates must be > 0");
  if (!(cfg.subsample_fraction > 0.0) || cfg.subsample_fraction > 1.0)
    fail("subsample_fraction must be in (0, 1]");
  if (!(cfg.ridge >= 0.0)) fail("ridge must be >= 0");

  switch (cfg.kind) {
    case ExperimentKind::kSynthApprox:
      if (cfg.d == 0 || cfg.l == 0 || cfg.samples == 0)
        fail("d, l, samples must be >= 1");
      if (cfg.rf_sweep.empty()) fail("rf_sweep must be nonempty");
      break;
    case ExperimentKind::kVarianceStudy:
      if (cfg.d == 0) fail("d must be >= 1");
      if (cfg.rf_sweep.empty()) fail("rf_sweep must be nonempty");
      if (cfg.trials < 100) fail("trials must be >= 100");
      break;
    case ExperimentKind::kToyInr:
      if (cfg.image_size < 4 || cfg.sdf_grid < 4)
        fail("grids must be at least 4 wide");
      if (cfg.inr_seeds == 0) fail("inr_seeds must be >= 1");
      if (cfg.image_features == 0 || cfg.sdf_features == 0)
        fail("feature counts must be >= 1");
      break;
    case ExperimentKind::kDistillBench:
      if (cfg.rf_sweep.empty()) fail("rf_sweep must be nonempty");
      break;
    case ExperimentKind::kFuseBench:
      if (cfg.fuse_features == 0 || cfg.dr_width == 0)
        fail("fuse_features and dr_width must be >= 1");
      break;
  }
}

}  // namespace mag
