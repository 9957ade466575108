#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ulrrm/channel.hpp"
#include "ulrrm/gus.hpp"
#include "ulrrm/mcs.hpp"

namespace ulrrm {

// One point of the sweep grid.
struct SweepPoint {
  Strategy strategy = Strategy::CtrF;
  PowerScheme scheme = PowerScheme::Tpm;
  int num_users = 10;
  int mb = 64;
  int mu = 4;
  double budget_mw = 1.0;
};

struct ExperimentConfig {
  std::string preset = "uma";  // scenario defaults: "uma" or "rma"
  ScenarioConfig scenario;     // preset with overrides applied

  std::vector<Strategy> strategies;
  std::vector<PowerScheme> schemes;
  std::vector<int> num_users;
  std::vector<int> mb_values;
  std::vector<int> mu_values;
  std::vector<double> budgets_mw;

  int num_realizations = 2;
  std::uint64_t base_seed = 1;
  int horizon_ts = 66;
  int window = 6;
  double beta = 1.05;
  FittedRateModel fit;
  bool pf_weights = true;
  bool reuse = true;
  bool parallel_candidates = false;
  int jobs = 1;
  std::string out_dir;  // empty means "decide at the CLI layer"
  std::optional<std::string> mcs_table_file;

  // Parses a config file. Unknown keys and type mismatches raise
  // ConfigError; parse errors carry nlohmann's line/column position.
  static ExperimentConfig from_json_file(const std::string& path);

  // Range and cross-field checks. Empty result means valid.
  std::vector<std::string> validate() const;

  // Canonical echo of the effective configuration.
  std::string canonical_json() const;

  // FNV-1a over the canonical echo, as fixed-width hex.
  std::string config_hash() const;

  std::vector<SweepPoint> sweep() const;
};

const char* strategy_name(Strategy s);
const char* scheme_name(PowerScheme s);

struct ExperimentOutcome {
  int total_realizations = 0;
  int failed_realizations = 0;
  std::vector<std::string> failures;
  std::string out_dir;
};

// Runs the sweep, realizations fanned out over OpenMP threads, and writes
// rates.csv, summary.json, histograms.csv and manifest.json into out_dir.
// Outputs contain no timestamps, so a rerun with the same config is
// byte-identical.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg,
                                 const std::string& out_dir, bool quiet);

}  // namespace ulrrm
