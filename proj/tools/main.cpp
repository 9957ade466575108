#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "ulrrm/errors.hpp"
#include "ulrrm/experiment.hpp"
#include "ulrrm/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string default_out_dir(const ulrrm::ExperimentConfig& cfg,
                            const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("ULRRM_OUT_DIR"); env && *env) return env;
  return "results";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplink MU-MIMO/OFDMA resource management simulator"};
  app.set_version_flag("--version", std::string(ulrrm::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_flag;
  std::optional<std::uint64_t> seed_flag;
  std::optional<int> jobs_flag;
  std::optional<std::string> reuse_flag;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "run the experiment in a config file");
  run->add_option("config", config_path, "JSON experiment config")->required();
  run->add_option("--seed", seed_flag, "override base_seed");
  run->add_option("--jobs", jobs_flag, "realization worker threads");
  run->add_option("--out", out_flag, "output directory");
  run->add_option("--reuse", reuse_flag, "rate reuse in the search: on|off")
      ->check(CLI::IsMember({"on", "off"}));
  run->add_flag("--quiet", quiet, "suppress progress output");

  CLI::App* validate = app.add_subcommand("validate", "check a config file");
  validate->add_option("config", config_path, "JSON experiment config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    ulrrm::ExperimentConfig cfg =
        ulrrm::ExperimentConfig::from_json_file(config_path);
    if (seed_flag) cfg.base_seed = *seed_flag;
    if (jobs_flag) cfg.jobs = *jobs_flag;
    if (reuse_flag) cfg.reuse = (*reuse_flag == "on");

    const auto errors = cfg.validate();
    if (app.got_subcommand(validate)) {
      if (errors.empty()) {
        std::cout << "ok\n";
        return kExitOk;
      }
      for (const auto& e : errors) std::cerr << "config error: " << e << '\n';
      return kExitConfig;
    }

    if (!errors.empty()) {
      for (const auto& e : errors) std::cerr << "config error: " << e << '\n';
      return kExitConfig;
    }

    const std::string out_dir = default_out_dir(cfg, out_flag);
    const ulrrm::ExperimentOutcome outcome =
        ulrrm::run_experiment(cfg, out_dir, quiet);
    if (!quiet)
      std::cout << "wrote " << outcome.out_dir << " ("
                << outcome.total_realizations - outcome.failed_realizations
                << "/" << outcome.total_realizations << " realizations)\n";
    if (outcome.failed_realizations > 0) {
      for (const auto& f : outcome.failures)
        std::cerr << "realization failed: " << f << '\n';
      return kExitRuntime;
    }
    return kExitOk;
  } catch (const ulrrm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
