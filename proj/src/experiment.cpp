#include "ulrrm/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ulrrm/errors.hpp"
#include "ulrrm/sim.hpp"
#include "ulrrm/version.hpp"

namespace ulrrm {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

std::string fmt9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      bad("unknown key '" + it.key() + "' in " + where);
  }
}

double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) bad("'" + key + "' must be a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) bad("'" + key + "' must be an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) bad("'" + key + "' must be a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& key) {
  if (!j.is_string()) bad("'" + key + "' must be a string");
  return j.get<std::string>();
}

Strategy parse_strategy(const std::string& s) {
  if (s == "ctr_one") return Strategy::CtrOne;
  if (s == "bd") return Strategy::Bd;
  if (s == "ctr_f") return Strategy::CtrF;
  bad("unknown strategy '" + s + "' (expected ctr_one, bd or ctr_f)");
}

PowerScheme parse_scheme(const std::string& s) {
  if (s == "tpm") return PowerScheme::Tpm;
  if (s == "epm") return PowerScheme::Epm;
  bad("unknown power scheme '" + s + "' (expected tpm or epm)");
}

void apply_pathloss(const json& j, const char* key, PathLossModel& m) {
  check_keys(j, {"ref_db", "exponent"}, key);
  if (j.contains("ref_db")) m.ref_db = as_number(j["ref_db"], "ref_db");
  if (j.contains("exponent")) m.exponent = as_number(j["exponent"], "exponent");
}

void apply_scenario(const json& j, ScenarioConfig& sc) {
  check_keys(j,
             {"cell_radius_m", "min_dist_m", "carrier_freq_hz", "pathloss_los",
              "pathloss_nlos", "shadowing_std_db", "los_d0_m", "los_decay_m",
              "k_factor_db", "taps", "corr_coeff", "num_subchannels",
              "subchannel_bw_hz", "block_subchannels", "block_ts",
              "noise_density_dbm_hz", "noise_figure_db"},
             "scenario");
  auto num = [&](const char* k, double& field) {
    if (j.contains(k)) field = as_number(j[k], k);
  };
  auto integer = [&](const char* k, int& field) {
    if (j.contains(k)) field = as_int(j[k], k);
  };
  num("cell_radius_m", sc.cell_radius_m);
  num("min_dist_m", sc.min_dist_m);
  num("carrier_freq_hz", sc.carrier_freq_hz);
  if (j.contains("pathloss_los")) apply_pathloss(j["pathloss_los"], "pathloss_los", sc.pathloss_los);
  if (j.contains("pathloss_nlos")) apply_pathloss(j["pathloss_nlos"], "pathloss_nlos", sc.pathloss_nlos);
  num("shadowing_std_db", sc.shadowing_std_db);
  num("los_d0_m", sc.los_d0_m);
  num("los_decay_m", sc.los_decay_m);
  num("k_factor_db", sc.k_factor_db);
  num("corr_coeff", sc.corr_coeff);
  integer("num_subchannels", sc.num_subchannels);
  num("subchannel_bw_hz", sc.subchannel_bw_hz);
  integer("block_subchannels", sc.block_subchannels);
  integer("block_ts", sc.block_ts);
  num("noise_density_dbm_hz", sc.noise_density_dbm_hz);
  num("noise_figure_db", sc.noise_figure_db);
  if (j.contains("taps")) {
    if (!j["taps"].is_array() || j["taps"].empty())
      bad("'taps' must be a non-empty array of [delay_s, power_db] pairs");
    sc.taps.clear();
    for (const auto& t : j["taps"]) {
      if (!t.is_array() || t.size() != 2)
        bad("each tap must be a [delay_s, power_db] pair");
      sc.taps.push_back(
          {as_number(t[0], "tap delay"), as_number(t[1], "tap power")});
    }
  }
}

template <typename T, typename Fn>
std::vector<T> parse_list(const json& j, const std::string& key, Fn item) {
  if (!j.is_array() || j.empty())
    bad("'" + key + "' must be a non-empty array");
  std::vector<T> out;
  for (const auto& e : j) out.push_back(item(e));
  return out;
}

std::pair<int, int> line_col_of(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::CtrOne: return "ctr_one";
    case Strategy::Bd: return "bd";
    case Strategy::CtrF: return "ctr_f";
  }
  return "?";
}

const char* scheme_name(PowerScheme s) {
  return s == PowerScheme::Tpm ? "tpm" : "epm";
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = line_col_of(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(path + ":" + std::to_string(line) + ":" +
                      std::to_string(col) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ": top level must be an object");

  check_keys(j,
             {"preset", "scenario", "strategies", "power_schemes", "num_users",
              "num_bs_antennas", "num_user_antennas", "power_budget_mw",
              "num_realizations", "base_seed", "horizon_ts", "window", "beta",
              "fit_a", "fit_d", "pf_weights", "reuse", "parallel_candidates",
              "jobs", "out_dir", "mcs_table_file"},
             "config");

  ExperimentConfig cfg;
  if (j.contains("preset")) cfg.preset = as_string(j["preset"], "preset");
  if (cfg.preset == "uma")
    cfg.scenario = ScenarioConfig::uma();
  else if (cfg.preset == "rma")
    cfg.scenario = ScenarioConfig::rma();
  else
    bad("unknown preset '" + cfg.preset + "' (expected uma or rma)");
  if (j.contains("scenario")) {
    if (!j["scenario"].is_object()) bad("'scenario' must be an object");
    apply_scenario(j["scenario"], cfg.scenario);
  }

  cfg.strategies = {Strategy::CtrF};
  if (j.contains("strategies"))
    cfg.strategies = parse_list<Strategy>(j["strategies"], "strategies",
        [](const json& e) { return parse_strategy(e.get<std::string>()); });
  cfg.schemes = {PowerScheme::Tpm};
  if (j.contains("power_schemes"))
    cfg.schemes = parse_list<PowerScheme>(j["power_schemes"], "power_schemes",
        [](const json& e) { return parse_scheme(e.get<std::string>()); });
  cfg.num_users = {10};
  if (j.contains("num_users"))
    cfg.num_users = parse_list<int>(j["num_users"], "num_users",
        [](const json& e) { return as_int(e, "num_users entry"); });
  cfg.mb_values = {cfg.scenario.num_bs_antennas};
  if (j.contains("num_bs_antennas"))
    cfg.mb_values = parse_list<int>(j["num_bs_antennas"], "num_bs_antennas",
        [](const json& e) { return as_int(e, "num_bs_antennas entry"); });
  cfg.mu_values = {cfg.scenario.num_user_antennas};
  if (j.contains("num_user_antennas"))
    cfg.mu_values = parse_list<int>(j["num_user_antennas"], "num_user_antennas",
        [](const json& e) { return as_int(e, "num_user_antennas entry"); });
  cfg.budgets_mw = {1.0};
  if (j.contains("power_budget_mw"))
    cfg.budgets_mw = parse_list<double>(j["power_budget_mw"], "power_budget_mw",
        [](const json& e) { return as_number(e, "power_budget_mw entry"); });

  if (j.contains("num_realizations"))
    cfg.num_realizations = as_int(j["num_realizations"], "num_realizations");
  if (j.contains("base_seed")) {
    if (!j["base_seed"].is_number_integer()) bad("'base_seed' must be an integer");
    cfg.base_seed = j["base_seed"].get<std::uint64_t>();
  }
  if (j.contains("horizon_ts")) cfg.horizon_ts = as_int(j["horizon_ts"], "horizon_ts");
  if (j.contains("window")) cfg.window = as_int(j["window"], "window");
  if (j.contains("beta")) cfg.beta = as_number(j["beta"], "beta");
  if (j.contains("fit_a")) cfg.fit.a_coeff = as_number(j["fit_a"], "fit_a");
  if (j.contains("fit_d")) cfg.fit.d_coeff = as_number(j["fit_d"], "fit_d");
  if (j.contains("pf_weights")) cfg.pf_weights = as_bool(j["pf_weights"], "pf_weights");
  if (j.contains("reuse")) cfg.reuse = as_bool(j["reuse"], "reuse");
  if (j.contains("parallel_candidates"))
    cfg.parallel_candidates = as_bool(j["parallel_candidates"], "parallel_candidates");
  if (j.contains("jobs")) cfg.jobs = as_int(j["jobs"], "jobs");
  if (j.contains("out_dir")) cfg.out_dir = as_string(j["out_dir"], "out_dir");
  if (j.contains("mcs_table_file") && !j["mcs_table_file"].is_null())
    cfg.mcs_table_file = as_string(j["mcs_table_file"], "mcs_table_file");
  return cfg;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  auto complain = [&](const std::string& m) { errors.push_back(m); };

  try {
    ScenarioConfig sc = scenario;
    sc.validate();
  } catch (const ConfigError& e) {
    complain(e.what());
  }
  for (int u : num_users)
    if (u < 1) complain("num_users entries must be >= 1");
  for (int mb : mb_values)
    if (mb < 1) complain("num_bs_antennas entries must be >= 1");
  for (int mu : mu_values) {
    if (mu < 1) complain("num_user_antennas entries must be >= 1");
    for (int mb : mb_values)
      if (mu > mb)
        complain("num_user_antennas " + std::to_string(mu) +
                 " exceeds num_bs_antennas " + std::to_string(mb));
  }
  for (double b : budgets_mw)
    if (!(b > 0.0)) complain("power_budget_mw entries must be positive");
  if (num_realizations < 1) complain("num_realizations must be >= 1");
  if (horizon_ts < 1) complain("horizon_ts must be >= 1");
  if (window < 1) complain("window must be >= 1");
  if (!(beta > 1.0)) complain("beta must exceed 1");
  if (!(fit.a_coeff > 0.0)) complain("fit_a must be positive");
  if (!(fit.d_coeff > 0.0)) complain("fit_d must be positive");
  if (jobs < 1) complain("jobs must be >= 1");
  if (strategies.empty()) complain("at least one strategy required");
  if (schemes.empty()) complain("at least one power scheme required");
  if (mcs_table_file) {
    try {
      McsTable::from_file(*mcs_table_file);
    } catch (const ConfigError& e) {
      complain(e.what());
    }
  }
  return errors;
}

std::string ExperimentConfig::canonical_json() const {
  json j;
  j["version"] = kVersion;
  j["preset"] = preset;

  json sc;
  sc["cell_radius_m"] = scenario.cell_radius_m;
  sc["min_dist_m"] = scenario.min_dist_m;
  sc["carrier_freq_hz"] = scenario.carrier_freq_hz;
  sc["pathloss_los"] = {{"ref_db", scenario.pathloss_los.ref_db},
                        {"exponent", scenario.pathloss_los.exponent}};
  sc["pathloss_nlos"] = {{"ref_db", scenario.pathloss_nlos.ref_db},
                         {"exponent", scenario.pathloss_nlos.exponent}};
  sc["shadowing_std_db"] = scenario.shadowing_std_db;
  sc["los_d0_m"] = scenario.los_d0_m;
  sc["los_decay_m"] = scenario.los_decay_m;
  sc["k_factor_db"] = scenario.k_factor_db;
  json taps = json::array();
  for (const auto& t : scenario.taps) taps.push_back({t.delay_s, t.power_db});
  sc["taps"] = taps;
  sc["corr_coeff"] = scenario.corr_coeff;
  sc["num_subchannels"] = scenario.num_subchannels;
  sc["subchannel_bw_hz"] = scenario.subchannel_bw_hz;
  sc["block_subchannels"] = scenario.block_subchannels;
  sc["block_ts"] = scenario.block_ts;
  sc["noise_density_dbm_hz"] = scenario.noise_density_dbm_hz;
  sc["noise_figure_db"] = scenario.noise_figure_db;
  j["scenario"] = sc;

  json strat = json::array();
  for (Strategy s : strategies) strat.push_back(strategy_name(s));
  j["strategies"] = strat;
  json sch = json::array();
  for (PowerScheme s : schemes) sch.push_back(scheme_name(s));
  j["power_schemes"] = sch;
  j["num_users"] = num_users;
  j["num_bs_antennas"] = mb_values;
  j["num_user_antennas"] = mu_values;
  j["power_budget_mw"] = budgets_mw;
  j["num_realizations"] = num_realizations;
  j["base_seed"] = base_seed;
  j["horizon_ts"] = horizon_ts;
  j["window"] = window;
  j["beta"] = beta;
  j["fit_a"] = fit.a_coeff;
  j["fit_d"] = fit.d_coeff;
  j["pf_weights"] = pf_weights;
  j["reuse"] = reuse;
  j["parallel_candidates"] = parallel_candidates;
  j["mcs_table_file"] = mcs_table_file ? json(*mcs_table_file) : json(nullptr);
  return j.dump(2);
}

std::string ExperimentConfig::config_hash() const {
  const std::string text = canonical_json();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<SweepPoint> ExperimentConfig::sweep() const {
  std::vector<SweepPoint> out;
  for (Strategy st : strategies)
    for (PowerScheme sc : schemes)
      for (int u : num_users)
        for (int mb : mb_values)
          for (int mu : mu_values)
            for (double b : budgets_mw)
              out.push_back({st, sc, u, mb, mu, b});
  return out;
}

namespace {

std::string point_label(const SweepPoint& p) {
  std::ostringstream os;
  os << strategy_name(p.strategy) << "," << scheme_name(p.scheme) << ",u"
     << p.num_users << ",mb" << p.mb << ",mu" << p.mu << ",p" << fmt9(p.budget_mw);
  return os.str();
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg,
                                 const std::string& out_dir, bool quiet) {
  {
    const auto errors = cfg.validate();
    if (!errors.empty()) {
      std::string joined;
      for (const auto& e : errors) joined += (joined.empty() ? "" : "; ") + e;
      throw ConfigError(joined);
    }
  }
  const McsTable table = cfg.mcs_table_file
                             ? McsTable::from_file(*cfg.mcs_table_file)
                             : McsTable::default_5g();

  const std::vector<SweepPoint> points = cfg.sweep();
  const int reps = cfg.num_realizations;
  const int total = static_cast<int>(points.size()) * reps;

  std::vector<std::unique_ptr<RealizationResult>> results(
      static_cast<std::size_t>(total));
  std::vector<std::string> failures(static_cast<std::size_t>(total));

#pragma omp parallel for schedule(dynamic) num_threads(cfg.jobs)
  for (int ti = 0; ti < total; ++ti) {
    const SweepPoint& p = points[static_cast<std::size_t>(ti / reps)];
    const int rep = ti % reps;
    try {
      RealizationParams rp;
      rp.scenario = cfg.scenario;
      rp.scenario.num_bs_antennas = p.mb;
      rp.scenario.num_user_antennas = p.mu;
      rp.num_users = p.num_users;
      rp.horizon_ts = cfg.horizon_ts;
      rp.window = cfg.window;
      rp.budget_mw = p.budget_mw;
      rp.gus.strategy = p.strategy;
      rp.gus.scheme = p.scheme;
      rp.gus.beta = cfg.beta;
      rp.gus.reuse = cfg.reuse;
      rp.gus.parallel = cfg.parallel_candidates;
      rp.pf_weights = cfg.pf_weights;
      rp.seed = cfg.base_seed + static_cast<std::uint64_t>(rep);
      results[static_cast<std::size_t>(ti)] = std::make_unique<RealizationResult>(
          run_realization(rp, table, cfg.fit));
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(ti)] =
          point_label(points[static_cast<std::size_t>(ti / reps)]) + ",seed" +
          std::to_string(cfg.base_seed + static_cast<std::uint64_t>(rep)) +
          ": " + e.what();
    }
  }

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  // rates.csv
  {
    std::ofstream out(fs::path(out_dir) / "rates.csv");
    out << "realization,ts,user,rate_mbps,strategy,power_scheme,num_users,mb,"
           "mu,budget_mw\n";
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      const SweepPoint& p = points[pi];
      for (int rep = 0; rep < reps; ++rep) {
        const auto& r = results[pi * static_cast<std::size_t>(reps) +
                                static_cast<std::size_t>(rep)];
        if (!r) continue;
        for (std::size_t t = 0; t < r->rates.size(); ++t)
          for (std::size_t u = 0; u < r->rates[t].size(); ++u)
            out << rep << ',' << t << ',' << u << ','
                << fmt9(r->rates[t][u]) << ',' << strategy_name(p.strategy)
                << ',' << scheme_name(p.scheme) << ',' << p.num_users << ','
                << p.mb << ',' << p.mu << ',' << fmt9(p.budget_mw) << '\n';
      }
    }
  }

  // Per-point aggregates feed summary.json and histograms.csv.
  json summary;
  summary["version"] = kVersion;
  json jpoints = json::array();
  struct PointAgg {
    SweepPoint p;
    Aggregate gm;
    std::vector<double> per_seed;
  };
  std::vector<PointAgg> aggs;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const SweepPoint& p = points[pi];
    std::vector<double> gms;
    double rate_sum = 0.0;
    std::int64_t rate_n = 0;
    PatternHistogram hist;
    for (int rep = 0; rep < reps; ++rep) {
      const auto& r = results[pi * static_cast<std::size_t>(reps) +
                              static_cast<std::size_t>(rep)];
      if (!r) continue;
      gms.push_back(r->gm);
      hist.merge(r->histogram);
      for (const auto& ts : r->rates)
        for (double v : ts) {
          rate_sum += v;
          ++rate_n;
        }
    }
    const Aggregate agg = aggregate(gms);
    aggs.push_back({p, agg, gms});

    json jp;
    jp["strategy"] = strategy_name(p.strategy);
    jp["scheme"] = scheme_name(p.scheme);
    jp["num_users"] = p.num_users;
    jp["mb"] = p.mb;
    jp["mu"] = p.mu;
    jp["budget_mw"] = p.budget_mw;
    jp["n"] = agg.n;
    jp["gm_mean"] = agg.mean;
    if (agg.has_ci) jp["gm_ci90"] = agg.ci_half_width;
    jp["gm_per_seed"] = gms;
    jp["mean_user_rate_mbps"] =
        rate_n > 0 ? rate_sum / static_cast<double>(rate_n) : 0.0;
    jpoints.push_back(jp);

    if (!quiet) {
      std::ostringstream line;
      line << point_label(p) << ": gm_mean=" << fmt9(agg.mean) << " (n=" << agg.n
           << ")\n";
      std::cout << line.str();
    }
  }
  summary["points"] = jpoints;

  // GM ratios against ctr_f within a group, and epm against tpm.
  json jratios = json::array();
  for (const PointAgg& a : aggs) {
    if (a.p.strategy == Strategy::CtrF) continue;
    for (const PointAgg& ref : aggs) {
      if (ref.p.strategy != Strategy::CtrF || ref.p.scheme != a.p.scheme ||
          ref.p.num_users != a.p.num_users || ref.p.mb != a.p.mb ||
          ref.p.mu != a.p.mu || ref.p.budget_mw != a.p.budget_mw)
        continue;
      if (!(ref.gm.mean > 0.0)) continue;
      json jr;
      jr["strategy"] = strategy_name(a.p.strategy);
      jr["scheme"] = scheme_name(a.p.scheme);
      jr["num_users"] = a.p.num_users;
      jr["mb"] = a.p.mb;
      jr["mu"] = a.p.mu;
      jr["budget_mw"] = a.p.budget_mw;
      jr["gm_over_ctr_f"] = a.gm.mean / ref.gm.mean;
      jratios.push_back(jr);
    }
  }
  summary["gm_ratios"] = jratios;

  json jdeg = json::array();
  for (const PointAgg& a : aggs) {
    if (a.p.scheme != PowerScheme::Epm) continue;
    for (const PointAgg& ref : aggs) {
      if (ref.p.scheme != PowerScheme::Tpm ||
          ref.p.strategy != a.p.strategy ||
          ref.p.num_users != a.p.num_users || ref.p.mb != a.p.mb ||
          ref.p.mu != a.p.mu || ref.p.budget_mw != a.p.budget_mw)
        continue;
      if (!(ref.gm.mean > 0.0)) continue;
      json jr;
      jr["strategy"] = strategy_name(a.p.strategy);
      jr["num_users"] = a.p.num_users;
      jr["mb"] = a.p.mb;
      jr["mu"] = a.p.mu;
      jr["budget_mw"] = a.p.budget_mw;
      jr["epm_over_tpm"] = a.gm.mean / ref.gm.mean;
      jdeg.push_back(jr);
    }
  }
  summary["epm_degradation"] = jdeg;

  {
    std::ofstream out(fs::path(out_dir) / "summary.json");
    out << summary.dump(2) << '\n';
  }

  // histograms.csv
  {
    std::ofstream out(fs::path(out_dir) / "histograms.csv");
    out << "strategy,power_scheme,num_users,mb,mu,budget_mw,pattern_mask,"
           "count,mass\n";
    for (std::size_t pi = 0; pi < points.size(); ++pi) {
      const SweepPoint& p = points[pi];
      PatternHistogram hist;
      for (int rep = 0; rep < reps; ++rep) {
        const auto& r = results[pi * static_cast<std::size_t>(reps) +
                                static_cast<std::size_t>(rep)];
        if (r) hist.merge(r->histogram);
      }
      const auto masses = hist.masses();
      for (const auto& [mask, count] : hist.counts)
        out << strategy_name(p.strategy) << ',' << scheme_name(p.scheme) << ','
            << p.num_users << ',' << p.mb << ',' << p.mu << ','
            << fmt9(p.budget_mw) << ',' << mask << ',' << count << ','
            << fmt9(masses.at(mask)) << '\n';
    }
  }

  ExperimentOutcome outcome;
  outcome.total_realizations = total;
  outcome.out_dir = out_dir;
  for (const auto& f : failures)
    if (!f.empty()) {
      outcome.failures.push_back(f);
      ++outcome.failed_realizations;
    }

  // manifest.json: effective config, its hash, seeds and failures. No
  // timestamps; reruns must be byte-identical.
  {
    json manifest;
    manifest["version"] = kVersion;
    manifest["config_hash"] = cfg.config_hash();
    json seeds = json::array();
    for (int rep = 0; rep < reps; ++rep)
      seeds.push_back(cfg.base_seed + static_cast<std::uint64_t>(rep));
    manifest["seeds"] = seeds;
    manifest["total_realizations"] = total;
    manifest["failed_realizations"] = outcome.failed_realizations;
    manifest["failures"] = outcome.failures;
    manifest["outputs"] = {"rates.csv", "summary.json", "histograms.csv"};
    manifest["config"] = json::parse(cfg.canonical_json());
    std::ofstream out(fs::path(out_dir) / "manifest.json");
    out << manifest.dump(2) << '\n';
  }

  return outcome;
}

}  // namespace ulrrm
