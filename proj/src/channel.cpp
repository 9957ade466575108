#include "ulrrm/channel.hpp"

#include <cmath>
#include <complex>

#include "ulrrm/errors.hpp"
#include "ulrrm/rng.hpp"

namespace ulrrm {
namespace {

constexpr std::uint64_t kDropTag = 0xd509u;
constexpr std::uint64_t kFadeTag = 0xfa0eu;

double pathloss_db(const PathLossModel& m, double d_m) {
  return m.ref_db + 10.0 * m.exponent * std::log10(std::max(d_m, 1.0));
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

ScenarioConfig ScenarioConfig::rma() {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::RMa;
  cfg.cell_radius_m = 1000.0;
  cfg.min_dist_m = 35.0;
  cfg.pathloss_los = {43.3, 2.1};
  cfg.pathloss_nlos = {43.3, 3.0};
  cfg.shadowing_std_db = 6.0;
  cfg.los_d0_m = 10.0;
  cfg.los_decay_m = 1000.0;
  cfg.num_bs_antennas = 100;
  cfg.taps = {{0.0, 0.0},    {40e-9, -2.0},  {90e-9, -4.0},  {160e-9, -6.0},
              {260e-9, -8.0}, {400e-9, -10.0}, {600e-9, -12.0}, {850e-9, -14.0}};
  return cfg;
}

ScenarioConfig ScenarioConfig::uma() {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::UMa;
  cfg.cell_radius_m = 300.0;
  cfg.min_dist_m = 25.0;
  cfg.pathloss_los = {43.3, 2.2};
  cfg.pathloss_nlos = {43.3, 3.5};
  cfg.shadowing_std_db = 7.0;
  cfg.los_d0_m = 18.0;
  cfg.los_decay_m = 63.0;
  cfg.num_bs_antennas = 64;
  cfg.taps = {{0.0, 0.0},    {30e-9, -2.0},  {80e-9, -4.0},  {150e-9, -6.0},
              {250e-9, -8.0}, {380e-9, -10.0}, {550e-9, -12.0}, {750e-9, -14.0}};
  return cfg;
}

void ScenarioConfig::validate() const {
  if (num_user_antennas < 1) throw ConfigError("num_user_antennas must be >= 1");
  if (num_bs_antennas < 1) throw ConfigError("num_bs_antennas must be >= 1");
  if (num_user_antennas > num_bs_antennas)
    throw ConfigError("num_user_antennas must not exceed num_bs_antennas");
  if (num_subchannels < 1) throw ConfigError("num_subchannels must be >= 1");
  if (block_subchannels < 1) throw ConfigError("block_subchannels must be >= 1");
  if (block_ts < 1) throw ConfigError("block_ts must be >= 1");
  if (!(subchannel_bw_hz > 0.0)) throw ConfigError("subchannel_bw_hz must be positive");
  if (!(carrier_freq_hz > 0.0)) throw ConfigError("carrier_freq_hz must be positive");
  if (!(min_dist_m > 0.0)) throw ConfigError("min_dist_m must be positive");
  if (!(cell_radius_m > min_dist_m))
    throw ConfigError("cell_radius_m must exceed min_dist_m");
  if (shadowing_std_db < 0.0) throw ConfigError("shadowing_std_db must be >= 0");
  if (!(corr_coeff >= 0.0 && corr_coeff < 1.0))
    throw ConfigError("corr_coeff must lie in [0, 1)");
  if (taps.empty()) throw ConfigError("tap profile must not be empty");
  for (const auto& t : taps)
    if (t.delay_s < 0.0) throw ConfigError("tap delays must be >= 0");
  if (!(los_decay_m > 0.0)) throw ConfigError("los_decay_m must be positive");
  if (los_d0_m < 0.0) throw ConfigError("los_d0_m must be >= 0");
}

std::vector<double> ScenarioConfig::tap_linear_weights() const {
  std::vector<double> w(taps.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < taps.size(); ++k) {
    w[k] = std::pow(10.0, taps[k].power_db / 10.0);
    sum += w[k];
  }
  for (auto& v : w) v /= sum;
  return w;
}

double noise_power_mw(const ScenarioConfig& cfg) {
  const double dbm = cfg.noise_density_dbm_hz +
                     10.0 * std::log10(cfg.subchannel_bw_hz) +
                     cfg.noise_figure_db;
  return std::pow(10.0, dbm / 10.0);
}

Eigen::MatrixXd exp_corr_matrix(int n, double rho) {
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = std::pow(rho, std::abs(i - j));
  return r;
}

Realization::Realization(ScenarioConfig cfg, int num_users, int horizon_ts,
                         std::uint64_t seed)
    : cfg_(std::move(cfg)), horizon_ts_(horizon_ts), seed_(seed) {
  cfg_.validate();
  if (num_users < 1) throw ConfigError("num_users must be >= 1");
  if (horizon_ts < 1) throw ConfigError("horizon_ts must be >= 1");

  tap_weights_ = cfg_.tap_linear_weights();
  tap_delays_.reserve(cfg_.taps.size());
  for (const auto& t : cfg_.taps) tap_delays_.push_back(t.delay_s);

  bs_corr_sqrt_ = matrix_sqrt_psd(
      exp_corr_matrix(cfg_.num_bs_antennas, cfg_.corr_coeff));
  user_corr_sqrt_ = matrix_sqrt_psd(
      exp_corr_matrix(cfg_.num_user_antennas, cfg_.corr_coeff));

  drops_.resize(static_cast<std::size_t>(num_users));
  for (int u = 0; u < num_users; ++u) {
    Rng rng(hash_mix(seed_, kDropTag, static_cast<std::uint64_t>(u)));
    UserDrop& d = drops_[static_cast<std::size_t>(u)];

    // Uniform over the annulus between min_dist and the cell radius.
    const double rmin2 = cfg_.min_dist_m * cfg_.min_dist_m;
    const double rmax2 = cfg_.cell_radius_m * cfg_.cell_radius_m;
    const double r = std::sqrt(rmin2 + rng.uniform() * (rmax2 - rmin2));
    const double theta = 2.0 * M_PI * rng.uniform();
    d.x = r * std::cos(theta);
    d.y = r * std::sin(theta);
    d.dist_m = r;

    d.shadowing_db = cfg_.shadowing_std_db * rng.normal();
    const double p_los =
        r <= cfg_.los_d0_m ? 1.0
                           : std::exp(-(r - cfg_.los_d0_m) / cfg_.los_decay_m);
    d.los = rng.uniform() < p_los;

    const double pl =
        pathloss_db(d.los ? cfg_.pathloss_los : cfg_.pathloss_nlos, r);
    d.large_scale_gain = std::pow(10.0, -(pl + d.shadowing_db) / 10.0);
  }
}

std::vector<Eigen::MatrixXcd> Realization::tap_matrices(int u, int block_t,
                                                        int block_c) const {
  const int mu = cfg_.num_user_antennas;
  const int mb = cfg_.num_bs_antennas;
  Rng rng(hash_mix(seed_, kFadeTag, static_cast<std::uint64_t>(u),
                   static_cast<std::uint64_t>(block_t),
                   static_cast<std::uint64_t>(block_c)));

  const double k_lin = std::pow(10.0, cfg_.k_factor_db / 10.0);
  const double det_part = std::sqrt(k_lin / (k_lin + 1.0));
  const double diff_part = std::sqrt(1.0 / (k_lin + 1.0));

  std::vector<Eigen::MatrixXcd> taps;
  taps.reserve(tap_weights_.size());
  for (std::size_t k = 0; k < tap_weights_.size(); ++k) {
    Eigen::MatrixXcd m(mu, mb);
    for (int i = 0; i < mu; ++i)
      for (int j = 0; j < mb; ++j) m(i, j) = rng.cnormal();
    if (k == 0 && drops_[static_cast<std::size_t>(u)].los)
      m = det_part * Eigen::MatrixXcd::Ones(mu, mb) + diff_part * m;
    taps.push_back(std::sqrt(tap_weights_[k]) * m);
  }
  return taps;
}

Eigen::MatrixXcd Realization::channel_matrix(int u, int c, int t) const {
  const auto taps = tap_matrices(u, block_of_ts(t), block_of_subchannel(c));

  // Frequency offset of the subchannel center relative to band center.
  const double f_off =
      (c + 0.5 - 0.5 * cfg_.num_subchannels) * cfg_.subchannel_bw_hz;

  Eigen::MatrixXcd hw = Eigen::MatrixXcd::Zero(cfg_.num_user_antennas,
                                               cfg_.num_bs_antennas);
  for (std::size_t k = 0; k < taps.size(); ++k) {
    const double phase = -2.0 * M_PI * f_off * tap_delays_[k];
    hw += taps[k] * std::polar(1.0, phase);
  }

  const double amp =
      std::sqrt(drops_[static_cast<std::size_t>(u)].large_scale_gain);
  return amp * (user_corr_sqrt_ * hw * bs_corr_sqrt_);
}

}  // namespace ulrrm
