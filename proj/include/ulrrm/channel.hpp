#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace ulrrm {

struct TapSpec {
  double delay_s = 0.0;
  double power_db = 0.0;
};

enum class ScenarioKind { RMa, UMa };

// PL(d) = ref_db + 10 * exponent * log10(d), d in meters (>= 1).
struct PathLossModel {
  double ref_db = 43.3;
  double exponent = 3.0;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::UMa;

  double cell_radius_m = 300.0;
  double min_dist_m = 25.0;
  double carrier_freq_hz = 3.5e9;

  PathLossModel pathloss_los{43.3, 2.2};
  PathLossModel pathloss_nlos{43.3, 3.5};
  double shadowing_std_db = 7.0;

  // P(LOS) = 1 for d <= los_d0_m, exp(-(d - los_d0_m) / los_decay_m) beyond.
  double los_d0_m = 18.0;
  double los_decay_m = 63.0;
  double k_factor_db = 7.0;

  std::vector<TapSpec> taps;   // power-delay profile
  double corr_coeff = 0.4;     // exponential antenna correlation, both ends

  int num_bs_antennas = 64;
  int num_user_antennas = 4;
  int num_subchannels = 78;
  double subchannel_bw_hz = 360e3;
  int block_subchannels = 13;  // CSI granularity in frequency
  int block_ts = 2;            // CSI granularity in time

  double noise_density_dbm_hz = -174.0;
  double noise_figure_db = 9.0;

  static ScenarioConfig rma();
  static ScenarioConfig uma();

  // Throws ConfigError on out-of-range fields.
  void validate() const;

  // Linear tap weights rescaled to sum to 1.
  std::vector<double> tap_linear_weights() const;

  int num_time_blocks(int horizon_ts) const {
    return (horizon_ts + block_ts - 1) / block_ts;
  }
  int num_freq_blocks() const {
    return (num_subchannels + block_subchannels - 1) / block_subchannels;
  }
};

// Thermal noise over one subchannel, in mW.
double noise_power_mw(const ScenarioConfig& cfg);

// n x n matrix with entries rho^|i-j|.
Eigen::MatrixXd exp_corr_matrix(int n, double rho);

struct UserDrop {
  double x = 0.0, y = 0.0;
  double dist_m = 0.0;
  bool los = false;
  double shadowing_db = 0.0;
  double large_scale_gain = 0.0;  // linear power gain
};

// One drop of users with per-(user, CSI block) fading. Tap coefficients are
// derived lazily from hashed substream seeds, so channel queries are pure
// functions of (seed, user, block) and nothing large is stored.
class Realization {
 public:
  Realization(ScenarioConfig cfg, int num_users, int horizon_ts,
              std::uint64_t seed);

  const ScenarioConfig& config() const { return cfg_; }
  int num_users() const { return static_cast<int>(drops_.size()); }
  int horizon_ts() const { return horizon_ts_; }
  std::uint64_t seed() const { return seed_; }
  const UserDrop& user(int u) const { return drops_[static_cast<std::size_t>(u)]; }

  int block_of_ts(int t) const { return t / cfg_.block_ts; }
  int block_of_subchannel(int c) const { return c / cfg_.block_subchannels; }

  // Per-tap fading matrices (num_user_antennas x num_bs_antennas) for one
  // CSI block, correlation shaping and LOS component applied.
  std::vector<Eigen::MatrixXcd> tap_matrices(int u, int block_t,
                                             int block_c) const;

  // Channel of user u on subchannel c at TS t (0-based indices).
  Eigen::MatrixXcd channel_matrix(int u, int c, int t) const;

 private:
  ScenarioConfig cfg_;
  int horizon_ts_;
  std::uint64_t seed_;
  std::vector<UserDrop> drops_;
  std::vector<double> tap_weights_;
  std::vector<double> tap_delays_;
  Eigen::MatrixXd bs_corr_sqrt_;
  Eigen::MatrixXd user_corr_sqrt_;
};

inline Realization generate_realization(const ScenarioConfig& cfg,
                                        int num_users, int horizon_ts,
                                        std::uint64_t seed) {
  return Realization(cfg, num_users, horizon_ts, seed);
}

}  // namespace ulrrm
