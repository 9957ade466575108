#pragma once

#include <string>
#include <vector>

namespace ulrrm {

// One modulation-and-coding level: the minimum SNR at which it decodes and
// the spectral efficiency it then delivers.
struct McsLevel {
  double snr_db = 0.0;
  double snr_linear = 0.0;  // derived from snr_db on construction
  double rate = 0.0;        // bits/s/Hz
};

// Discrete MCS ladder. Levels are 1-based; level 0 means no transmission.
class McsTable {
 public:
  explicit McsTable(std::vector<McsLevel> levels);

  // Built-in 15-level 5G NR mapping.
  static McsTable default_5g();

  // Loads a ladder from a text file, one row per level: index rate snr_db.
  // Fields may be separated by whitespace or commas; '#' starts a comment.
  static McsTable from_file(const std::string& path);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  const McsLevel& level(int l) const { return levels_[static_cast<std::size_t>(l - 1)]; }
  double rate_of(int l) const { return l == 0 ? 0.0 : level(l).rate; }
  double top_snr_linear() const { return levels_.back().snr_linear; }
  double top_rate() const { return levels_.back().rate; }

  // Highest level whose threshold is <= snr_linear, or 0 below the ladder.
  int mcs_level(double snr_linear) const;

  // Piecewise-constant spectral efficiency of the attainable level.
  double mcs_rate(double snr_linear) const;

 private:
  std::vector<McsLevel> levels_;
};

// Smooth concave stand-in a * ln(1 + d * snr) for the discrete ladder, used
// wherever the search needs a differentiable rate.
struct FittedRateModel {
  double a_coeff = 1.389;
  double d_coeff = 0.5191;
};

double fitted_rate(double snr_linear, const FittedRateModel& model);

// Smallest power (up to rounding) whose SNR clears snr_target, nudged so
// that eff_channel * result >= snr_target holds in double arithmetic.
double min_power_for_snr(double snr_target, double eff_channel);

// Power beyond which a stream cannot climb the ladder any further: the SNR
// is pinned at the top threshold. eff_channel must be positive.
double power_cap(double eff_channel, const McsTable& table);

}  // namespace ulrrm
