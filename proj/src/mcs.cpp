#include "ulrrm/mcs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "ulrrm/errors.hpp"

namespace ulrrm {

McsTable::McsTable(std::vector<McsLevel> levels) : levels_(std::move(levels)) {
  if (levels_.empty())
    throw std::invalid_argument("MCS table needs at least one level");
  for (auto& l : levels_) l.snr_linear = std::pow(10.0, l.snr_db / 10.0);
  for (std::size_t i = 1; i < levels_.size(); ++i) {
    if (!(levels_[i].snr_db > levels_[i - 1].snr_db))
      throw std::invalid_argument("MCS SNR thresholds must be strictly increasing");
    if (!(levels_[i].rate > levels_[i - 1].rate))
      throw std::invalid_argument("MCS rates must be strictly increasing");
  }
}

McsTable McsTable::default_5g() {
  auto lv = [](double db, double rate) { return McsLevel{db, 0.0, rate}; };
  return McsTable({
      lv(-6.82, 0.15), lv(-3.44, 0.38), lv(-0.53, 0.88), lv(3.79, 1.48),
      lv(5.80, 1.91), lv(8.08, 2.41), lv(9.76, 2.73), lv(11.72, 3.32),
      lv(13.49, 3.90), lv(15.87, 4.52), lv(17.73, 5.12), lv(19.50, 5.55),
      lv(21.32, 6.23), lv(23.51, 6.91), lv(25.15, 7.40),
  });
}

McsTable McsTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open MCS table file: " + path);

  std::vector<std::tuple<int, double, double>> rows;  // index, rate, snr_db
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    int index;
    if (!(ss >> index)) continue;  // blank or comment-only line
    double rate, snr_db;
    if (!(ss >> rate >> snr_db))
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'index rate snr_db'");
    std::string extra;
    if (ss >> extra)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": trailing content '" + extra + "'");
    rows.emplace_back(index, rate, snr_db);
  }
  if (rows.empty()) throw ConfigError(path + ": no MCS levels found");

  std::sort(rows.begin(), rows.end());
  std::vector<McsLevel> levels;
  levels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto [index, rate, snr_db] = rows[i];
    if (index != static_cast<int>(i) + 1)
      throw ConfigError(path + ": level indices must be 1..N without gaps");
    levels.push_back({snr_db, 0.0, rate});
  }
  try {
    return McsTable(std::move(levels));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

int McsTable::mcs_level(double snr_linear) const {
  auto it = std::upper_bound(
      levels_.begin(), levels_.end(), snr_linear,
      [](double v, const McsLevel& l) { return v < l.snr_linear; });
  return static_cast<int>(it - levels_.begin());
}

double McsTable::mcs_rate(double snr_linear) const {
  return rate_of(mcs_level(snr_linear));
}

double fitted_rate(double snr_linear, const FittedRateModel& model) {
  return model.a_coeff * std::log1p(model.d_coeff * snr_linear);
}

double min_power_for_snr(double snr_target, double eff_channel) {
  double p = snr_target / eff_channel;
  while (p * eff_channel < snr_target)
    p = std::nextafter(p, std::numeric_limits<double>::infinity());
  return p;
}

double power_cap(double eff_channel, const McsTable& table) {
  if (!(eff_channel > 0.0))
    throw std::invalid_argument("power_cap needs a positive effective channel");
  return min_power_for_snr(table.top_snr_linear(), eff_channel);
}

}  // namespace ulrrm
