#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ulrrm/channel.hpp"
#include "ulrrm/gus.hpp"

namespace ulrrm {

// Moving average of realized user rates and the proportional-fair weights
// derived from it.
struct FairnessState {
  int window = 6;
  double floor = 1e-6;  // seed floor so weights stay finite
  std::vector<double> avg_rate;
  std::vector<double> weights;
  bool started = false;
};

FairnessState make_fairness(int num_users, int window);

// Folds one TS of realized rates into the moving average:
// R <- ((W-1) R + r) / W. The first TS seeds R with max(r, floor).
void update_fairness(FairnessState& st, std::span<const double> rates);

// Geometric mean of per-user totals, evaluated in the log domain. Zero when
// any total is zero.
double geometric_mean(std::span<const double> totals);

// Scheduled stream-set occurrence counts, keyed by bitmask (bit s-1 set
// means stream s is active for that user on that subchannel).
struct PatternHistogram {
  std::map<unsigned, std::int64_t> counts;
  std::int64_t total = 0;

  void add(unsigned mask, std::int64_t n = 1);
  void merge(const PatternHistogram& other);
  std::map<unsigned, double> masses() const;
};

struct RealizationParams {
  ScenarioConfig scenario;
  int num_users = 10;
  int horizon_ts = 66;
  int window = 6;
  double budget_mw = 1.0;
  GusParams gus;
  bool pf_weights = true;  // false freezes all weights at 1
  std::uint64_t seed = 1;
};

struct RealizationResult {
  std::vector<std::vector<double>> rates;  // [ts][user], Mbps
  std::vector<double> user_totals;         // summed over the horizon
  double gm = 0.0;
  PatternHistogram histogram;
  double wall_seconds = 0.0;
  std::int64_t waterfill_calls = 0;
  std::int64_t zf_assessments = 0;
};

// One channel realization: drop users, then per TS rebuild CSI at block
// boundaries, run the greedy-up search and update fairness.
RealizationResult run_realization(const RealizationParams& params,
                                  const McsTable& table,
                                  const FittedRateModel& model);

// Mean with two-sided 90% Student-t confidence half-width. has_ci is false
// when fewer than two values are given.
struct Aggregate {
  double mean = 0.0;
  double ci_half_width = 0.0;
  int n = 0;
  bool has_ci = false;
};

Aggregate aggregate(std::span<const double> values);

}  // namespace ulrrm
