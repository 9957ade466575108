#include "ulrrm/sim.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ulrrm/zf.hpp"

namespace ulrrm {

FairnessState make_fairness(int num_users, int window) {
  if (window < 1) throw std::invalid_argument("fairness window must be >= 1");
  FairnessState st;
  st.window = window;
  st.avg_rate.assign(static_cast<std::size_t>(num_users), 0.0);
  st.weights.assign(static_cast<std::size_t>(num_users), 1.0);
  return st;
}

void update_fairness(FairnessState& st, std::span<const double> rates) {
  if (rates.size() != st.avg_rate.size())
    throw std::invalid_argument("rate vector size mismatch");
  const double w = static_cast<double>(st.window);
  for (std::size_t u = 0; u < rates.size(); ++u) {
    if (!st.started)
      st.avg_rate[u] = std::max(rates[u], st.floor);
    else
      st.avg_rate[u] = ((w - 1.0) * st.avg_rate[u] + rates[u]) / w;
    st.weights[u] = 1.0 / st.avg_rate[u];
  }
  st.started = true;
}

double geometric_mean(std::span<const double> totals) {
  if (totals.empty()) return 0.0;
  double log_sum = 0.0;
  for (double v : totals) {
    if (!(v > 0.0)) return 0.0;
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(totals.size()));
}

void PatternHistogram::add(unsigned mask, std::int64_t n) {
  counts[mask] += n;
  total += n;
}

void PatternHistogram::merge(const PatternHistogram& other) {
  for (const auto& [mask, n] : other.counts) counts[mask] += n;
  total += other.total;
}

std::map<unsigned, double> PatternHistogram::masses() const {
  std::map<unsigned, double> out;
  if (total == 0) return out;
  for (const auto& [mask, n] : counts)
    out[mask] = static_cast<double>(n) / static_cast<double>(total);
  return out;
}

RealizationResult run_realization(const RealizationParams& params,
                                  const McsTable& table,
                                  const FittedRateModel& model) {
  const auto t_start = std::chrono::steady_clock::now();

  const ScenarioConfig& sc = params.scenario;
  Realization real(sc, params.num_users, params.horizon_ts, params.seed);
  const double noise = noise_power_mw(sc);
  const double mbps_per_rate = sc.subchannel_bw_hz / 1e6;

  FairnessState fair = make_fairness(params.num_users, params.window);
  std::vector<double> equal_weights(static_cast<std::size_t>(params.num_users),
                                    1.0);

  RealizationResult res;
  res.rates.reserve(static_cast<std::size_t>(params.horizon_ts));
  res.user_totals.assign(static_cast<std::size_t>(params.num_users), 0.0);

  TsChannels channels(params.num_users, sc.num_subchannels, sc.num_bs_antennas,
                      sc.num_user_antennas, noise);

  for (int t = 0; t < params.horizon_ts; ++t) {
    if (t % sc.block_ts == 0) {
      for (int u = 0; u < params.num_users; ++u)
        for (int c = 0; c < sc.num_subchannels; ++c)
          channels.set_basis(u, c, stream_basis(real.channel_matrix(u, c, t)));
    }

    const std::vector<double>& weights =
        params.pf_weights ? fair.weights : equal_weights;
    TsResult ts = run_gus(channels, weights, params.budget_mw, params.gus,
                          table, model);

    std::vector<double> mbps(static_cast<std::size_t>(params.num_users));
    for (int u = 0; u < params.num_users; ++u) {
      mbps[static_cast<std::size_t>(u)] =
          ts.user_rates[static_cast<std::size_t>(u)] * mbps_per_rate;
      res.user_totals[static_cast<std::size_t>(u)] +=
          mbps[static_cast<std::size_t>(u)];
    }
    update_fairness(fair, mbps);

    for (const auto& [user_prb, mask] : ts.patterns) res.histogram.add(mask);
    res.waterfill_calls += ts.waterfill_calls;
    res.zf_assessments += ts.zf_assessments;
    res.rates.push_back(std::move(mbps));
  }

  res.gm = geometric_mean(res.user_totals);
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return res;
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate out;
  out.n = static_cast<int>(values.size());
  if (out.n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n < 2) return out;

  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double stddev = std::sqrt(ss / static_cast<double>(out.n - 1));
  boost::math::students_t dist(static_cast<double>(out.n - 1));
  const double tq = boost::math::quantile(dist, 0.95);  // two-sided 90%
  out.ci_half_width = tq * stddev / std::sqrt(static_cast<double>(out.n));
  out.has_ci = true;
  return out;
}

}  // namespace ulrrm
