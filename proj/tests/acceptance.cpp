// Acceptance gate. Each criterion prints exactly one PASS/FAIL line and the
// binary exits nonzero if any fails. Oracles are independent of the library
// paths they check: long-double pseudo-inverse for ZF gains, water-level
// bisection for the capped water-filler, exhaustive enumeration for ladder
// assignment and tiny allocation problems.

#include <unistd.h>

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "ulrrm/channel.hpp"
#include "ulrrm/experiment.hpp"
#include "ulrrm/gus.hpp"
#include "ulrrm/mcs.hpp"
#include "ulrrm/power.hpp"
#include "ulrrm/rng.hpp"
#include "ulrrm/sim.hpp"
#include "ulrrm/zf.hpp"

using namespace ulrrm;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  std::string label;
  bool pass = true;
  long checks = 0;
  std::string why;     // first failing check
  std::string report;  // numbers worth printing either way
  double seconds = 0.0;

  explicit Criterion(std::string l) : label(std::move(l)) {}
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (!ok && pass) {
      pass = false;
      why = what;
    }
  }
};

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

Eigen::MatrixXcd random_matrix(Rng& rng, int r, int c) {
  Eigen::MatrixXcd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.cnormal();
  return m;
}

TsChannels random_channels(Rng& rng, int users, int prbs, int mb, int mu,
                           double noise_mw) {
  TsChannels ch(users, prbs, mb, mu, noise_mw);
  for (int u = 0; u < users; ++u)
    for (int c = 0; c < prbs; ++c)
      ch.set_basis(u, c, stream_basis(random_matrix(rng, mu, mb)));
  return ch;
}

// Effective channels through a long-double Gram inverse, independent of both
// library paths (eigensolver and bordered updates).
std::vector<double> zf_gains_oracle(const Eigen::MatrixXcd& rows,
                                    double noise_mw) {
  using Cld = std::complex<long double>;
  using Mld = Eigen::Matrix<Cld, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index s = rows.rows();
  Mld g(s, rows.cols());
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j < rows.cols(); ++j)
      g(i, j) = Cld(rows(i, j).real(), rows(i, j).imag());
  const Mld gram = g * g.adjoint();
  const Mld inv = gram.fullPivLu().inverse();
  std::vector<double> out(static_cast<std::size_t>(s));
  for (Eigen::Index i = 0; i < s; ++i)
    out[static_cast<std::size_t>(i)] = static_cast<double>(
        1.0L / (static_cast<long double>(noise_mw) * inv(i, i).real()));
  return out;
}

// Capped water-filling by bisecting the water level in long double.
std::vector<double> waterfill_bisect_oracle(const std::vector<Slot>& slots,
                                            double budget, double d_coeff,
                                            const McsTable& table) {
  const std::size_t n = slots.size();
  std::vector<long double> a(n), cap(n);
  long double cap_sum = 0.0L;
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = 1.0L / (static_cast<long double>(d_coeff) * slots[j].eff_channel);
    cap[j] = power_cap(slots[j].eff_channel, table);
    cap_sum += cap[j];
  }
  std::vector<double> out(n);
  if (budget >= static_cast<double>(cap_sum)) {
    for (std::size_t j = 0; j < n; ++j) out[j] = static_cast<double>(cap[j]);
    return out;
  }
  long double lo = 0.0L, hi = 0.0L;
  for (std::size_t j = 0; j < n; ++j) hi = std::max(hi, a[j] + cap[j]);
  for (int it = 0; it < 200; ++it) {
    const long double mid = 0.5L * (lo + hi);
    long double spent = 0.0L;
    for (std::size_t j = 0; j < n; ++j)
      spent += std::clamp(mid - a[j], 0.0L, cap[j]);
    (spent > budget ? hi : lo) = mid;
  }
  const long double mu = 0.5L * (lo + hi);
  for (std::size_t j = 0; j < n; ++j)
    out[j] = static_cast<double>(std::clamp(mu - a[j], 0.0L, cap[j]));
  return out;
}

// Best total ladder rate over every MCS assignment that fits the budget.
double exhaustive_ladder_optimum(const std::vector<Slot>& slots, double budget,
                                 const McsTable& table) {
  double best = 0.0;
  const auto recurse = [&](auto&& self, std::size_t j, double spent,
                           double rate) -> void {
    if (j == slots.size()) {
      best = std::max(best, rate);
      return;
    }
    for (int l = 0; l <= table.num_levels(); ++l) {
      double p = 0.0;
      if (l > 0)
        p = min_power_for_snr(table.level(l).snr_linear, slots[j].eff_channel);
      if (spent + p > budget * (1.0 + 1e-12) + 1e-15) break;
      self(self, j + 1, spent + p, rate + table.rate_of(l));
    }
  };
  recurse(recurse, 0, 0.0, 0.0);
  return best;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Criterion crit1_mcs_table() {
  Criterion c("mcs ladder exactness");
  const Stopwatch sw;
  const double rates[] = {0.15, 0.38, 0.88, 1.48, 1.91, 2.41, 2.73, 3.32,
                          3.90, 4.52, 5.12, 5.55, 6.23, 6.91, 7.40};
  const double snr_db[] = {-6.82, -3.44, -0.53, 3.79,  5.80,
                           8.08,  9.76,  11.72, 13.49, 15.87,
                           17.73, 19.50, 21.32, 23.51, 25.15};
  const McsTable t = McsTable::default_5g();
  c.expect(t.num_levels() == 15, "ladder is not 15 levels");
  for (int l = 1; l <= 15; ++l) {
    c.expect(t.level(l).rate == rates[l - 1], "rate mismatch");
    c.expect(t.level(l).snr_db == snr_db[l - 1], "snr mismatch");
    const double g = t.level(l).snr_linear;
    const double lin = std::pow(10.0, snr_db[l - 1] / 10.0);
    c.expect(std::abs(g - lin) <= 1e-12 * lin, "linear threshold mismatch");
    c.expect(t.mcs_level(g) == l, "level lost at its own threshold");
    c.expect(t.mcs_level(g * (1.0 + 1e-9)) == l, "level above threshold");
    c.expect(t.mcs_level(g * (1.0 - 1e-9)) == l - 1, "level below threshold");
  }
  c.expect(t.mcs_level(0.0) == 0, "zero snr maps off the ladder");
  c.seconds = sw.seconds();
  c.expect(c.seconds < 1.0, "runtime over 1 s");
  return c;
}

Criterion crit2_zf() {
  Criterion c("zf receiver and effective channels");
  const Stopwatch sw;
  Rng rng(0x2f01);
  int feasible = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int mb = 1 + static_cast<int>(rng.uniform() * 16.0);
    const int s = 1 + static_cast<int>(rng.uniform() * mb);
    const double noise = std::pow(10.0, -2.0 + 2.0 * rng.uniform());
    const Eigen::MatrixXcd rows = random_matrix(rng, s, mb);

    const EffectiveChannels ec = effective_channels(rows, noise);
    if (!ec.feasible) continue;
    ++feasible;

    const Eigen::MatrixXcd w = zf_receiver(rows);
    const double err = (w * rows.adjoint() -
                        Eigen::MatrixXcd::Identity(s, s))
                           .cwiseAbs()
                           .maxCoeff();
    c.expect(err < 1e-9, "receiver identity off by " + fmt(err));

    const std::vector<double> oracle = zf_gains_oracle(rows, noise);
    for (int i = 0; i < s; ++i)
      c.expect(std::abs(ec.gains[static_cast<std::size_t>(i)] -
                        oracle[static_cast<std::size_t>(i)]) <=
                   1e-9 * oracle[static_cast<std::size_t>(i)],
               "gain off the long-double oracle");

    GramState st(noise, mb);
    bool ok = true;
    for (int i = 0; i < s && ok; ++i) ok = st.add({0, i + 1}, rows.row(i));
    c.expect(ok, "incremental add failed on a feasible set");
    if (ok)
      for (int i = 0; i < s; ++i)
        c.expect(std::abs(st.gains()[static_cast<std::size_t>(i)] -
                          oracle[static_cast<std::size_t>(i)]) <=
                     1e-9 * oracle[static_cast<std::size_t>(i)],
                 "incremental gain off the oracle");
  }
  c.expect(feasible >= 990, "too many infeasible random sets");
  c.seconds = sw.seconds();
  c.report = std::to_string(feasible) + "/1000 feasible";
  c.expect(c.seconds < 30.0, "runtime over 30 s");
  return c;
}

Criterion crit3_monotone() {
  Criterion c("monotone degradation");
  const Stopwatch sw;
  Rng rng(0x3a11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int mb = 2 + static_cast<int>(rng.uniform() * 15.0);
    const int k = 1 + static_cast<int>(rng.uniform() * (mb - 1));
    const double noise = std::pow(10.0, -2.0 + 2.0 * rng.uniform());
    GramState st(noise, mb);
    bool ok = true;
    for (int i = 0; i < k && ok; ++i)
      ok = st.add({0, i + 1}, random_matrix(rng, 1, mb).row(0));
    c.expect(ok, "committed set went singular");
    if (!ok) continue;
    const std::vector<double> before = st.gains();
    if (!st.add({1, 1}, random_matrix(rng, 1, mb).row(0))) continue;
    for (int i = 0; i < k; ++i)
      c.expect(st.gains()[static_cast<std::size_t>(i)] <=
                   before[static_cast<std::size_t>(i)] * (1.0 + 1e-12),
               "an existing gain increased");
  }
  c.seconds = sw.seconds();
  return c;
}

Criterion crit4_waterfill() {
  Criterion c("capped water-filling optimality");
  const Stopwatch sw;
  const McsTable table = McsTable::default_5g();
  const FittedRateModel model;
  Rng rng(0x4f11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 10.0);
    std::vector<Slot> slots;
    double cap_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double e = std::pow(10.0, -2.0 + 5.0 * rng.uniform());
      slots.push_back({j, 1, e});
      cap_sum += power_cap(e, table);
    }
    // every tenth budget saturates all caps
    const double budget = trial % 10 == 0
                              ? cap_sum * (1.0 + rng.uniform())
                              : std::pow(10.0, -2.0 + 4.0 * rng.uniform());

    const std::vector<double> p = capped_waterfill(slots, budget, model, table);
    double spent = 0.0;
    for (int j = 0; j < n; ++j) {
      const double pj = p[static_cast<std::size_t>(j)];
      c.expect(pj >= 0.0, "negative power");
      c.expect(pj <= power_cap(slots[static_cast<std::size_t>(j)].eff_channel,
                               table) +
                         1e-9,
               "cap exceeded");
      spent += pj;
    }
    c.expect(spent <= budget + 1e-9, "budget exceeded");

    const std::vector<double> op =
        waterfill_bisect_oracle(slots, budget, model.d_coeff, table);
    long double oracle_obj = 0.0L;
    for (int j = 0; j < n; ++j)
      oracle_obj +=
          static_cast<long double>(model.a_coeff) *
          std::log(1.0L + static_cast<long double>(model.d_coeff) *
                              slots[static_cast<std::size_t>(j)].eff_channel *
                              op[static_cast<std::size_t>(j)]);
    const double impl_obj = waterfill_fitted_sum(slots, budget, model, table);
    const double ref = static_cast<double>(oracle_obj);
    c.expect(std::abs(impl_obj - ref) <= 1e-8 * std::max(ref, 1e-30),
             "fitted objective off the bisection oracle");
  }
  c.seconds = sw.seconds();
  c.expect(c.seconds < 10.0, "runtime over 10 s");
  return c;
}

Criterion crit5_tpm_bracket() {
  Criterion c("ladder power management brackets");
  const Stopwatch sw;
  const McsTable table = McsTable::default_5g();
  const FittedRateModel model;
  Rng rng(0x5713);
  double ratio_sum = 0.0;
  int ratio_n = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 3.0);
    std::vector<Slot> slots;
    for (int j = 0; j < n; ++j)
      slots.push_back({j, 1, std::pow(10.0, -1.0 + 3.0 * rng.uniform())});
    const double budget = std::pow(10.0, -2.0 + 3.5 * rng.uniform());

    const std::vector<double> wf = capped_waterfill(slots, budget, model, table);
    const QuantizeResult q = mcs_quantize_and_pool(slots, wf, table);
    double base_rate = 0.0;
    for (int l : q.mcs) base_rate += table.rate_of(l);

    const PowerPlan plan = tpm(slots, budget, model, table);
    double tpm_rate = 0.0;
    for (int l : plan.mcs) tpm_rate += table.rate_of(l);

    const double opt = exhaustive_ladder_optimum(slots, budget, table);
    c.expect(tpm_rate >= base_rate, "upgrade lost rate");
    c.expect(tpm_rate <= opt, "claimed rate above the exhaustive optimum");
    if (opt > 0.0) {
      ratio_sum += tpm_rate / opt;
      ++ratio_n;
    }
  }
  c.seconds = sw.seconds();
  c.report = "mean tpm/optimum " +
             fmt(ratio_n > 0 ? ratio_sum / ratio_n : 1.0) + " over " +
             std::to_string(ratio_n) + " instances";
  return c;
}

Criterion crit6_reuse_equivalence() {
  Criterion c("reuse equivalence");
  const Stopwatch sw;
  const McsTable table = McsTable::default_5g();
  const FittedRateModel model;
  Rng rng(0x6e01);
  for (int inst = 0; inst < 50; ++inst) {
    const TsChannels ch = random_channels(rng, 4, 4, 4, 2, 0.05);
    std::vector<double> w(4);
    for (double& v : w) v = 0.5 + 1.5 * rng.uniform();
    for (Strategy s : {Strategy::CtrOne, Strategy::Bd, Strategy::CtrF}) {
      GusParams gp;
      gp.strategy = s;
      gp.reuse = true;
      const TsResult a = run_gus(ch, w, 2.0, gp, table, model);
      gp.reuse = false;
      const TsResult b = run_gus(ch, w, 2.0, gp, table, model);

      c.expect(a.trajectory.size() == b.trajectory.size(),
               "trajectory lengths differ");
      if (a.trajectory.size() == b.trajectory.size())
        for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
          c.expect(a.trajectory[i].cand == b.trajectory[i].cand,
                   "committed candidates differ");
          c.expect(a.trajectory[i].wsr == b.trajectory[i].wsr,
                   "committed sums differ");
        }
      c.expect(a.wsr_max == b.wsr_max, "incumbent sums differ");
      c.expect(a.user_rates == b.user_rates, "final rates differ");
      c.expect(a.allocation.size() == b.allocation.size(),
               "allocations differ");
    }
  }
  c.seconds = sw.seconds();
  c.expect(c.seconds < 120.0, "runtime over 2 min");
  return c;
}

Criterion crit7_reuse_speedup() {
  Criterion c("reuse speedup");
  const Stopwatch sw;
  const McsTable table = McsTable::default_5g();
  const FittedRateModel model;
  ScenarioConfig sc = ScenarioConfig::uma();
  sc.num_subchannels = 26;
  sc.num_bs_antennas = 16;
  sc.num_user_antennas = 4;
  const int users = 20;
  const double noise = noise_power_mw(sc);
  const std::vector<double> w(users, 1.0);

  double t_on = 0.0, t_off = 0.0;
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const Realization real(sc, users, 1, seed);
    TsChannels ch(users, sc.num_subchannels, sc.num_bs_antennas,
                  sc.num_user_antennas, noise);
    for (int u = 0; u < users; ++u)
      for (int k = 0; k < sc.num_subchannels; ++k)
        ch.set_basis(u, k, stream_basis(real.channel_matrix(u, k, 0)));

    GusParams gp;
    gp.strategy = Strategy::Bd;
    gp.reuse = true;
    const Stopwatch s_on;
    const TsResult a = run_gus(ch, w, 5.0, gp, table, model);
    t_on += s_on.seconds();

    gp.reuse = false;
    const Stopwatch s_off;
    const TsResult b = run_gus(ch, w, 5.0, gp, table, model);
    t_off += s_off.seconds();

    c.expect(a.user_rates == b.user_rates, "reuse changed the outcome");
  }
  const double speedup = t_off / t_on;
  c.expect(speedup >= 1.15, "speedup " + fmt(speedup) + " below 1.15");
  c.seconds = sw.seconds();
  c.report = "speedup " + fmt(speedup, 3) + "x (" + fmt(t_off, 3) + "s / " +
             fmt(t_on, 3) + "s)";
  return c;
}

Criterion crit8_tiny_gap() {
  Criterion c("tiny-instance optimality gap");
  const Stopwatch sw;
  const McsTable table = McsTable::default_5g();
  const FittedRateModel model;
  const int mu = 2, mb = 2;
  const double noise = 0.05, budget = 2.0;
  Rng rng(0x8a2d);

  // per-subchannel stream masks for the two users, at most mb streams total
  std::vector<std::pair<unsigned, unsigned>> options;
  for (unsigned m0 = 0; m0 < 4; ++m0)
    for (unsigned m1 = 0; m1 < 4; ++m1)
      if (std::popcount(m0) + std::popcount(m1) <= mb)
        options.emplace_back(m0, m1);

  double ratio_sum = 0.0, ratio_min = 1.0;
  for (int inst = 0; inst < 50; ++inst) {
    const TsChannels ch = random_channels(rng, 2, 2, mb, mu, noise);
    std::vector<double> w(2);
    for (double& v : w) v = 0.5 + 1.5 * rng.uniform();

    double best = 0.0;
    for (const auto& [a0, a1] : options)
      for (const auto& [b0, b1] : options) {
        const unsigned masks[2][2] = {{a0, a1}, {b0, b1}};
        std::vector<Slot> slots[2];
        bool ok = true;
        for (int prb = 0; prb < 2 && ok; ++prb) {
          const int rows_n = std::popcount(masks[prb][0]) +
                             std::popcount(masks[prb][1]);
          if (rows_n == 0) continue;
          Eigen::MatrixXcd rows(rows_n, mb);
          int r = 0;
          for (int u = 0; u < 2; ++u)
            for (int s = 1; s <= mu; ++s)
              if (masks[prb][u] & (1u << (s - 1)))
                rows.row(r++) = ch.basis(u, prb).signature(s);
          const EffectiveChannels ec = effective_channels(rows, noise);
          if (!ec.feasible) {
            ok = false;
            break;
          }
          r = 0;
          for (int u = 0; u < 2; ++u)
            for (int s = 1; s <= mu; ++s)
              if (masks[prb][u] & (1u << (s - 1)))
                slots[u].push_back(
                    {prb, s, ec.gains[static_cast<std::size_t>(r++)]});
        }
        if (!ok) continue;
        double wsr = 0.0;
        for (int u = 0; u < 2; ++u)
          wsr += w[static_cast<std::size_t>(u)] *
                 waterfill_fitted_sum(slots[u], budget, model, table);
        best = std::max(best, wsr);
      }

    GusParams gp;  // any-subset strategy, ladder power management
    const TsResult res = run_gus(ch, w, budget, gp, table, model);
    c.expect(res.wsr_max <= best * (1.0 + 1e-9),
             "search exceeded the enumerated optimum");
    c.expect(best > 0.0, "degenerate instance");
    const double ratio = best > 0.0 ? res.wsr_max / best : 0.0;
    ratio_sum += ratio;
    ratio_min = std::min(ratio_min, ratio);
  }
  const double mean_ratio = ratio_sum / 50.0;
  c.expect(mean_ratio >= 0.90, "mean ratio " + fmt(mean_ratio) + " below 0.90");
  c.seconds = sw.seconds();
  c.report =
      "mean ratio " + fmt(mean_ratio) + ", worst " + fmt(ratio_min);
  return c;
}

// Criteria 9-11 share one ensemble: 3 strategies x 2 power schemes x 20
// seeds at the small urban size, proportional-fair weights, 12 TS each.
// Every TS allocation is audited as it is produced.
struct Ensemble {
  double mean_gm[3][2] = {};  // [strategy][scheme]
  long audited_ts = 0;
  long violations = 0;
  std::string first_violation;
};

void audit_ts(const TsResult& ts, Strategy strategy, int num_prbs, int mb,
              int mu, Ensemble& e) {
  ++e.audited_ts;
  const auto violate = [&](const std::string& what) {
    ++e.violations;
    if (e.first_violation.empty()) e.first_violation = what;
  };
  const unsigned full = (1u << mu) - 1u;

  // scheduler decision, before zero-rate pruning
  std::vector<int> per_prb(static_cast<std::size_t>(num_prbs), 0);
  for (const auto& [user_prb, mask] : ts.patterns) {
    const int prb = user_prb.second;
    if (prb < 0 || prb >= num_prbs || mask == 0u || mask > full) {
      violate("pattern out of range");
      continue;
    }
    per_prb[static_cast<std::size_t>(prb)] += std::popcount(mask);
    if (strategy == Strategy::CtrOne && mask != 1u)
      violate("single-stream strategy used another mode");
    if (strategy == Strategy::Bd && mask != full)
      violate("all-or-nothing strategy used a partial set");
  }
  for (int prb = 0; prb < num_prbs; ++prb)
    if (per_prb[static_cast<std::size_t>(prb)] > mb)
      violate("more streams than receive antennas");

  // transmitted allocation, after pruning
  std::fill(per_prb.begin(), per_prb.end(), 0);
  for (const StreamAlloc& a : ts.allocation) {
    if (a.prb < 0 || a.prb >= num_prbs || a.stream < 1 || a.stream > mu) {
      violate("allocation out of range");
      continue;
    }
    if (strategy == Strategy::CtrOne && a.stream != 1)
      violate("single-stream strategy transmitted another mode");
    ++per_prb[static_cast<std::size_t>(a.prb)];
  }
  for (int prb = 0; prb < num_prbs; ++prb)
    if (per_prb[static_cast<std::size_t>(prb)] > mb)
      violate("more transmitted streams than receive antennas");
}

Ensemble run_ensemble(const McsTable& table, const FittedRateModel& model) {
  ScenarioConfig sc = ScenarioConfig::uma();
  sc.num_subchannels = 13;
  sc.num_bs_antennas = 16;
  sc.num_user_antennas = 4;
  const int users = 10, horizon = 12, window = 6, seeds = 20;
  const double budget = 5.0;
  const double noise = noise_power_mw(sc);
  const double mbps_per_rate = sc.subchannel_bw_hz / 1e6;
  const Strategy strategies[3] = {Strategy::CtrOne, Strategy::Bd,
                                  Strategy::CtrF};
  const PowerScheme schemes[2] = {PowerScheme::Tpm, PowerScheme::Epm};

  Ensemble e;
  for (int si = 0; si < 3; ++si)
    for (int pi = 0; pi < 2; ++pi) {
      double gm_sum = 0.0;
      for (int rep = 0; rep < seeds; ++rep) {
        const Realization real(sc, users, horizon,
                               1 + static_cast<std::uint64_t>(rep));
        TsChannels ch(users, sc.num_subchannels, sc.num_bs_antennas,
                      sc.num_user_antennas, noise);
        FairnessState fair = make_fairness(users, window);
        std::vector<double> totals(static_cast<std::size_t>(users), 0.0);
        GusParams gp;
        gp.strategy = strategies[si];
        gp.scheme = schemes[pi];

        for (int t = 0; t < horizon; ++t) {
          if (t % sc.block_ts == 0)
            for (int u = 0; u < users; ++u)
              for (int k = 0; k < sc.num_subchannels; ++k)
                ch.set_basis(u, k,
                             stream_basis(real.channel_matrix(u, k, t)));
          const TsResult ts =
              run_gus(ch, fair.weights, budget, gp, table, model);
          audit_ts(ts, strategies[si], sc.num_subchannels, sc.num_bs_antennas,
                   sc.num_user_antennas, e);
          std::vector<double> mbps(static_cast<std::size_t>(users));
          for (int u = 0; u < users; ++u) {
            mbps[static_cast<std::size_t>(u)] =
                ts.user_rates[static_cast<std::size_t>(u)] * mbps_per_rate;
            totals[static_cast<std::size_t>(u)] +=
                mbps[static_cast<std::size_t>(u)];
          }
          update_fairness(fair, mbps);
        }
        gm_sum += geometric_mean(totals);
      }
      e.mean_gm[si][pi] = gm_sum / seeds;
    }
  return e;
}

Criterion crit9_strategy_trend(const Ensemble& e, double ensemble_seconds) {
  Criterion c("strategy dominance trend");
  const double one = e.mean_gm[0][0], bd = e.mean_gm[1][0],
               f = e.mean_gm[2][0];
  c.expect(f >= bd, "any-subset mean below all-or-nothing");
  c.expect(f >= one, "any-subset mean below single-stream");
  c.seconds = ensemble_seconds;
  c.report = "mean gm: ctr_f " + fmt(f) + ", bd " + fmt(bd) + ", ctr_one " +
             fmt(one);
  return c;
}

Criterion crit10_audits(const Ensemble& e) {
  Criterion c("allocation constraint audit");
  c.expect(e.violations == 0,
           std::to_string(e.violations) + " violations, first: " +
               e.first_violation);
  c.report = std::to_string(e.audited_ts) + " allocations audited";
  return c;
}

Criterion crit11_power_trend(const Ensemble& e) {
  Criterion c("power scheme trend");
  const char* names[3] = {"ctr_one", "bd", "ctr_f"};
  double deg[3];
  for (int si = 0; si < 3; ++si) {
    c.expect(e.mean_gm[si][0] >= e.mean_gm[si][1],
             std::string(names[si]) + " gained from equal split");
    deg[si] = e.mean_gm[si][1] / e.mean_gm[si][0];
  }
  c.expect(deg[1] <= deg[0],
           "all-or-nothing lost less than single-stream under equal split");
  c.report = "equal/ladder gm ratios: ctr_one " + fmt(deg[0]) + ", bd " +
             fmt(deg[1]) + ", ctr_f " + fmt(deg[2]);
  return c;
}

Criterion crit12_fairness() {
  Criterion c("fairness mechanics");
  const Stopwatch sw;

  FairnessState st = make_fairness(1, 6);
  st.avg_rate[0] = 5.0;
  st.started = true;
  const std::vector<double> r1 = {11.0};
  update_fairness(st, r1);
  c.expect(st.avg_rate[0] == 6.0, "window-6 recursion off");
  c.expect(st.weights[0] == 1.0 / 6.0, "weight is not the reciprocal");

  FairnessState st4 = make_fairness(1, 4);
  const std::vector<double> seq[] = {{2.0}, {10.0}, {0.0}};
  update_fairness(st4, seq[0]);
  c.expect(st4.avg_rate[0] == 2.0, "first slot did not seed the average");
  update_fairness(st4, seq[1]);
  c.expect(st4.avg_rate[0] == 4.0, "window-4 recursion off");
  update_fairness(st4, seq[2]);
  c.expect(st4.avg_rate[0] == 3.0, "window-4 recursion off at zero rate");

  Rng rng(0x12fa);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 10.0);
    std::vector<double> totals(static_cast<std::size_t>(n));
    long double log_sum = 0.0L;
    for (double& v : totals) {
      v = std::pow(10.0, -3.0 + 6.0 * rng.uniform());
      log_sum += std::log(static_cast<long double>(v));
    }
    const double ref = static_cast<double>(
        std::exp(log_sum / static_cast<long double>(n)));
    const double gm = geometric_mean(totals);
    c.expect(std::abs(gm - ref) <= 1e-12 * ref, "geometric mean drifted");
  }
  const std::vector<double> with_zero = {3.0, 0.0};
  c.expect(geometric_mean(with_zero) == 0.0, "zero total must zero the mean");
  c.seconds = sw.seconds();
  return c;
}

Criterion crit13_end_to_end() {
  Criterion c("end-to-end determinism");
  const Stopwatch sw;
  ExperimentConfig cfg;
  cfg.preset = "uma";
  cfg.scenario = ScenarioConfig::uma();
  cfg.scenario.num_subchannels = 13;
  cfg.strategies = {Strategy::Bd, Strategy::CtrF};
  cfg.schemes = {PowerScheme::Tpm};
  cfg.num_users = {10};
  cfg.mb_values = {16};
  cfg.mu_values = {4};
  cfg.budgets_mw = {5.0};
  cfg.num_realizations = 10;
  cfg.base_seed = 42;
  cfg.horizon_ts = 12;
  cfg.window = 6;
  cfg.jobs = 1;
  c.expect(cfg.validate().empty(), "config does not validate");

  const fs::path base = fs::temp_directory_path() /
                        ("ulrrm_accept_" + std::to_string(::getpid()));
  const fs::path dir_a = base / "a", dir_b = base / "b";
  fs::remove_all(base);

  const Stopwatch run_a;
  const ExperimentOutcome oa = run_experiment(cfg, dir_a.string(), true);
  const double sec_a = run_a.seconds();
  const Stopwatch run_b;
  const ExperimentOutcome ob = run_experiment(cfg, dir_b.string(), true);
  const double sec_b = run_b.seconds();

  c.expect(oa.failed_realizations == 0 && ob.failed_realizations == 0,
           "realizations failed");
  c.expect(sec_a < 600.0 && sec_b < 600.0, "a run took over 10 min");
  for (const char* f :
       {"rates.csv", "summary.json", "histograms.csv", "manifest.json"})
    c.expect(slurp(dir_a / f) == slurp(dir_b / f),
             std::string(f) + " not byte-identical");
  fs::remove_all(base);

  c.seconds = sw.seconds();
  c.report = "runs " + fmt(sec_a, 3) + "s and " + fmt(sec_b, 3) + "s";
  return c;
}

void print(int index, const Criterion& c) {
  std::ostringstream os;
  os << "criterion " << std::setw(2) << index << ": "
     << (c.pass ? "PASS" : "FAIL") << "  " << c.label << " ("
     << std::to_string(c.checks) << " checks, " << fmt(c.seconds, 3) << " s";
  if (!c.report.empty()) os << "; " << c.report;
  os << ")";
  if (!c.pass) os << " - " << c.why;
  std::puts(os.str().c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  const McsTable table = McsTable::default_5g();
  const FittedRateModel model;

  std::vector<Criterion> results;
  results.push_back(crit1_mcs_table());
  print(1, results.back());
  results.push_back(crit2_zf());
  print(2, results.back());
  results.push_back(crit3_monotone());
  print(3, results.back());
  results.push_back(crit4_waterfill());
  print(4, results.back());
  results.push_back(crit5_tpm_bracket());
  print(5, results.back());
  results.push_back(crit6_reuse_equivalence());
  print(6, results.back());
  results.push_back(crit7_reuse_speedup());
  print(7, results.back());
  results.push_back(crit8_tiny_gap());
  print(8, results.back());

  const Stopwatch ensemble_sw;
  const Ensemble ensemble = run_ensemble(table, model);
  const double ensemble_seconds = ensemble_sw.seconds();
  results.push_back(crit9_strategy_trend(ensemble, ensemble_seconds));
  print(9, results.back());
  results.push_back(crit10_audits(ensemble));
  print(10, results.back());
  results.push_back(crit11_power_trend(ensemble));
  print(11, results.back());

  results.push_back(crit12_fairness());
  print(12, results.back());
  results.push_back(crit13_end_to_end());
  print(13, results.back());

  int failed = 0;
  for (const Criterion& c : results)
    if (!c.pass) ++failed;
  std::printf("%d/13 criteria passed\n", 13 - failed);
  return failed == 0 ? 0 : 1;
}
