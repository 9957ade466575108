#include "ulrrm/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ulrrm {
namespace {

constexpr double kSurplusSlack = 1e-12;

// Powers of the capped water-filler, written into `powers`. The level
// sum S(mu) = sum_j clamp(mu - a_j, 0, cap_j) is continuous, piecewise
// linear and nondecreasing in the water level mu, so the exact level is
// found by bisecting its breakpoints and solving the final segment.
void waterfill_powers(std::span<const Slot> slots, double budget_mw,
                      const FittedRateModel& model, const McsTable& table,
                      std::vector<double>& powers) {
  const std::size_t n = slots.size();
  powers.assign(n, 0.0);
  if (n == 0 || !(budget_mw > 0.0)) return;

  std::vector<double> a(n), cap(n);
  double cap_total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double e = slots[j].eff_channel;
    if (!(e > 0.0))
      throw std::invalid_argument("water-filling needs positive effective channels");
    a[j] = 1.0 / (model.d_coeff * e);
    cap[j] = power_cap(e, table);
    cap_total += cap[j];
  }
  if (cap_total <= budget_mw) {
    for (std::size_t j = 0; j < n; ++j) powers[j] = cap[j];
    return;
  }

  std::vector<double> bps;
  bps.reserve(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    bps.push_back(a[j]);
    bps.push_back(a[j] + cap[j]);
  }
  std::sort(bps.begin(), bps.end());

  auto level_sum = [&](double mu) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      s += std::clamp(mu - a[j], 0.0, cap[j]);
    return s;
  };

  // Largest breakpoint whose level sum still fits in the budget.
  std::size_t lo = 0, hi = bps.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (level_sum(bps[mid]) <= budget_mw)
      lo = mid;
    else
      hi = mid;
  }
  double mu = bps[lo];
  const double residual = budget_mw - level_sum(mu);
  if (residual > 0.0) {
    double slope = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (a[j] <= mu && mu < a[j] + cap[j]) slope += 1.0;
    if (slope > 0.0) mu += residual / slope;
  }
  for (std::size_t j = 0; j < n; ++j)
    powers[j] = std::clamp(mu - a[j], 0.0, cap[j]);
}

}  // namespace

std::vector<double> capped_waterfill(std::span<const Slot> slots,
                                     double budget_mw,
                                     const FittedRateModel& model,
                                     const McsTable& table) {
  std::vector<double> powers;
  waterfill_powers(slots, budget_mw, model, table, powers);
  return powers;
}

double waterfill_fitted_sum(std::span<const Slot> slots, double budget_mw,
                            const FittedRateModel& model,
                            const McsTable& table) {
  thread_local std::vector<double> powers;
  waterfill_powers(slots, budget_mw, model, table, powers);
  double sum = 0.0;
  for (std::size_t j = 0; j < slots.size(); ++j)
    sum += fitted_rate(slots[j].eff_channel * powers[j], model);
  return sum;
}

QuantizeResult mcs_quantize_and_pool(std::span<const Slot> slots,
                                     std::span<const double> power_mw,
                                     const McsTable& table) {
  QuantizeResult out;
  out.power_mw.resize(slots.size());
  out.mcs.resize(slots.size());
  for (std::size_t j = 0; j < slots.size(); ++j) {
    const int level = table.mcs_level(slots[j].eff_channel * power_mw[j]);
    // The min() keeps the pooled surplus nonnegative when the threshold
    // power rounds up to just above the water-filled power.
    const double quantized =
        level == 0 ? 0.0
                   : std::min(min_power_for_snr(table.level(level).snr_linear,
                                                slots[j].eff_channel),
                              power_mw[j]);
    out.mcs[j] = level;
    out.power_mw[j] = quantized;
    out.surplus_mw += power_mw[j] - quantized;
  }
  return out;
}

void mcs_greedy_upgrade(std::span<const Slot> slots, QuantizeResult& plan,
                        const McsTable& table) {
  for (;;) {
    int best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    double best_dp = 0.0;
    double best_target = 0.0;
    for (std::size_t j = 0; j < slots.size(); ++j) {
      const int level = plan.mcs[j];
      if (level >= table.num_levels()) continue;
      const double target = min_power_for_snr(
          table.level(level + 1).snr_linear, slots[j].eff_channel);
      const double dp = target - plan.power_mw[j];
      if (dp > plan.surplus_mw + kSurplusSlack) continue;
      const double dr = table.level(level + 1).rate - table.rate_of(level);
      const double score = dp / dr;
      if (score < best_score) {
        best_score = score;
        best = static_cast<int>(j);
        best_dp = dp;
        best_target = target;
      }
    }
    if (best < 0) return;
    // store the threshold itself; adding dp back can round a hair below it
    plan.power_mw[static_cast<std::size_t>(best)] = best_target;
    plan.surplus_mw -= best_dp;
    plan.mcs[static_cast<std::size_t>(best)] += 1;
  }
}

PowerPlan tpm(std::span<const Slot> slots, double budget_mw,
              const FittedRateModel& model, const McsTable& table) {
  const std::vector<double> wf = capped_waterfill(slots, budget_mw, model, table);
  QuantizeResult q = mcs_quantize_and_pool(slots, wf, table);
  mcs_greedy_upgrade(slots, q, table);

  PowerPlan plan;
  plan.power_mw = std::move(q.power_mw);
  plan.mcs = std::move(q.mcs);
  plan.rate.resize(slots.size());
  double spent = 0.0;
  for (std::size_t j = 0; j < slots.size(); ++j) {
    plan.rate[j] = table.rate_of(plan.mcs[j]);
    spent += plan.power_mw[j];
  }
  plan.unspent_mw = budget_mw - spent;
  return plan;
}

PowerPlan epm(std::span<const Slot> slots, double budget_mw,
              const McsTable& table) {
  PowerPlan plan;
  const std::size_t n = slots.size();
  plan.power_mw.assign(n, n == 0 ? 0.0 : budget_mw / static_cast<double>(n));
  plan.mcs.resize(n);
  plan.rate.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    plan.mcs[j] = table.mcs_level(slots[j].eff_channel * plan.power_mw[j]);
    plan.rate[j] = table.rate_of(plan.mcs[j]);
  }
  plan.unspent_mw = 0.0;
  return plan;
}

double epm_fitted_sum(std::span<const Slot> slots, double budget_mw,
                      const FittedRateModel& model) {
  const std::size_t n = slots.size();
  if (n == 0) return 0.0;
  const double p = budget_mw / static_cast<double>(n);
  double sum = 0.0;
  for (const Slot& s : slots) sum += fitted_rate(s.eff_channel * p, model);
  return sum;
}

}  // namespace ulrrm
