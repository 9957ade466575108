#pragma once

#include <span>
#include <vector>

#include "ulrrm/mcs.hpp"

namespace ulrrm {

// One scheduled (subchannel, stream) position of a user within a TS,
// together with its zero-forcing effective channel.
struct Slot {
  int prb = 0;
  int stream = 0;        // 1-based
  double eff_channel = 0.0;

  friend bool operator==(const Slot&, const Slot&) = default;
};

// Water-filling against the fitted rate over one user's slots, with each
// power clipped to that slot's ladder cap. Spends min(budget, sum of caps).
// Slots must carry positive effective channels; keep them sorted by
// (prb, stream) so downstream sums are reproducible.
std::vector<double> capped_waterfill(std::span<const Slot> slots,
                                     double budget_mw,
                                     const FittedRateModel& model,
                                     const McsTable& table);

// Sum of fitted rates under the capped water-filling allocation. Same
// arithmetic as capped_waterfill, without materializing the plan.
double waterfill_fitted_sum(std::span<const Slot> slots, double budget_mw,
                            const FittedRateModel& model,
                            const McsTable& table);

struct QuantizeResult {
  std::vector<double> power_mw;  // per slot, reduced to its MCS threshold
  std::vector<int> mcs;          // attained level per slot, 0 = off
  double surplus_mw = 0.0;       // pooled power freed by the reduction
};

// Reduces each slot's power to the exact threshold of the MCS level it
// reaches and pools the freed power.
QuantizeResult mcs_quantize_and_pool(std::span<const Slot> slots,
                                     std::span<const double> power_mw,
                                     const McsTable& table);

// Spends pooled surplus on single-level upgrades, each time taking the
// affordable upgrade with the smallest power-per-rate increment; ties go to
// the smallest (prb, stream). Mutates the quantized plan in place.
void mcs_greedy_upgrade(std::span<const Slot> slots, QuantizeResult& plan,
                        const McsTable& table);

struct PowerPlan {
  std::vector<double> power_mw;
  std::vector<int> mcs;
  std::vector<double> rate;  // ladder rate per slot
  double unspent_mw = 0.0;
};

// Throughput-oriented management: water-fill, quantize to ladder
// thresholds, then greedily upgrade from the pooled surplus.
PowerPlan tpm(std::span<const Slot> slots, double budget_mw,
              const FittedRateModel& model, const McsTable& table);

// Equal-power management: budget_mw / n on each slot, no reuse of headroom.
PowerPlan epm(std::span<const Slot> slots, double budget_mw,
              const McsTable& table);

// Sum of fitted rates under the equal split, used by the search when EPM is
// the active scheme.
double epm_fitted_sum(std::span<const Slot> slots, double budget_mw,
                      const FittedRateModel& model);

}  // namespace ulrrm
