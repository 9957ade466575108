#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ulrrm/mcs.hpp"
#include "ulrrm/power.hpp"
#include "ulrrm/zf.hpp"

namespace ulrrm {

enum class Strategy { CtrOne, Bd, CtrF };
enum class PowerScheme { Tpm, Epm };

struct GusParams {
  Strategy strategy = Strategy::CtrF;
  PowerScheme scheme = PowerScheme::Tpm;
  double beta = 1.05;   // stop once best/incumbent ratio decays past this
  bool reuse = true;    // rate-reuse cache for candidate assessment
  bool parallel = false;  // OpenMP over candidates; results are identical
};

// Immutable per-TS input: each user's stream basis on each subchannel.
class TsChannels {
 public:
  TsChannels(int num_users, int num_prbs, int mb, int mu, double noise_mw)
      : num_users_(num_users),
        num_prbs_(num_prbs),
        mb_(mb),
        mu_(mu),
        noise_mw_(noise_mw),
        bases_(static_cast<std::size_t>(num_users) *
               static_cast<std::size_t>(num_prbs)) {}

  void set_basis(int u, int c, StreamBasis basis) {
    bases_[index(u, c)] = std::move(basis);
  }
  const StreamBasis& basis(int u, int c) const { return bases_[index(u, c)]; }

  int num_users() const { return num_users_; }
  int num_prbs() const { return num_prbs_; }
  int mb() const { return mb_; }
  int mu() const { return mu_; }
  double noise_mw() const { return noise_mw_; }

 private:
  std::size_t index(int u, int c) const {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(num_prbs_) +
           static_cast<std::size_t>(c);
  }

  int num_users_, num_prbs_, mb_, mu_;
  double noise_mw_;
  std::vector<StreamBasis> bases_;
};

// One greedy move: grant user `user` stream `stream` on subchannel `prb`.
// Under the all-or-nothing strategy `stream` is 0 and stands for all of the
// user's stream modes at once.
struct Candidate {
  int prb = 0;
  int user = 0;
  int stream = 0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct CommittedMove {
  Candidate cand;
  double wsr = 0.0;
  bool improved_incumbent = false;
};

struct StreamAlloc {
  int user = 0, prb = 0, stream = 0;
  double eff_channel = 0.0;
  double power_mw = 0.0;
  int mcs = 0;
  double rate = 0.0;
};

struct TsResult {
  std::vector<double> user_rates;  // ladder rate summed per user, bits/s/Hz
  double wsr_max = 0.0;            // best fitted weighted sum rate seen
  std::vector<CommittedMove> trajectory;
  std::vector<StreamAlloc> allocation;  // final streams, (user, prb, stream) order
  // Stream-set mask per (user, prb) of the incumbent allocation, bit s-1.
  std::vector<std::pair<std::pair<int, int>, unsigned>> patterns;
  int iterations = 0;
  bool stopped_by_ratio = false;
  std::int64_t zf_assessments = 0;
  std::int64_t waterfill_calls = 0;
  std::int64_t reuse_hits = 0;
};

// Greedy-up stream selection over all subchannels of one TS. Each iteration
// assesses every legal candidate by its hypothetical weighted sum of fitted
// user rates, commits the best one while the incumbent keeps improving or
// the ratio to the incumbent stays within beta, then finalizes with ladder
// power management and zero-rate pruning.
class GusSearch {
 public:
  GusSearch(const TsChannels& ch, std::span<const double> weights,
            double budget_mw, const GusParams& params, const McsTable& table,
            const FittedRateModel& model);

  std::vector<Candidate> enumerate_candidates() const;

  // Hypothetical weighted sum rate if `cand` were committed. -inf when the
  // candidate is infeasible. Pure; ignores the reuse cache.
  double assess_candidate(const Candidate& cand) const;

  // Same value, but consults and refreshes this candidate's cache entry.
  double assess_candidate_with_reuse(const Candidate& cand);

  // Classification relative to the most recently modified subchannel, as a
  // flag set with bit t-1 for type t: 1 same subchannel, 2 candidate user is
  // co-scheduled there, 3 a user co-scheduled there shares the candidate's
  // subchannel, 4 fully detached. 2 and 3 can co-occur; 1 and 4 are
  // exclusive. Empty before the first commit.
  std::optional<unsigned> candidate_type(const Candidate& cand) const;

  struct StepResult {
    bool committed = false;
    bool improved = false;
    Candidate chosen;
    double wsr = 0.0;
  };
  // One greedy iteration. Either commits the best candidate or stops.
  StepResult step();

  bool done() const { return done_; }
  double wsr_max() const { return wsr_max_; }
  double current_wsr() const { return current_wsr_; }
  std::optional<int> reference_prb() const { return ref_prb_; }

  // Restores the incumbent, applies the active power scheme per user,
  // prunes zero-rate streams once and recomputes what that touched.
  TsResult finalize();

  // Committed per-user slots, sorted by (prb, stream).
  const std::vector<Slot>& user_slots(int u) const {
    return users_[static_cast<std::size_t>(u)].slots;
  }
  std::int64_t waterfill_calls() const { return wf_calls_.load(); }
  std::int64_t zf_assessments() const { return zf_assess_.load(); }
  std::int64_t reuse_hits() const { return reuse_hits_.load(); }

  // Hash of the committed search state; equal fingerprints mean equal
  // trajectories regardless of reuse or threading.
  std::uint64_t state_fingerprint() const;

  // Recomputes every cached sum from scratch and compares. Test hook.
  bool check_consistency() const;

 private:
  struct PrbState {
    GramState gram;
    std::uint64_t version = 0;
  };
  struct UserState {
    std::vector<Slot> slots;  // sorted (prb, stream)
    double fitted_sum = 0.0;  // under the active power scheme
    std::uint64_t version = 0;
  };
  struct CoUserSum {
    int user = 0;
    double sum = 0.0;
    std::uint64_t version = 0;
  };
  struct CandCache {
    bool valid = false;
    std::uint64_t prb_version = 0;
    bool feasible = false;
    std::vector<double> gains;  // committed order, then the candidate rows
    bool cand_sum_valid = false;
    double cand_sum = 0.0;
    std::uint64_t cand_user_version = 0;
    std::vector<CoUserSum> co_users;
  };

  std::size_t cand_id(const Candidate& cand) const;
  int rows_per_candidate() const;
  void candidate_rows(const Candidate& cand, Eigen::MatrixXcd& rows) const;
  double rate_sum(std::span<const Slot> slots) const;
  double assess_impl(const Candidate& cand, CandCache* cache) const;
  void commit(const Candidate& cand, double wsr);
  void snapshot_incumbent();

  const TsChannels& ch_;
  std::vector<double> weights_;
  double budget_;
  GusParams params_;
  const McsTable& table_;
  FittedRateModel model_;

  std::vector<PrbState> prbs_;
  std::vector<UserState> users_;
  std::vector<std::uint8_t> selected_;  // [c][u][s-1]
  std::vector<int> user_in_prb_;        // [c][u] stream count

  double wsr_max_ = 0.0;
  double current_wsr_ = 0.0;
  std::optional<int> ref_prb_;
  bool done_ = false;
  bool stopped_by_ratio_ = false;
  int iterations_ = 0;
  std::vector<CommittedMove> trajectory_;
  std::vector<std::vector<StreamRef>> incumbent_;

  mutable std::vector<CandCache> cache_;
  mutable std::atomic<std::int64_t> wf_calls_{0};
  mutable std::atomic<std::int64_t> zf_assess_{0};
  mutable std::atomic<std::int64_t> reuse_hits_{0};
};

TsResult run_gus(const TsChannels& ch, std::span<const double> weights,
                 double budget_mw, const GusParams& params,
                 const McsTable& table, const FittedRateModel& model);

}  // namespace ulrrm
