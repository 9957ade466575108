#include "ulrrm/gus.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <stdexcept>

namespace ulrrm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kNeverVersion = ~std::uint64_t{0};

bool slot_less(const Slot& a, const Slot& b) {
  return a.prb != b.prb ? a.prb < b.prb : a.stream < b.stream;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a_u64(std::uint64_t h, std::uint64_t v) {
  return fnv1a(h, &v, sizeof(v));
}

std::uint64_t fnv1a_f64(std::uint64_t h, double v) {
  return fnv1a_u64(h, std::bit_cast<std::uint64_t>(v));
}

}  // namespace

GusSearch::GusSearch(const TsChannels& ch, std::span<const double> weights,
                     double budget_mw, const GusParams& params,
                     const McsTable& table, const FittedRateModel& model)
    : ch_(ch),
      weights_(weights.begin(), weights.end()),
      budget_(budget_mw),
      params_(params),
      table_(table),
      model_(model) {
  if (static_cast<int>(weights_.size()) != ch_.num_users())
    throw std::invalid_argument("one weight per user required");
  if (!(budget_ > 0.0))
    throw std::invalid_argument("power budget must be positive");

  prbs_.reserve(static_cast<std::size_t>(ch_.num_prbs()));
  for (int c = 0; c < ch_.num_prbs(); ++c)
    prbs_.push_back({GramState(ch_.noise_mw(), ch_.mb()), 0});
  users_.resize(static_cast<std::size_t>(ch_.num_users()));
  selected_.assign(static_cast<std::size_t>(ch_.num_prbs()) *
                       static_cast<std::size_t>(ch_.num_users()) *
                       static_cast<std::size_t>(ch_.mu()),
                   0);
  user_in_prb_.assign(static_cast<std::size_t>(ch_.num_prbs()) *
                          static_cast<std::size_t>(ch_.num_users()),
                      0);
  incumbent_.resize(static_cast<std::size_t>(ch_.num_prbs()));

  std::size_t ids = static_cast<std::size_t>(ch_.num_prbs()) *
                    static_cast<std::size_t>(ch_.num_users());
  if (params_.strategy == Strategy::CtrF)
    ids *= static_cast<std::size_t>(ch_.mu());
  cache_.resize(ids);
}

std::size_t GusSearch::cand_id(const Candidate& cand) const {
  const std::size_t base =
      static_cast<std::size_t>(cand.prb) *
          static_cast<std::size_t>(ch_.num_users()) +
      static_cast<std::size_t>(cand.user);
  if (params_.strategy == Strategy::CtrF)
    return base * static_cast<std::size_t>(ch_.mu()) +
           static_cast<std::size_t>(cand.stream - 1);
  return base;
}

int GusSearch::rows_per_candidate() const {
  return params_.strategy == Strategy::Bd ? ch_.mu() : 1;
}

void GusSearch::candidate_rows(const Candidate& cand,
                               Eigen::MatrixXcd& rows) const {
  const StreamBasis& basis = ch_.basis(cand.user, cand.prb);
  if (params_.strategy == Strategy::Bd) {
    rows.resize(ch_.mu(), ch_.mb());
    for (int s = 1; s <= ch_.mu(); ++s) rows.row(s - 1) = basis.signature(s);
  } else {
    rows.resize(1, ch_.mb());
    rows.row(0) = basis.signature(cand.stream);
  }
}

std::vector<Candidate> GusSearch::enumerate_candidates() const {
  std::vector<Candidate> out;
  const int need = rows_per_candidate();
  for (int c = 0; c < ch_.num_prbs(); ++c) {
    const int free = ch_.mb() - prbs_[static_cast<std::size_t>(c)].gram.count();
    if (free < need) continue;
    for (int u = 0; u < ch_.num_users(); ++u) {
      const std::size_t uc =
          static_cast<std::size_t>(c) * static_cast<std::size_t>(ch_.num_users()) +
          static_cast<std::size_t>(u);
      switch (params_.strategy) {
        case Strategy::CtrOne:
          if (user_in_prb_[uc] == 0) out.push_back({c, u, 1});
          break;
        case Strategy::Bd:
          if (user_in_prb_[uc] == 0) out.push_back({c, u, 0});
          break;
        case Strategy::CtrF:
          for (int s = 1; s <= ch_.mu(); ++s) {
            const std::size_t bit =
                uc * static_cast<std::size_t>(ch_.mu()) +
                static_cast<std::size_t>(s - 1);
            if (!selected_[bit]) out.push_back({c, u, s});
          }
          break;
      }
    }
  }
  return out;
}

double GusSearch::rate_sum(std::span<const Slot> slots) const {
  wf_calls_.fetch_add(1, std::memory_order_relaxed);
  if (params_.scheme == PowerScheme::Tpm)
    return waterfill_fitted_sum(slots, budget_, model_, table_);
  return epm_fitted_sum(slots, budget_, model_);
}

namespace {

// user k's slot list with subchannel-c gains replaced and, if `cand` is
// given, its new slots merged in. `gains` is aligned with `keys` followed by
// the candidate's rows.
void build_hyp_slots(const std::vector<Slot>& committed, int c,
                     const std::vector<StreamRef>& keys,
                     const std::vector<double>& gains, int k,
                     const Candidate* cand, int mu, Strategy strategy,
                     std::vector<Slot>& out) {
  out.clear();
  out.reserve(committed.size() + static_cast<std::size_t>(mu));
  for (const Slot& s : committed) {
    Slot t = s;
    if (s.prb == c) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (keys[i].user == k && keys[i].stream == s.stream) {
          t.eff_channel = gains[i];
          break;
        }
      }
    }
    out.push_back(t);
  }
  if (cand) {
    const std::size_t n0 = keys.size();
    const int first = strategy == Strategy::Bd ? 1 : cand->stream;
    const int count = strategy == Strategy::Bd ? mu : 1;
    for (int i = 0; i < count; ++i) {
      Slot ns{c, first + i, gains[n0 + static_cast<std::size_t>(i)]};
      auto pos = std::lower_bound(out.begin(), out.end(), ns, slot_less);
      out.insert(pos, ns);
    }
  }
}

}  // namespace

double GusSearch::assess_impl(const Candidate& cand, CandCache* cache) const {
  const int c = cand.prb;
  const int u = cand.user;
  const PrbState& pst = prbs_[static_cast<std::size_t>(c)];
  const std::vector<StreamRef>& keys = pst.gram.keys();

  thread_local std::vector<double> fresh_gains;
  thread_local std::vector<CoUserSum> local_co;
  const std::vector<double>* gains = nullptr;
  std::vector<CoUserSum>* co = nullptr;
  bool feasible = false;

  if (cache && cache->valid && cache->prb_version == pst.version) {
    feasible = cache->feasible;
    gains = &cache->gains;
    co = &cache->co_users;
    reuse_hits_.fetch_add(1, std::memory_order_relaxed);
  } else {
    thread_local Eigen::MatrixXcd rows;
    candidate_rows(cand, rows);
    zf_assess_.fetch_add(1, std::memory_order_relaxed);
    feasible = pst.gram.assess_add(rows, fresh_gains);

    auto fill_co = [&](std::vector<CoUserSum>& list) {
      list.clear();
      thread_local std::vector<int> ids;
      ids.clear();
      for (const StreamRef& k : keys)
        if (k.user != u) ids.push_back(k.user);
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      for (int k : ids) list.push_back({k, 0.0, kNeverVersion});
    };

    if (cache) {
      cache->valid = true;
      cache->prb_version = pst.version;
      cache->feasible = feasible;
      cache->gains = feasible ? fresh_gains : std::vector<double>{};
      cache->cand_sum_valid = false;
      cache->co_users.clear();
      if (feasible) fill_co(cache->co_users);
      gains = &cache->gains;
      co = &cache->co_users;
    } else {
      if (feasible) fill_co(local_co);
      gains = &fresh_gains;
      co = &local_co;
    }
  }
  if (!feasible) return kNegInf;

  thread_local std::vector<Slot> hyp;

  double cand_sum;
  if (cache && cache->cand_sum_valid &&
      cache->cand_user_version == users_[static_cast<std::size_t>(u)].version) {
    cand_sum = cache->cand_sum;
  } else {
    build_hyp_slots(users_[static_cast<std::size_t>(u)].slots, c, keys, *gains,
                    u, &cand, ch_.mu(), params_.strategy, hyp);
    cand_sum = rate_sum(hyp);
    if (cache) {
      cache->cand_sum = cand_sum;
      cache->cand_user_version = users_[static_cast<std::size_t>(u)].version;
      cache->cand_sum_valid = true;
    }
  }

  for (CoUserSum& e : *co) {
    if (e.version != users_[static_cast<std::size_t>(e.user)].version) {
      build_hyp_slots(users_[static_cast<std::size_t>(e.user)].slots, c, keys,
                      *gains, e.user, nullptr, ch_.mu(), params_.strategy, hyp);
      e.sum = rate_sum(hyp);
      e.version = users_[static_cast<std::size_t>(e.user)].version;
    }
  }

  // Fixed accumulation order keeps the value independent of cache state.
  double wsr = 0.0;
  std::size_t ci = 0;
  for (int v = 0; v < ch_.num_users(); ++v) {
    double s;
    if (v == u) {
      s = cand_sum;
    } else if (ci < co->size() && (*co)[ci].user == v) {
      s = (*co)[ci].sum;
      ++ci;
    } else {
      s = users_[static_cast<std::size_t>(v)].fitted_sum;
    }
    wsr += weights_[static_cast<std::size_t>(v)] * s;
  }
  return wsr;
}

double GusSearch::assess_candidate(const Candidate& cand) const {
  return assess_impl(cand, nullptr);
}

double GusSearch::assess_candidate_with_reuse(const Candidate& cand) {
  return assess_impl(cand, &cache_[cand_id(cand)]);
}

std::optional<unsigned> GusSearch::candidate_type(const Candidate& cand) const {
  if (!ref_prb_) return std::nullopt;
  const int rc = *ref_prb_;
  if (cand.prb == rc) return 1u << 0;
  const std::size_t stride = static_cast<std::size_t>(ch_.num_users());
  auto in_ref = [&](int user) {
    return user_in_prb_[static_cast<std::size_t>(rc) * stride +
                        static_cast<std::size_t>(user)] > 0;
  };
  unsigned mask = 0;
  if (in_ref(cand.user)) mask |= 1u << 1;
  for (const StreamRef& k : prbs_[static_cast<std::size_t>(cand.prb)].gram.keys())
    if (in_ref(k.user)) {
      mask |= 1u << 2;
      break;
    }
  return mask == 0 ? 1u << 3 : mask;
}

void GusSearch::commit(const Candidate& cand, double wsr) {
  const int c = cand.prb;
  const int u = cand.user;
  PrbState& pst = prbs_[static_cast<std::size_t>(c)];
  const std::size_t n0 = pst.gram.keys().size();

  Eigen::MatrixXcd rows;
  candidate_rows(cand, rows);
  for (int i = 0; i < static_cast<int>(rows.rows()); ++i) {
    const int s = params_.strategy == Strategy::Bd ? i + 1 : cand.stream;
    if (!pst.gram.add({u, s}, rows.row(i)))
      throw std::logic_error("committing a candidate that assessed feasible failed");
    selected_[(static_cast<std::size_t>(c) *
                   static_cast<std::size_t>(ch_.num_users()) +
               static_cast<std::size_t>(u)) *
                  static_cast<std::size_t>(ch_.mu()) +
              static_cast<std::size_t>(s - 1)] = 1;
  }
  user_in_prb_[static_cast<std::size_t>(c) *
                   static_cast<std::size_t>(ch_.num_users()) +
               static_cast<std::size_t>(u)] +=
      static_cast<int>(rows.rows());
  pst.version += 1;
  ref_prb_ = c;

  const std::vector<StreamRef>& keys = pst.gram.keys();
  const std::vector<double>& gains = pst.gram.gains();

  std::vector<int> affected;
  for (const StreamRef& k : keys) affected.push_back(k.user);
  std::sort(affected.begin(), affected.end());
  affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

  for (int k : affected) {
    UserState& us = users_[static_cast<std::size_t>(k)];
    for (Slot& s : us.slots) {
      if (s.prb != c) continue;
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (keys[i].user == k && keys[i].stream == s.stream) {
          s.eff_channel = gains[i];
          break;
        }
      }
    }
    if (k == u) {
      for (std::size_t i = n0; i < keys.size(); ++i) {
        Slot ns{c, keys[i].stream, gains[i]};
        auto pos = std::lower_bound(us.slots.begin(), us.slots.end(), ns,
                                    slot_less);
        us.slots.insert(pos, ns);
      }
    }
    us.fitted_sum = rate_sum(us.slots);
    us.version += 1;
  }
  current_wsr_ = wsr;
}

void GusSearch::snapshot_incumbent() {
  for (int c = 0; c < ch_.num_prbs(); ++c)
    incumbent_[static_cast<std::size_t>(c)] =
        prbs_[static_cast<std::size_t>(c)].gram.keys();
}

GusSearch::StepResult GusSearch::step() {
  StepResult out;
  if (done_) return out;

  const std::vector<Candidate> cands = enumerate_candidates();
  if (cands.empty()) {
    done_ = true;
    return out;
  }

  std::vector<double> vals(cands.size(), kNegInf);
  const int n = static_cast<int>(cands.size());
  if (params_.reuse) {
    if (params_.parallel) {
#pragma omp parallel for schedule(dynamic, 8)
      for (int i = 0; i < n; ++i)
        vals[static_cast<std::size_t>(i)] =
            assess_candidate_with_reuse(cands[static_cast<std::size_t>(i)]);
    } else {
      for (int i = 0; i < n; ++i)
        vals[static_cast<std::size_t>(i)] =
            assess_candidate_with_reuse(cands[static_cast<std::size_t>(i)]);
    }
  } else {
    if (params_.parallel) {
#pragma omp parallel for schedule(dynamic, 8)
      for (int i = 0; i < n; ++i)
        vals[static_cast<std::size_t>(i)] =
            assess_candidate(cands[static_cast<std::size_t>(i)]);
    } else {
      for (int i = 0; i < n; ++i)
        vals[static_cast<std::size_t>(i)] =
            assess_candidate(cands[static_cast<std::size_t>(i)]);
    }
  }

  // First maximum wins; enumeration order is (prb, user, stream) ascending.
  int best = -1;
  double best_wsr = kNegInf;
  for (int i = 0; i < n; ++i) {
    if (vals[static_cast<std::size_t>(i)] > best_wsr) {
      best_wsr = vals[static_cast<std::size_t>(i)];
      best = i;
    }
  }
  if (best < 0 || !(best_wsr > kNegInf)) {
    done_ = true;
    return out;
  }

  const Candidate& chosen = cands[static_cast<std::size_t>(best)];
  ++iterations_;
  if (best_wsr > wsr_max_) {
    commit(chosen, best_wsr);
    wsr_max_ = best_wsr;
    snapshot_incumbent();
    trajectory_.push_back({chosen, best_wsr, true});
    out = {true, true, chosen, best_wsr};
    return out;
  }
  if (wsr_max_ / best_wsr <= params_.beta) {
    commit(chosen, best_wsr);
    trajectory_.push_back({chosen, best_wsr, false});
    out = {true, false, chosen, best_wsr};
    return out;
  }
  done_ = true;
  stopped_by_ratio_ = true;
  out.chosen = chosen;
  out.wsr = best_wsr;
  return out;
}

TsResult GusSearch::finalize() {
  const int num_users = ch_.num_users();
  const int num_prbs = ch_.num_prbs();

  TsResult res;
  res.wsr_max = wsr_max_;
  res.trajectory = trajectory_;
  res.iterations = iterations_;
  res.stopped_by_ratio = stopped_by_ratio_;

  // Rebuild every subchannel at the incumbent. Replaying the commit order
  // reproduces the search-time Gram states exactly, including past any
  // later ratio-tolerated commits that did not improve the incumbent.
  std::vector<GramState> grams;
  grams.reserve(static_cast<std::size_t>(num_prbs));
  for (int c = 0; c < num_prbs; ++c) {
    GramState g(ch_.noise_mw(), ch_.mb());
    const std::vector<StreamRef>& keys = incumbent_[static_cast<std::size_t>(c)];
    Eigen::MatrixXcd rows(static_cast<int>(keys.size()), ch_.mb());
    for (std::size_t i = 0; i < keys.size(); ++i)
      rows.row(static_cast<int>(i)) =
          ch_.basis(keys[i].user, c).signature(keys[i].stream);
    if (!g.rebuild(keys, rows))
      throw std::logic_error("incumbent replay hit a singular Gram matrix");
    grams.push_back(std::move(g));
  }

  std::map<std::pair<int, int>, unsigned> patterns;  // (user, prb) -> mask
  for (int c = 0; c < num_prbs; ++c)
    for (const StreamRef& k : grams[static_cast<std::size_t>(c)].keys())
      patterns[{k.user, c}] |= 1u << (k.stream - 1);
  res.patterns.assign(patterns.begin(), patterns.end());

  auto collect_slots = [&](int u, std::vector<Slot>& out) {
    out.clear();
    for (int c = 0; c < num_prbs; ++c) {
      const GramState& g = grams[static_cast<std::size_t>(c)];
      for (std::size_t i = 0; i < g.keys().size(); ++i)
        if (g.keys()[i].user == u)
          out.push_back({c, g.keys()[i].stream, g.gains()[i]});
    }
    std::sort(out.begin(), out.end(), slot_less);
  };

  auto make_plan = [&](const std::vector<Slot>& slots) {
    return params_.scheme == PowerScheme::Tpm
               ? tpm(slots, budget_, model_, table_)
               : epm(slots, budget_, table_);
  };

  std::vector<std::vector<Slot>> slots(static_cast<std::size_t>(num_users));
  std::vector<PowerPlan> plans(static_cast<std::size_t>(num_users));
  for (int u = 0; u < num_users; ++u) {
    collect_slots(u, slots[static_cast<std::size_t>(u)]);
    plans[static_cast<std::size_t>(u)] =
        make_plan(slots[static_cast<std::size_t>(u)]);
  }

  // One pruning pass: drop zero-rate streams, redo ZF where something was
  // dropped and redo power for every user those subchannels touch. Zero-rate
  // slots that appear after this second power pass stay allocated.
  std::vector<std::uint8_t> removed(
      static_cast<std::size_t>(num_prbs) * static_cast<std::size_t>(num_users) *
          static_cast<std::size_t>(ch_.mu()),
      0);
  auto removed_bit = [&](int c, int u, int s) -> std::uint8_t& {
    return removed[(static_cast<std::size_t>(c) *
                        static_cast<std::size_t>(num_users) +
                    static_cast<std::size_t>(u)) *
                       static_cast<std::size_t>(ch_.mu()) +
                   static_cast<std::size_t>(s - 1)];
  };

  std::vector<std::uint8_t> prb_touched(static_cast<std::size_t>(num_prbs), 0);
  bool any_removed = false;
  for (int u = 0; u < num_users; ++u) {
    const auto& sl = slots[static_cast<std::size_t>(u)];
    const auto& plan = plans[static_cast<std::size_t>(u)];
    for (std::size_t j = 0; j < sl.size(); ++j) {
      if (plan.mcs[j] == 0) {
        removed_bit(sl[j].prb, u, sl[j].stream) = 1;
        prb_touched[static_cast<std::size_t>(sl[j].prb)] = 1;
        any_removed = true;
      }
    }
  }

  if (any_removed) {
    std::vector<std::uint8_t> user_touched(static_cast<std::size_t>(num_users),
                                           0);
    for (int c = 0; c < num_prbs; ++c) {
      if (!prb_touched[static_cast<std::size_t>(c)]) continue;
      std::vector<StreamRef> keep;
      for (const StreamRef& k : incumbent_[static_cast<std::size_t>(c)]) {
        user_touched[static_cast<std::size_t>(k.user)] = 1;
        if (!removed_bit(c, k.user, k.stream)) keep.push_back(k);
      }
      Eigen::MatrixXcd rows(static_cast<int>(keep.size()), ch_.mb());
      for (std::size_t i = 0; i < keep.size(); ++i)
        rows.row(static_cast<int>(i)) =
            ch_.basis(keep[i].user, c).signature(keep[i].stream);
      GramState g(ch_.noise_mw(), ch_.mb());
      if (!g.rebuild(keep, rows))
        throw std::logic_error("pruned subchannel rebuild hit a singular Gram");
      grams[static_cast<std::size_t>(c)] = std::move(g);
    }
    for (int u = 0; u < num_users; ++u) {
      if (!user_touched[static_cast<std::size_t>(u)]) continue;
      collect_slots(u, slots[static_cast<std::size_t>(u)]);
      plans[static_cast<std::size_t>(u)] =
          make_plan(slots[static_cast<std::size_t>(u)]);
    }
  }

  res.user_rates.assign(static_cast<std::size_t>(num_users), 0.0);
  for (int u = 0; u < num_users; ++u) {
    const auto& sl = slots[static_cast<std::size_t>(u)];
    const auto& plan = plans[static_cast<std::size_t>(u)];
    for (std::size_t j = 0; j < sl.size(); ++j) {
      res.user_rates[static_cast<std::size_t>(u)] += plan.rate[j];
      res.allocation.push_back({u, sl[j].prb, sl[j].stream, sl[j].eff_channel,
                                plan.power_mw[j], plan.mcs[j], plan.rate[j]});
    }
  }

  res.zf_assessments = zf_assess_.load();
  res.waterfill_calls = wf_calls_.load();
  res.reuse_hits = reuse_hits_.load();
  return res;
}

std::uint64_t GusSearch::state_fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a_u64(h, static_cast<std::uint64_t>(iterations_));
  h = fnv1a_f64(h, wsr_max_);
  h = fnv1a_f64(h, current_wsr_);
  h = fnv1a(h, selected_.data(), selected_.size());
  for (const UserState& us : users_) {
    h = fnv1a_u64(h, us.slots.size());
    for (const Slot& s : us.slots) {
      h = fnv1a_u64(h, static_cast<std::uint64_t>(s.prb));
      h = fnv1a_u64(h, static_cast<std::uint64_t>(s.stream));
      h = fnv1a_f64(h, s.eff_channel);
    }
    h = fnv1a_f64(h, us.fitted_sum);
  }
  for (const PrbState& p : prbs_)
    for (double g : p.gram.gains()) h = fnv1a_f64(h, g);
  return h;
}

bool GusSearch::check_consistency() const {
  for (int u = 0; u < ch_.num_users(); ++u) {
    const UserState& us = users_[static_cast<std::size_t>(u)];
    if (rate_sum(us.slots) != us.fitted_sum) return false;
    for (const Slot& s : us.slots) {
      const PrbState& p = prbs_[static_cast<std::size_t>(s.prb)];
      bool found = false;
      for (std::size_t i = 0; i < p.gram.keys().size(); ++i) {
        if (p.gram.keys()[i].user == u && p.gram.keys()[i].stream == s.stream) {
          if (p.gram.gains()[i] != s.eff_channel) return false;
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
  }
  double wsr = 0.0;
  for (int v = 0; v < ch_.num_users(); ++v)
    wsr += weights_[static_cast<std::size_t>(v)] *
           users_[static_cast<std::size_t>(v)].fitted_sum;
  return iterations_ == 0 || wsr == current_wsr_;
}

TsResult run_gus(const TsChannels& ch, std::span<const double> weights,
                 double budget_mw, const GusParams& params,
                 const McsTable& table, const FittedRateModel& model) {
  GusSearch search(ch, weights, budget_mw, params, table, model);
  while (!search.done()) search.step();
  return search.finalize();
}

}  // namespace ulrrm
