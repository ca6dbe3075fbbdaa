#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ciotsim/actions.hpp"
#include "ciotsim/config.hpp"
#include "ciotsim/rng.hpp"

namespace ciot {

struct ChannelGains {
    double g_ss = 0.0;
    double g_sp = 0.0;
    double g_ps = 0.0;  // equal to g_sp by the channel symmetry assumption
};

// The observed per-slot state: current PU occupancy, both users' previous
// request indices, and the current channel power gains.
struct SlotState {
    int omega_p = 0;
    int d_p_prev = 1;
    int d_s_prev = 1;
    ChannelGains gains;
};

// Everything one slot produced, for reward bookkeeping and metrics.
struct SlotOutcome {
    double reward = 0.0;
    double rate_achieved = 0.0;
    bool served_su_from_cache = false;
    bool served_pu_from_cache = false;
    bool offloaded = false;
    double delay = 0.0;
    int d_p_now = 0;
    int d_s_now = 0;
    bool pu_active = false;
};

// g_ss ~ Exp(mean_gss), g_sp ~ Exp(mean_gsp), g_ps = g_sp.
inline ChannelGains sample_gains(Rng& rng, const Config& cfg) {
    ChannelGains g;
    g.g_ss = rng.exponential(cfg.mean_gss);
    g.g_sp = rng.exponential(cfg.mean_gsp);
    g.g_ps = g.g_sp;
    return g;
}

// Binary occupancy vector with exactly L ones, chosen uniformly at random
// without replacement (partial Fisher-Yates over the slot indices).
inline std::vector<std::uint8_t> generate_pu_schedule(Rng& rng, int T, int L) {
    if (T < 1) throw std::invalid_argument("schedule: T must be >= 1");
    if (L < 0 || L > T) throw std::invalid_argument("schedule: L must lie in [0, T]");
    std::vector<int> idx(static_cast<size_t>(T));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::uint8_t> occ(static_cast<size_t>(T), 0);
    for (int i = 0; i < L; ++i) {
        int j = i + rng.uniform_int(T - i);
        std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
        occ[static_cast<size_t>(idx[static_cast<size_t>(i)])] = 1;
    }
    return occ;
}

// p(i) = i^-skew / sum_j j^-skew, i = 1..catalog
inline std::vector<double> zipf_pmf(int catalog, double skew) {
    if (catalog < 1) throw std::invalid_argument("zipf: catalog must be >= 1");
    if (skew <= 0) throw std::invalid_argument("zipf: skew must be positive");
    std::vector<double> p(static_cast<size_t>(catalog));
    double norm = 0.0;
    for (int i = 1; i <= catalog; ++i) {
        double w = std::pow(static_cast<double>(i), -skew);
        p[static_cast<size_t>(i - 1)] = w;
        norm += w;
    }
    for (double& v : p) v /= norm;
    return p;
}

// inverse-CDF draw; returns a 1-based catalog index
inline int sample_request(Rng& rng, const std::vector<double>& pmf) {
    double u = rng.uniform01();
    double cum = 0.0;
    int n = static_cast<int>(pmf.size());
    for (int i = 0; i < n; ++i) {
        cum += pmf[static_cast<size_t>(i)];
        if (u < cum) return i + 1;
    }
    return n;  // guard against accumulated rounding
}

// full-bandwidth rate on an idle channel
inline double rate_r0(double P_s, double g_ss, double sigma2, double W_bw) {
    return W_bw * std::log2(1.0 + P_s * g_ss / sigma2);
}

// shared-bandwidth rate when serving the PU on an occupied channel
inline double rate_r1(double P_s, double g_ss, double sigma2, double W_bw, double k_share) {
    return (W_bw / k_share) * std::log2(1.0 + P_s * g_ss / sigma2);
}

// The per-slot reward rule, applied to realized requests:
//   occupied, sharing, both requests cached -> shared-bandwidth rate
//   idle, own request cached               -> full-bandwidth rate
//   otherwise                              -> -phi
// The sharing branch exists only in the cooperative scheme. Delay follows
// the service path: F_size / rate when served locally, D_core when the
// request has to be fetched from the core network. Local service is capped
// at D_core; a local transfer slower than core retrieval would be offloaded
// in practice, and the uncapped 1/rate has a divergent mean under the
// exponential gain model.
inline SlotOutcome evaluate_slot(bool pu_active, const Action& a, int d_p, int d_s,
                                 const ChannelGains& g, const Config& cfg) {
    SlotOutcome out;
    out.d_p_now = d_p;
    out.d_s_now = d_s;
    out.pu_active = pu_active;

    double rate = 0.0;
    bool pu_branch = false;
    if (pu_active) {
        if (cfg.cooperative && a.I_t && a.caches_pu(d_p) && a.caches_su(d_s)) {
            rate = rate_r1(cfg.P_s, g.g_ss, cfg.sigma2, cfg.W_bw, cfg.k_share);
            pu_branch = true;
        }
    } else {
        if (a.caches_su(d_s)) rate = rate_r0(cfg.P_s, g.g_ss, cfg.sigma2, cfg.W_bw);
    }

    if ((pu_active && !pu_branch) || (!pu_active && !a.caches_su(d_s))) {
        out.reward = -cfg.phi;
    } else {
        out.reward = rate;
    }

    if (out.reward > 0.0) {
        out.rate_achieved = rate;
        out.served_su_from_cache = true;
        out.served_pu_from_cache = pu_branch;
        out.delay = std::min(cfg.F_size / rate, cfg.D_core);
    } else {
        out.rate_achieved = 0.0;
        out.offloaded = true;
        out.delay = cfg.D_core;
    }
    return out;
}

// Time-slotted channel simulator. Slots come in episodes of T; stepping past
// the last slot starts a fresh episode (new occupancy schedule, new gains)
// while the previous-request features carry over, so the state stream never
// breaks.
class Environment {
public:
    Environment(const Config& cfg, Rng rng)
        : cfg_(cfg),
          rng_(rng),
          pmf_pu_(zipf_pmf(cfg.M, cfg.gamma_p)),
          pmf_su_(zipf_pmf(cfg.N, cfg.gamma_s)) {
        cfg_.validate();
        d_p_prev_ = sample_request(rng_, pmf_pu_);
        d_s_prev_ = sample_request(rng_, pmf_su_);
        begin_episode();
    }

    Environment(const Config& cfg, std::uint64_t stream_seed)
        : Environment(cfg, Rng(stream_seed)) {}

    const SlotState& state() const { return state_; }
    const std::vector<std::uint8_t>& schedule() const { return schedule_; }
    int slot() const { return slot_; }
    const Config& config() const { return cfg_; }

    SlotOutcome step(const Action& a) {
        int d_p = sample_request(rng_, pmf_pu_);
        int d_s = sample_request(rng_, pmf_su_);
        SlotOutcome out = evaluate_slot(schedule_[static_cast<size_t>(slot_)] != 0, a, d_p, d_s,
                                        state_.gains, cfg_);
        d_p_prev_ = d_p;
        d_s_prev_ = d_s;
        ++slot_;
        if (slot_ == cfg_.T) {
            begin_episode();
        } else {
            state_.omega_p = schedule_[static_cast<size_t>(slot_)];
            state_.d_p_prev = d_p_prev_;
            state_.d_s_prev = d_s_prev_;
            state_.gains = sample_gains(rng_, cfg_);
        }
        return out;
    }

private:
    void begin_episode() {
        schedule_ = generate_pu_schedule(rng_, cfg_.T, cfg_.L);
        slot_ = 0;
        state_.omega_p = schedule_[0];
        state_.d_p_prev = d_p_prev_;
        state_.d_s_prev = d_s_prev_;
        state_.gains = sample_gains(rng_, cfg_);
    }

    Config cfg_;
    Rng rng_;
    std::vector<double> pmf_pu_, pmf_su_;
    std::vector<std::uint8_t> schedule_;
    SlotState state_;
    int slot_ = 0;
    int d_p_prev_ = 1;
    int d_s_prev_ = 1;
};

}  // namespace ciot
