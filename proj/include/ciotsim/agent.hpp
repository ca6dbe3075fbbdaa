#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "ciotsim/actions.hpp"
#include "ciotsim/config.hpp"
#include "ciotsim/env.hpp"
#include "ciotsim/metrics.hpp"
#include "ciotsim/nn.hpp"
#include "ciotsim/rng.hpp"

namespace ciot {

inline constexpr int kStateDim = 6;
using StateVec = std::array<double, kStateDim>;

// Network input features: occupancy as 0/1, previous request indices
// min-max normalized to [0, 1], channel gains raw.
inline StateVec encode_state(const SlotState& s, const Config& cfg) {
    auto norm = [](int idx, int catalog) {
        return catalog > 1 ? static_cast<double>(idx - 1) / (catalog - 1) : 0.0;
    };
    return {static_cast<double>(s.omega_p),
            norm(s.d_p_prev, cfg.M),
            norm(s.d_s_prev, cfg.N),
            s.gains.g_ps,
            s.gains.g_sp,
            s.gains.g_ss};
}

struct Transition {
    StateVec state{};
    int action_index = 0;
    double reward = 0.0;
    StateVec next_state{};
};

// Fixed-capacity FIFO ring. Mini-batch sampling is permitted only once the
// buffer is full; the training loop acts uniformly at random until then.
class ReplayBuffer {
public:
    explicit ReplayBuffer(long capacity) : cap_(capacity) {
        if (capacity < 1) throw std::invalid_argument("replay: capacity must be >= 1");
        buf_.reserve(static_cast<size_t>(capacity));
    }

    void push(const Transition& t) {
        if (full_) {
            buf_[static_cast<size_t>(next_)] = t;
        } else {
            buf_.push_back(t);
        }
        next_ = (next_ + 1) % cap_;
        if (!full_ && static_cast<long>(buf_.size()) == cap_) full_ = true;
    }

    bool full() const { return full_; }
    long size() const { return static_cast<long>(buf_.size()); }
    long capacity() const { return cap_; }
    const Transition& operator[](long i) const { return buf_[static_cast<size_t>(i)]; }

    // uniform with replacement
    void sample(Rng& rng, int batch, std::vector<const Transition*>& out) const {
        if (!full_) throw std::logic_error("replay: sampling before the buffer is full");
        out.resize(static_cast<size_t>(batch));
        for (int i = 0; i < batch; ++i)
            out[static_cast<size_t>(i)] = &buf_[static_cast<size_t>(rng.uniform_int(
                static_cast<int>(cap_)))];
    }

private:
    std::vector<Transition> buf_;
    long cap_;
    long next_ = 0;
    bool full_ = false;
};

// Per-action selection counts feeding the exploration bonus.
struct ActionStats {
    std::vector<long> counts;
    long total = 0;

    explicit ActionStats(int z) : counts(static_cast<size_t>(z), 0) {}
    void record(int a) {
        ++counts[static_cast<size_t>(a)];
        ++total;
    }
};

struct UcbzParams {
    int M = 5;
    int N = 5;
    double gamma_p = 0.8;
    double gamma_s = 0.6;
    double c_prime = 2.5;
    bool cooperative = true;

    static UcbzParams from(const Config& cfg) {
        return {cfg.M, cfg.N, cfg.gamma_p, cfg.gamma_s, cfg.agent.c_prime, cfg.cooperative};
    }
};

// Exploration bonus per action:
//   bonus_a = sqrt(c' ln t / C_a) / (M^gamma_p * N^gamma_s)
// The M^gamma_p factor is dropped in the non-cooperative scheme, which never
// caches PU content. Never-tried actions get an infinite bonus so each is
// tried once before pure exploitation.
inline std::vector<double> ucbz_bonus(double t_global, std::span<const long> counts,
                                      const UcbzParams& p) {
    if (t_global < 1.0) throw std::invalid_argument("ucbz: t_global must be >= 1");
    double scale = std::pow(static_cast<double>(p.N), p.gamma_s);
    if (p.cooperative) scale *= std::pow(static_cast<double>(p.M), p.gamma_p);
    double ln_t = std::log(t_global);
    std::vector<double> bonus(counts.size());
    for (size_t a = 0; a < counts.size(); ++a) {
        if (counts[a] == 0) {
            bonus[a] = std::numeric_limits<double>::infinity();
        } else {
            bonus[a] = std::sqrt(p.c_prime * ln_t / static_cast<double>(counts[a])) / scale;
        }
    }
    return bonus;
}

namespace detail {
inline int argmax_lowest(std::span<const double> v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[static_cast<size_t>(i)] > v[static_cast<size_t>(best)]) best = i;
    return best;
}
}  // namespace detail

// Action choice for one slot. During replay warm-up every mode acts
// uniformly at random. Ties resolve to the lowest action index.
inline int select_action(std::span<const double> q, const ActionStats& stats,
                         ExplorationMode mode, double epsilon, bool warmup,
                         const UcbzParams& ucbz, Rng& rng) {
    const int z = static_cast<int>(q.size());
    if (warmup) return rng.uniform_int(z);
    if (mode == ExplorationMode::EpsilonGreedy) {
        if (rng.uniform01() < epsilon) return rng.uniform_int(z);
        return detail::argmax_lowest(q);
    }
    std::vector<double> bonus =
        ucbz_bonus(static_cast<double>(stats.total + 1), stats.counts, ucbz);
    int best = 0;
    double best_v = q[0] + bonus[0];
    for (int a = 1; a < z; ++a) {
        double v = q[static_cast<size_t>(a)] + bonus[static_cast<size_t>(a)];
        if (v > best_v) {
            best_v = v;
            best = a;
        }
    }
    return best;
}

// Double-Q targets: y = r + beta * Q_target(s', argmax_a Q_online(s', a)).
// Episodes are fixed-length and the state stream carries across them, so
// every transition bootstraps.
inline std::vector<double> compute_targets(const std::vector<const Transition*>& batch,
                                           const MlpParams& online, const MlpParams& target,
                                           double beta_discount, double alpha_leak) {
    const int B = static_cast<int>(batch.size());
    Mat X(B, kStateDim);
    for (int r = 0; r < B; ++r)
        std::copy(batch[static_cast<size_t>(r)]->next_state.begin(),
                  batch[static_cast<size_t>(r)]->next_state.end(), X.row(r));
    Mat q_online = forward_batch(online, X, alpha_leak);
    Mat q_target = forward_batch(target, X, alpha_leak);
    std::vector<double> y(static_cast<size_t>(B));
    for (int r = 0; r < B; ++r) {
        int a_star = detail::argmax_lowest(
            std::span<const double>(q_online.row(r), static_cast<size_t>(q_online.cols)));
        y[static_cast<size_t>(r)] =
            batch[static_cast<size_t>(r)]->reward + beta_discount * q_target(r, a_star);
    }
    return y;
}

// Linear decay from eps_start to eps_end over the first eps_decay_fraction
// of training, then constant (episode is 0-based).
inline double epsilon_schedule(long episode, const AgentConfig& a) {
    double horizon = a.eps_decay_fraction * static_cast<double>(a.episodes);
    if (horizon <= 0 || static_cast<double>(episode) >= horizon) return a.eps_end;
    return a.eps_start + (a.eps_end - a.eps_start) * (static_cast<double>(episode) / horizon);
}

// Per-step observability hook for tests and tracing.
struct StepInfo {
    long global_step = 0;  // 1-based across episodes
    int episode = 0;       // 1-based
    int slot = 0;          // 1-based within the episode
    const StateVec* state = nullptr;
    int action_index = -1;
    const SlotOutcome* outcome = nullptr;
    bool learned = false;
    bool target_synced = false;
    const MlpParams* online = nullptr;
    const MlpParams* target = nullptr;
};
using StepCallback = std::function<void(const StepInfo&)>;

struct TrainResult {
    MlpParams params;
    std::vector<MetricsRecord> records;
    long first_learn_step = -1;   // 1-based global step of the first gradient update
    int first_learn_episode = -1; // 1-based
    long gradient_steps = 0;
    long target_syncs = 0;
};

// The episodic learning loop: act (uniformly during warm-up, by adjusted
// Q-value after), store the transition, and once the replay buffer is full
// take one mini-batch gradient step per slot, syncing the target network
// every kappa_target updates. Epsilon and the learning rate advance per
// episode.
template <class EnvT>
TrainResult train_with_env(const Config& cfg, EnvT& env, Rng policy_rng,
                           const StepCallback& on_step = {}) {
    const AgentConfig& ag = cfg.agent;
    ActionTable table = ActionTable::enumerate(cfg.M, cfg.N, cfg.C_s, cfg.cooperative);
    const int z = table.size();

    TrainResult res;
    res.params = init_kaiming(policy_rng, {kStateDim, ag.h1, ag.h2, z});
    MlpParams target = res.params;
    AdamState adam(res.params, ag.adam_beta1, ag.adam_beta2, ag.adam_eps);
    ReplayBuffer buffer(cfg.replay_capacity());
    ActionStats stats(z);
    UcbzParams ucbz = UcbzParams::from(cfg);
    MetricsTracker tracker(ag.ema_weight);

    std::vector<const Transition*> batch;
    std::vector<int> batch_actions(static_cast<size_t>(ag.batch_size));
    std::vector<SlotOutcome> outcomes(static_cast<size_t>(cfg.T));
    const std::vector<double> warmup_q(static_cast<size_t>(z), 0.0);
    Mat X(ag.batch_size, kStateDim);
    long global_step = 0;

    for (int episode = 1; episode <= ag.episodes; ++episode) {
        double eta = lr_schedule(episode - 1, ag.eta0, ag.lr_halve_every);
        double eps = epsilon_schedule(episode - 1, ag);

        for (int slot = 1; slot <= cfg.T; ++slot) {
            ++global_step;
            StateVec s = encode_state(env.state(), cfg);
            bool was_full = buffer.full();

            int a;
            if (!was_full) {
                a = select_action(warmup_q, stats, ag.exploration, eps, /*warmup=*/true, ucbz,
                                  policy_rng);
            } else {
                std::vector<double> q = forward(res.params, s, ag.leak_alpha);
                a = select_action(q, stats, ag.exploration, eps, /*warmup=*/false, ucbz,
                                  policy_rng);
            }

            SlotOutcome out = env.step(table[a]);
            StateVec s_next = encode_state(env.state(), cfg);
            buffer.push({s, a, out.reward, s_next});
            stats.record(a);
            outcomes[static_cast<size_t>(slot - 1)] = out;

            bool learned = false, synced = false;
            if (was_full) {
                buffer.sample(policy_rng, ag.batch_size, batch);
                std::vector<double> y =
                    compute_targets(batch, res.params, target, ag.beta_discount, ag.leak_alpha);
                for (int r = 0; r < ag.batch_size; ++r) {
                    std::copy(batch[static_cast<size_t>(r)]->state.begin(),
                              batch[static_cast<size_t>(r)]->state.end(), X.row(r));
                    batch_actions[static_cast<size_t>(r)] =
                        batch[static_cast<size_t>(r)]->action_index;
                }
                ForwardTrace trace;
                Mat q_pred = forward_batch(res.params, X, ag.leak_alpha, &trace);
                LossGrad lg = mse_loss_and_grad(q_pred, batch_actions, y);
                MlpGrads grads = backward(res.params, trace, lg.dQ, ag.leak_alpha);
                adam_step(res.params, grads, adam, eta);
                learned = true;
                ++res.gradient_steps;
                if (res.first_learn_step < 0) {
                    res.first_learn_step = global_step;
                    res.first_learn_episode = episode;
                }
                if (res.gradient_steps % ag.kappa_target == 0) {
                    target = res.params;
                    synced = true;
                    ++res.target_syncs;
                }
            }

            if (on_step) {
                StepInfo info;
                info.global_step = global_step;
                info.episode = episode;
                info.slot = slot;
                info.state = &s;
                info.action_index = a;
                info.outcome = &out;
                info.learned = learned;
                info.target_synced = synced;
                info.online = &res.params;
                info.target = &target;
                on_step(info);
            }
        }
        res.records.push_back(tracker.push(episode_summary(outcomes)));
    }
    return res;
}

inline TrainResult train(const Config& cfg, std::uint64_t seed, const StepCallback& on_step = {}) {
    cfg.validate();
    Environment env(cfg, Rng(derive_stream_seed(seed, 0)));
    return train_with_env(cfg, env, Rng(derive_stream_seed(seed, 1)), on_step);
}

}  // namespace ciot
