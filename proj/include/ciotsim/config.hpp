#pragma once

#include <stdexcept>
#include <string>

namespace ciot {

enum class ExplorationMode { Ucbz, EpsilonGreedy };

// Learner hyperparameters.
struct AgentConfig {
    double beta_discount = 0.99;   // discount factor
    double c_prime = 2.5;          // UCB exploration constant
    int kappa_target = 200;        // gradient steps between target-network syncs
    int batch_size = 100;
    int episodes = 2500;
    int h1 = 512;                  // first hidden layer width
    int h2 = 128;                  // second hidden layer width
    double eta0 = 4e-4;            // initial learning rate
    int lr_halve_every = 500;      // episodes between learning-rate halvings
    int replay_episodes = 333;     // replay capacity in episodes (capacity = replay_episodes * T)
    long replay_transitions = 0;   // raw-transition capacity; overrides replay_episodes when > 0
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double leak_alpha = 0.01;      // leaky ReLU slope for x < 0
    ExplorationMode exploration = ExplorationMode::Ucbz;
    double eps_start = 1.0;        // epsilon-greedy schedule (baseline only)
    double eps_end = 0.1;
    double eps_decay_fraction = 0.5;  // fraction of episodes over which epsilon decays
    double ema_weight = 0.05;      // weight of the metrics moving average
};

// Every scalar parameter of the simulated network plus the agent block.
struct Config {
    int T = 30;              // slots per episode
    double tau = 1.0;        // slot duration, seconds
    int L = 26;              // PU-occupied slots per episode
    double P_p = 0.2;        // PU transmit power, W
    double P_s = 0.1;        // CIoT transmit power, W
    double sigma2 = 1e-3;    // channel noise variance
    double W_bw = 1.0;       // licensed bandwidth (normalized)
    double k_share = 2.0;    // bandwidth division factor when sharing
    int M = 5;               // PU catalog size
    int N = 5;               // CIoT catalog size
    int C_s = 4;             // cache capacity, items
    double gamma_p = 0.8;    // PU content Zipf skew
    double gamma_s = 0.6;    // CIoT content Zipf skew
    double lambda_p = 1.0;   // request arrival rates; realized as one request
    double lambda_s = 1.0;   // per user per slot
    double mean_gss = 0.1;   // exponential mean of g_ss
    double mean_gsp = 0.2;   // exponential mean of g_sp (= g_ps)
    double phi = 7.0;        // constraint-violation penalty
    bool cooperative = true;
    double F_size = 1.0;     // content size in rate-units * s
    double D_core = 5.0;     // core-network retrieval delay, s
    double alpha_pl = 4.0;   // path-loss exponent; carried but unused (gains are drawn directly)

    AgentConfig agent;

    void validate() const {
        auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
        if (T < 1) fail("T must be >= 1");
        if (L < 0 || L > T) fail("L must lie in [0, T]");
        if (tau <= 0) fail("tau must be positive");
        if (sigma2 <= 0) fail("sigma2 must be positive");
        if (P_s <= 0) fail("P_s must be positive");
        if (W_bw <= 0) fail("W_bw must be positive");
        if (k_share < 1) fail("k_share must be >= 1");
        if (M < 1 || N < 1) fail("catalog sizes must be >= 1");
        if (M > 63 || N > 63) fail("catalog sizes above 63 are not supported");
        if (C_s < 1) fail("C_s must be >= 1");
        if (C_s > M + N) fail("C_s must not exceed M + N");
        if (cooperative && C_s % 2 != 0) fail("cooperative scheme requires an even C_s");
        if (gamma_p <= 0 || gamma_s <= 0) fail("Zipf skews must be positive");
        if (lambda_p != 1.0 || lambda_s != 1.0)
            fail("arrival rates other than one request per slot are not supported");
        if (mean_gss <= 0 || mean_gsp <= 0) fail("channel gain means must be positive");
        if (phi < 0) fail("phi must be non-negative");
        if (F_size <= 0) fail("F_size must be positive");
        if (D_core < 0) fail("D_core must be non-negative");

        const AgentConfig& a = agent;
        if (a.beta_discount < 0 || a.beta_discount >= 1) fail("discount must lie in [0, 1)");
        if (a.c_prime <= 0) fail("c_prime must be positive");
        if (a.kappa_target < 1) fail("kappa_target must be >= 1");
        if (a.batch_size < 1) fail("batch_size must be >= 1");
        if (a.episodes < 1) fail("episodes must be >= 1");
        if (a.h1 < 1 || a.h2 < 1) fail("hidden layer widths must be >= 1");
        if (a.eta0 <= 0) fail("eta0 must be positive");
        if (a.lr_halve_every < 1) fail("lr_halve_every must be >= 1");
        if (a.replay_transitions < 0) fail("replay_transitions must be >= 0");
        if (a.replay_transitions == 0 && a.replay_episodes < 1)
            fail("replay_episodes must be >= 1");
        if (a.batch_size > replay_capacity())
            fail("batch_size must not exceed the replay capacity");
        if (a.adam_beta1 < 0 || a.adam_beta1 >= 1) fail("adam_beta1 must lie in [0, 1)");
        if (a.adam_beta2 < 0 || a.adam_beta2 >= 1) fail("adam_beta2 must lie in [0, 1)");
        if (a.adam_eps <= 0) fail("adam_eps must be positive");
        if (a.leak_alpha <= 0 || a.leak_alpha >= 1) fail("leak_alpha must lie in (0, 1)");
        if (a.eps_start < 0 || a.eps_start > 1) fail("eps_start must lie in [0, 1]");
        if (a.eps_end < 0 || a.eps_end > 1) fail("eps_end must lie in [0, 1]");
        if (a.eps_decay_fraction <= 0 || a.eps_decay_fraction > 1)
            fail("eps_decay_fraction must lie in (0, 1]");
        if (a.ema_weight <= 0 || a.ema_weight > 1) fail("ema_weight must lie in (0, 1]");
    }

    long replay_capacity() const {
        if (agent.replay_transitions > 0) return agent.replay_transitions;
        return static_cast<long>(agent.replay_episodes) * T;
    }
};

}  // namespace ciot
