#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ciotsim/baselines.hpp"
#include "ciotsim/csv.hpp"

namespace ciot {

enum class SweepAxis { None, L, Ps, GammaS };

inline const char* sweep_axis_id(SweepAxis a) {
    switch (a) {
        case SweepAxis::None: return "none";
        case SweepAxis::L: return "L";
        case SweepAxis::Ps: return "P_s";
        case SweepAxis::GammaS: return "gamma_s";
    }
    return "?";
}

// A full experiment: strategies x seeds (x sweep values).
struct ExperimentSpec {
    Config base;
    std::vector<Strategy> strategies{Strategy::Ucbz, Strategy::EpsilonGreedy,
                                     Strategy::NonCooperative, Strategy::Lru};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    SweepAxis axis = SweepAxis::None;
    std::vector<double> values;
    std::string outdir;       // empty = CIOTSIM_OUTDIR or ./results
    int workers = 0;          // 0 = hardware concurrency
    int final_window = 100;   // episodes averaged into the "final" summary values

    void validate() const {
        base.validate();
        if (strategies.empty()) throw std::invalid_argument("spec: no strategies");
        if (seeds.empty()) throw std::invalid_argument("spec: no seeds");
        if (final_window < 1) throw std::invalid_argument("spec: final_window must be >= 1");
        if (axis != SweepAxis::None && values.empty())
            throw std::invalid_argument("spec: sweep axis set but no values");
        if (axis == SweepAxis::None && !values.empty())
            throw std::invalid_argument("spec: sweep values given without an axis");
        for (double v : values) apply_axis(base, axis, v).validate();
    }

    static Config apply_axis(Config cfg, SweepAxis axis, double value) {
        switch (axis) {
            case SweepAxis::None:
                break;
            case SweepAxis::L: {
                double r = std::round(value);
                if (r != value) throw std::invalid_argument("spec: L values must be integers");
                cfg.L = static_cast<int>(r);
                break;
            }
            case SweepAxis::Ps:
                cfg.P_s = value;
                break;
            case SweepAxis::GammaS:
                cfg.gamma_s = value;
                break;
        }
        return cfg;
    }
};

// ------------------------------------------------------------------
// Flat key-value configuration files: one "section.key = value" per
// line, '#' starts a comment, CLI flags override file values.
// ------------------------------------------------------------------

namespace spec_detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cur = trim(cur);
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

inline bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("not a boolean: '" + v + "'");
}

}  // namespace spec_detail

// Applies one configuration assignment; throws on unknown keys or bad values.
inline void apply_kv(ExperimentSpec& spec, const std::string& key, const std::string& value) {
    using spec_detail::parse_bool;
    using spec_detail::split_list;
    Config& c = spec.base;
    AgentConfig& a = c.agent;
    auto d = [&] { return parse_double(value); };
    auto i = [&] { return static_cast<int>(parse_long(value)); };

    if (key == "env.T") c.T = i();
    else if (key == "env.tau") c.tau = d();
    else if (key == "env.L") c.L = i();
    else if (key == "env.P_p") c.P_p = d();
    else if (key == "env.P_s") c.P_s = d();
    else if (key == "env.sigma2") c.sigma2 = d();
    else if (key == "env.W_bw") c.W_bw = d();
    else if (key == "env.k_share") c.k_share = d();
    else if (key == "env.M") c.M = i();
    else if (key == "env.N") c.N = i();
    else if (key == "env.C_s") c.C_s = i();
    else if (key == "env.gamma_p") c.gamma_p = d();
    else if (key == "env.gamma_s") c.gamma_s = d();
    else if (key == "env.lambda_p") c.lambda_p = d();
    else if (key == "env.lambda_s") c.lambda_s = d();
    else if (key == "env.mean_gss") c.mean_gss = d();
    else if (key == "env.mean_gsp") c.mean_gsp = d();
    else if (key == "env.phi") c.phi = d();
    else if (key == "env.cooperative") c.cooperative = parse_bool(value);
    else if (key == "env.F_size") c.F_size = d();
    else if (key == "env.D_core") c.D_core = d();
    else if (key == "env.alpha") c.alpha_pl = d();
    else if (key == "agent.beta") a.beta_discount = d();
    else if (key == "agent.c_prime") a.c_prime = d();
    else if (key == "agent.kappa_target") a.kappa_target = i();
    else if (key == "agent.batch_size") a.batch_size = i();
    else if (key == "agent.episodes") a.episodes = i();
    else if (key == "agent.h1") a.h1 = i();
    else if (key == "agent.h2") a.h2 = i();
    else if (key == "agent.eta0") a.eta0 = d();
    else if (key == "agent.lr_halve_every") a.lr_halve_every = i();
    else if (key == "agent.replay_episodes") a.replay_episodes = i();
    else if (key == "agent.replay_transitions") a.replay_transitions = parse_long(value);
    else if (key == "agent.adam_beta1") a.adam_beta1 = d();
    else if (key == "agent.adam_beta2") a.adam_beta2 = d();
    else if (key == "agent.adam_eps") a.adam_eps = d();
    else if (key == "agent.leak_alpha") a.leak_alpha = d();
    else if (key == "agent.exploration") {
        if (value == "ucbz") a.exploration = ExplorationMode::Ucbz;
        else if (value == "egreedy") a.exploration = ExplorationMode::EpsilonGreedy;
        else throw std::invalid_argument("unknown exploration mode: '" + value + "'");
    }
    else if (key == "agent.eps_start") a.eps_start = d();
    else if (key == "agent.eps_end") a.eps_end = d();
    else if (key == "agent.eps_decay_fraction") a.eps_decay_fraction = d();
    else if (key == "metrics.ema_weight") a.ema_weight = d();
    else if (key == "run.strategies") {
        spec.strategies.clear();
        for (const auto& s : split_list(value)) {
            auto st = parse_strategy(s);
            if (!st) throw std::invalid_argument("unknown strategy: '" + s + "'");
            spec.strategies.push_back(*st);
        }
    }
    else if (key == "run.seeds") {
        spec.seeds.clear();
        for (const auto& s : split_list(value))
            spec.seeds.push_back(static_cast<std::uint64_t>(parse_long(s)));
    }
    else if (key == "run.outdir") spec.outdir = value;
    else if (key == "run.workers") spec.workers = i();
    else if (key == "run.final_window") spec.final_window = i();
    else if (key == "sweep.axis") {
        if (value == "none") spec.axis = SweepAxis::None;
        else if (value == "L") spec.axis = SweepAxis::L;
        else if (value == "P_s") spec.axis = SweepAxis::Ps;
        else if (value == "gamma_s") spec.axis = SweepAxis::GammaS;
        else throw std::invalid_argument("unknown sweep axis: '" + value + "'");
    }
    else if (key == "sweep.values") {
        spec.values.clear();
        for (const auto& s : split_list(value)) spec.values.push_back(parse_double(s));
    }
    else throw std::invalid_argument("unknown configuration key: '" + key + "'");
}

inline void apply_kv_line(ExperimentSpec& spec, const std::string& raw_line, int lineno,
                          const std::string& origin) {
    using spec_detail::trim;
    std::string line = raw_line;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) return;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                    ": expected 'key = value'");
    try {
        apply_kv(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
}

inline ExperimentSpec load_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    ExperimentSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) apply_kv_line(spec, line, ++lineno, path);
    return spec;
}

// Default output directory: CIOTSIM_OUTDIR when set, else ./results.
inline std::string default_outdir() {
    const char* env = std::getenv("CIOTSIM_OUTDIR");
    return env && *env ? env : "results";
}

inline std::string resolved_outdir(const ExperimentSpec& spec) {
    return spec.outdir.empty() ? default_outdir() : spec.outdir;
}

// ------------------------------------------------------------------
// Execution
// ------------------------------------------------------------------

struct RunJob {
    Strategy strategy;
    std::uint64_t seed = 0;
    double axis_value = 0.0;  // meaningful only when spec.axis != None
    Config cfg;
    std::string csv_path;
};

inline std::string training_csv_name(Strategy s, std::uint64_t seed) {
    return "train_" + std::string(strategy_id(s)) + "_seed" + std::to_string(seed) + ".csv";
}

inline std::vector<RunJob> plan_jobs(const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    std::vector<RunJob> jobs;
    std::vector<double> values = spec.axis == SweepAxis::None ? std::vector<double>{0.0}
                                                              : spec.values;
    std::string outdir = resolved_outdir(spec);
    for (double v : values) {
        Config cfg = ExperimentSpec::apply_axis(spec.base, spec.axis, v);
        std::string dir = outdir;
        if (spec.axis != SweepAxis::None)
            dir = (fs::path(outdir) /
                   (std::string(sweep_axis_id(spec.axis)) + "_" + format_double(v))).string();
        for (Strategy s : spec.strategies)
            for (std::uint64_t seed : spec.seeds)
                jobs.push_back({s, seed, v, cfg,
                                (fs::path(dir) / training_csv_name(s, seed)).string()});
    }
    return jobs;
}

// Mean of the metric columns over the trailing window of episodes.
inline SweepRow summarize_run(const RunJob& job, const std::vector<MetricsRecord>& records,
                              int final_window) {
    SweepRow row;
    row.axis_value = job.axis_value;
    row.strategy = strategy_id(job.strategy);
    row.seed = job.seed;
    size_t n = records.size();
    size_t w = std::min<size_t>(static_cast<size_t>(final_window), n);
    for (size_t i = n - w; i < n; ++i) {
        row.final_asr += records[i].asr_ema;
        row.final_delay += records[i].delay_ema;
        row.final_su_hit_rate += records[i].su_hit_rate;
        row.final_pu_hit_rate += records[i].pu_hit_rate;
    }
    row.final_asr /= static_cast<double>(w);
    row.final_delay /= static_cast<double>(w);
    row.final_su_hit_rate /= static_cast<double>(w);
    row.final_pu_hit_rate /= static_cast<double>(w);
    return row;
}

// Runs every job, writing one training CSV per run and, for sweeps, one
// summary CSV. Jobs execute in parallel up to the worker count; outputs are
// byte-deterministic regardless of scheduling because each run owns its file
// and summary rows are emitted in planning order.
inline std::vector<SweepRow> run_experiment(const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    spec.validate();
    std::vector<RunJob> jobs = plan_jobs(spec);
    for (const RunJob& j : jobs) {
        fs::path dir = fs::path(j.csv_path).parent_path();
        if (!dir.empty()) fs::create_directories(dir);
    }

    std::vector<SweepRow> rows(jobs.size());
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mu;

    int workers = spec.workers > 0 ? spec.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, static_cast<int>(jobs.size()));

    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= jobs.size() || failed.load()) return;
            const RunJob& job = jobs[i];
            try {
                TrainResult res = run_strategy(job.strategy, job.cfg, job.seed);
                write_training_csv(job.csv_path, res.records);
                rows[i] = summarize_run(job, res.records, spec.final_window);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!failed.exchange(true)) first_error = e.what();
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error("experiment run failed: " + first_error);

    if (spec.axis != SweepAxis::None) {
        std::string path = (fs::path(resolved_outdir(spec)) /
                            ("sweep_" + std::string(sweep_axis_id(spec.axis)) + ".csv")).string();
        write_sweep_csv(path, rows);
    }
    return rows;
}

}  // namespace ciot
