#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ciotsim/agent.hpp"

namespace ciot {

enum class CatalogTag { Pu, Su };

// Recency-ordered cache of (catalog, item) pairs, most recent first.
class LruCache {
public:
    struct Entry {
        CatalogTag tag;
        int item;
        bool operator==(const Entry&) const = default;
    };

    explicit LruCache(int capacity) : cap_(capacity) {
        if (capacity < 1) throw std::invalid_argument("lru: capacity must be >= 1");
    }

    // Move the requested item to the front, inserting it if absent and
    // evicting the least recently used entry when over capacity.
    void update(CatalogTag tag, int item) {
        Entry e{tag, item};
        auto it = std::find(entries_.begin(), entries_.end(), e);
        if (it != entries_.end()) entries_.erase(it);
        entries_.insert(entries_.begin(), e);
        if (static_cast<int>(entries_.size()) > cap_) entries_.pop_back();
    }

    const std::vector<Entry>& entries() const { return entries_; }
    int capacity() const { return cap_; }
    int size() const { return static_cast<int>(entries_.size()); }

    bool contains(CatalogTag tag, int item) const {
        return std::find(entries_.begin(), entries_.end(), Entry{tag, item}) != entries_.end();
    }

private:
    std::vector<Entry> entries_;
    int cap_;
};

// Greedy projection of the recency state onto the action space: share the
// cache (most recent C_s/2 items of each catalog) when both sides have
// enough history, otherwise keep the whole cache for own content, padding
// with the lowest-index own items until full. Falls back to the other
// family if the preferred one does not exist in the table.
inline const Action& lru_policy_action(const LruCache& cache, const ActionTable& table,
                                       const Config& cfg) {
    const int half = cfg.C_s / 2;
    std::vector<int> pu_recent, su_recent;
    for (const auto& e : cache.entries()) {
        if (e.tag == CatalogTag::Pu) pu_recent.push_back(e.item);
        else su_recent.push_back(e.item);
    }

    auto padded_su = [&](int want) {
        std::vector<int> items(su_recent.begin(),
                               su_recent.begin() + std::min<size_t>(su_recent.size(),
                                                                    static_cast<size_t>(want)));
        for (int i = 1; static_cast<int>(items.size()) < want && i <= cfg.N; ++i)
            if (std::find(items.begin(), items.end(), i) == items.end()) items.push_back(i);
        std::sort(items.begin(), items.end());
        return items;
    };
    auto padded_pu = [&](int want) {
        std::vector<int> items(pu_recent.begin(),
                               pu_recent.begin() + std::min<size_t>(pu_recent.size(),
                                                                    static_cast<size_t>(want)));
        for (int i = 1; static_cast<int>(items.size()) < want && i <= cfg.M; ++i)
            if (std::find(items.begin(), items.end(), i) == items.end()) items.push_back(i);
        std::sort(items.begin(), items.end());
        return items;
    };

    bool want_share = static_cast<int>(pu_recent.size()) >= half &&
                      static_cast<int>(su_recent.size()) >= half && half > 0;
    if (want_share && table.count_share() == 0) want_share = false;
    if (!want_share && table.count_no_share() == 0) want_share = true;

    if (want_share) {
        std::vector<int> bp = padded_pu(half);
        std::vector<int> bs = padded_su(half);
        return table.decode(table.encode(true, bp, bs));
    }
    std::vector<int> bs = padded_su(cfg.C_s);
    return table.decode(table.encode(false, {}, bs));
}

struct LruRunResult {
    std::vector<MetricsRecord> records;
};

// The no-learning caching baseline: project the recency state onto an
// action, step the channel, then record both realized requests.
template <class EnvT>
std::vector<MetricsRecord> run_lru_with_env(const Config& cfg, EnvT& env,
                                            const StepCallback& on_step = {}) {
    ActionTable table = ActionTable::enumerate(cfg.M, cfg.N, cfg.C_s, cfg.cooperative);
    LruCache cache(cfg.C_s);
    MetricsTracker tracker(cfg.agent.ema_weight);
    std::vector<SlotOutcome> outcomes(static_cast<size_t>(cfg.T));
    std::vector<MetricsRecord> records;
    long global_step = 0;

    for (int episode = 1; episode <= cfg.agent.episodes; ++episode) {
        for (int slot = 1; slot <= cfg.T; ++slot) {
            ++global_step;
            StateVec s = encode_state(env.state(), cfg);
            const Action& a = lru_policy_action(cache, table, cfg);
            SlotOutcome out = env.step(a);
            cache.update(CatalogTag::Pu, out.d_p_now);
            cache.update(CatalogTag::Su, out.d_s_now);
            outcomes[static_cast<size_t>(slot - 1)] = out;
            if (on_step) {
                StepInfo info;
                info.global_step = global_step;
                info.episode = episode;
                info.slot = slot;
                info.state = &s;
                info.action_index = a.index;
                info.outcome = &out;
                on_step(info);
            }
        }
        records.push_back(tracker.push(episode_summary(outcomes)));
    }
    return records;
}

enum class Strategy { Ucbz, EpsilonGreedy, NonCooperative, Lru };

inline const char* strategy_id(Strategy s) {
    switch (s) {
        case Strategy::Ucbz: return "ucbz";
        case Strategy::EpsilonGreedy: return "egreedy";
        case Strategy::NonCooperative: return "noncoop";
        case Strategy::Lru: return "lru";
    }
    return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
    if (s == "ucbz") return Strategy::Ucbz;
    if (s == "egreedy") return Strategy::EpsilonGreedy;
    if (s == "noncoop") return Strategy::NonCooperative;
    if (s == "lru") return Strategy::Lru;
    return std::nullopt;
}

// Strategy-specific configuration on top of a shared base.
inline Config apply_strategy(Strategy s, Config cfg) {
    switch (s) {
        case Strategy::Ucbz:
            cfg.agent.exploration = ExplorationMode::Ucbz;
            break;
        case Strategy::EpsilonGreedy:
            cfg.agent.exploration = ExplorationMode::EpsilonGreedy;
            break;
        case Strategy::NonCooperative:
            cfg.cooperative = false;
            cfg.agent.exploration = ExplorationMode::Ucbz;
            break;
        case Strategy::Lru:
            break;
    }
    return cfg;
}

// Runs one strategy for one seed. All strategies derive the environment
// stream identically from the seed, so they see the same schedules, gains
// and requests; policy randomness lives on a separate stream.
inline TrainResult run_strategy(Strategy s, const Config& base, std::uint64_t seed,
                                const StepCallback& on_step = {}) {
    Config cfg = apply_strategy(s, base);
    cfg.validate();
    if (s == Strategy::Lru) {
        Environment env(cfg, Rng(derive_stream_seed(seed, 0)));
        TrainResult res;
        res.records = run_lru_with_env(cfg, env, on_step);
        return res;
    }
    return train(cfg, seed, on_step);
}

}  // namespace ciot
