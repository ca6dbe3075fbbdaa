#include "doctest.h"

#include <algorithm>
#include <vector>

#include "ciotsim/baselines.hpp"

using namespace ciot;

namespace {

// independent reference: recency list maintained the naive way
struct NaiveLru {
    std::vector<std::pair<int, int>> items;  // (tag, item), most recent first
    int cap;
    explicit NaiveLru(int c) : cap(c) {}
    void update(int tag, int item) {
        std::vector<std::pair<int, int>> next{{tag, item}};
        for (auto& e : items)
            if (!(e.first == tag && e.second == item)) next.push_back(e);
        if (static_cast<int>(next.size()) > cap) next.resize(static_cast<size_t>(cap));
        items = next;
    }
};

}  // namespace

TEST_CASE("lru cache: textbook eviction and reorder-without-evict") {
    LruCache c(2);
    c.update(CatalogTag::Su, 1);
    c.update(CatalogTag::Su, 2);
    c.update(CatalogTag::Su, 3);
    REQUIRE(c.size() == 2);
    CHECK(c.entries()[0] == LruCache::Entry{CatalogTag::Su, 3});
    CHECK(c.entries()[1] == LruCache::Entry{CatalogTag::Su, 2});

    c.update(CatalogTag::Su, 2);  // reorders, evicts nothing
    REQUIRE(c.size() == 2);
    CHECK(c.entries()[0] == LruCache::Entry{CatalogTag::Su, 2});
    CHECK(c.entries()[1] == LruCache::Entry{CatalogTag::Su, 3});

    // PU and SU copies of the same index are distinct entries
    LruCache d(3);
    d.update(CatalogTag::Pu, 1);
    d.update(CatalogTag::Su, 1);
    CHECK(d.size() == 2);
}

TEST_CASE("lru cache matches the naive reference over random request streams") {
    Rng rng(404);
    LruCache c(4);
    NaiveLru ref(4);
    for (int i = 0; i < 10'000; ++i) {
        int tag = rng.uniform_int(2);
        int item = 1 + rng.uniform_int(5);
        c.update(tag == 0 ? CatalogTag::Pu : CatalogTag::Su, item);
        ref.update(tag, item);
        REQUIRE(c.size() == static_cast<int>(ref.items.size()));
        for (int j = 0; j < c.size(); ++j) {
            const auto& e = c.entries()[static_cast<size_t>(j)];
            CHECK((e.tag == CatalogTag::Pu ? 0 : 1) == ref.items[static_cast<size_t>(j)].first);
            CHECK(e.item == ref.items[static_cast<size_t>(j)].second);
        }
    }
}

TEST_CASE("lru projection onto the action table") {
    Config cfg;
    ActionTable table = ActionTable::enumerate(cfg.M, cfg.N, cfg.C_s, cfg.cooperative);

    // recency order PU1, SU2, PU3, SU4 -> share with B_p = {1,3}, B_s = {2,4}
    LruCache cache(4);
    cache.update(CatalogTag::Su, 4);
    cache.update(CatalogTag::Pu, 3);
    cache.update(CatalogTag::Su, 2);
    cache.update(CatalogTag::Pu, 1);
    const Action& a = lru_policy_action(cache, table, cfg);
    CHECK(a.I_t);
    CHECK(a.B_p == std::vector<int>{1, 3});
    CHECK(a.B_s == std::vector<int>{2, 4});

    // cold start: keep the cache for own content, padded with the lowest indices
    LruCache empty(4);
    const Action& cold = lru_policy_action(empty, table, cfg);
    CHECK(!cold.I_t);
    CHECK(cold.B_s == std::vector<int>{1, 2, 3, 4});

    // no PU history at all -> a no-share action
    LruCache su_only(4);
    su_only.update(CatalogTag::Su, 5);
    su_only.update(CatalogTag::Su, 3);
    const Action& own = lru_policy_action(su_only, table, cfg);
    CHECK(!own.I_t);
    CHECK(own.B_s == std::vector<int>{1, 2, 3, 5});  // recent {3,5} plus padding {1,2}

    // single-item catalogs force the lone share action
    Config one;
    one.M = 1;
    one.N = 1;
    one.C_s = 2;
    ActionTable tiny = ActionTable::enumerate(1, 1, 2, true);
    LruCache oc(2);
    const Action& forced = lru_policy_action(oc, tiny, one);
    CHECK(forced.I_t);
    oc.update(CatalogTag::Pu, 1);
    oc.update(CatalogTag::Su, 1);
    CHECK(oc.size() == 2);  // both items cached after two requests
    CHECK(oc.contains(CatalogTag::Pu, 1));
    CHECK(oc.contains(CatalogTag::Su, 1));
}

TEST_CASE("non-cooperative runs never share and never hit the shared-rate branch") {
    Config cfg;
    cfg.agent.episodes = 30;
    cfg.agent.replay_episodes = 5;
    cfg.agent.batch_size = 16;
    cfg.agent.h1 = 8;
    cfg.agent.h2 = 8;

    Config nc_cfg = apply_strategy(Strategy::NonCooperative, cfg);
    ActionTable table = ActionTable::enumerate(nc_cfg.M, nc_cfg.N, nc_cfg.C_s, nc_cfg.cooperative);
    run_strategy(Strategy::NonCooperative, cfg, 9, [&](const StepInfo& info) {
        CHECK(!table[info.action_index].I_t);
        CHECK(!info.outcome->served_pu_from_cache);
        if (info.outcome->pu_active) CHECK(info.outcome->reward == -cfg.phi);
    });
}

TEST_CASE("all strategies see the identical environment stream for a seed") {
    Config cfg;
    cfg.agent.episodes = 12;
    cfg.agent.replay_episodes = 3;
    cfg.agent.batch_size = 8;
    cfg.agent.h1 = 8;
    cfg.agent.h2 = 8;

    struct Trace {
        std::vector<double> gains;
        std::vector<int> requests;
        std::vector<int> occupancy;
    };
    auto capture = [&](Strategy s) {
        Trace t;
        run_strategy(s, cfg, 77, [&](const StepInfo& info) {
            t.gains.push_back((*info.state)[5]);  // g_ss feature
            t.requests.push_back(info.outcome->d_p_now * 100 + info.outcome->d_s_now);
            t.occupancy.push_back(info.outcome->pu_active ? 1 : 0);
        });
        return t;
    };

    Trace ucbz = capture(Strategy::Ucbz);
    for (Strategy s : {Strategy::EpsilonGreedy, Strategy::NonCooperative, Strategy::Lru}) {
        Trace other = capture(s);
        CHECK(ucbz.gains == other.gains);
        CHECK(ucbz.requests == other.requests);
        CHECK(ucbz.occupancy == other.occupancy);
    }
}

TEST_CASE("lru run: cache reflects the most recent distinct requests") {
    Config cfg;
    cfg.agent.episodes = 5;
    ActionTable table = ActionTable::enumerate(cfg.M, cfg.N, cfg.C_s, cfg.cooperative);

    // replay the drives independently to rebuild the expected cache state
    NaiveLru ref(cfg.C_s);
    Environment env(cfg, Rng(derive_stream_seed(123, 0)));
    LruCache cache(cfg.C_s);

    for (int step = 0; step < cfg.agent.episodes * cfg.T; ++step) {
        const Action& a = lru_policy_action(cache, table, cfg);
        SlotOutcome out = env.step(a);
        cache.update(CatalogTag::Pu, out.d_p_now);
        cache.update(CatalogTag::Su, out.d_s_now);
        ref.update(0, out.d_p_now);
        ref.update(1, out.d_s_now);
        REQUIRE(cache.size() == static_cast<int>(ref.items.size()));
        for (int j = 0; j < cache.size(); ++j) {
            const auto& e = cache.entries()[static_cast<size_t>(j)];
            CHECK(e.item == ref.items[static_cast<size_t>(j)].second);
        }
        CHECK(cache.size() <= cfg.C_s);
    }
}

TEST_CASE("strategy ids round-trip") {
    for (Strategy s : {Strategy::Ucbz, Strategy::EpsilonGreedy, Strategy::NonCooperative,
                       Strategy::Lru}) {
        auto parsed = parse_strategy(strategy_id(s));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == s);
    }
    CHECK(!parse_strategy("bogus").has_value());
}
