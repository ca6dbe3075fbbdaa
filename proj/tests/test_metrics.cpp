#include "doctest.h"

#include <vector>

#include "ciotsim/metrics.hpp"
#include "ciotsim/rng.hpp"

using namespace ciot;

namespace {

SlotOutcome hit_slot(double rate, bool pu_active, bool pu_served) {
    SlotOutcome o;
    o.reward = rate;
    o.rate_achieved = rate;
    o.served_su_from_cache = true;
    o.served_pu_from_cache = pu_served;
    o.delay = 1.0 / rate;
    o.pu_active = pu_active;
    return o;
}

SlotOutcome miss_slot(double d_core, bool pu_active) {
    SlotOutcome o;
    o.reward = -7.0;
    o.offloaded = true;
    o.delay = d_core;
    o.pu_active = pu_active;
    return o;
}

}  // namespace

TEST_CASE("ema update arithmetic") {
    CHECK(ema_update(0.0, 10.0, 0.05) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ema_update(3.0, 9.0, 1.0) == 9.0);  // w = 1 tracks the latest value
    CHECK(ema_update(4.0, 4.0, 0.3) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("ema class: first value initializes, constants are fixed points") {
    Ema e(0.05);
    CHECK(!e.started());
    CHECK(e.push(12.5) == 12.5);
    for (int i = 0; i < 100; ++i) CHECK(e.push(12.5) == 12.5);

    // bounded by historical extremes
    Ema b(0.2);
    Rng rng(6);
    double lo = 1e18, hi = -1e18;
    for (int i = 0; i < 1000; ++i) {
        double v = rng.uniform01() * 10.0 - 5.0;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        double m = b.push(v);
        CHECK(m >= lo);
        CHECK(m <= hi);
    }
}

TEST_CASE("ema converges to the mean of an iid stream") {
    Ema e(0.05);
    Rng rng(11);
    double m = 0.0;
    for (int i = 0; i < 10'000; ++i) m = e.push(rng.uniform01());
    // stationary sd of the EMA is sqrt(w/(2-w)) * sd ~ 0.046
    CHECK(std::abs(m - 0.5) < 0.15);
}

TEST_CASE("episode summary: worst case, best idle case, hand-built trace") {
    std::vector<SlotOutcome> all_pen;
    for (int i = 0; i < 10; ++i) all_pen.push_back(miss_slot(5.0, i < 7));
    EpisodeSummary worst = episode_summary(all_pen);
    CHECK(worst.sum_rate == 0.0);
    CHECK(worst.su_hit_rate() == 0.0);
    CHECK(worst.pu_hit_rate() == 0.0);
    CHECK(worst.mean_delay == 5.0);
    CHECK(worst.su_requests == 10);
    CHECK(worst.pu_requests == 7);

    std::vector<SlotOutcome> all_idle;
    for (int i = 0; i < 10; ++i) all_idle.push_back(hit_slot(2.5, false, false));
    EpisodeSummary best = episode_summary(all_idle);
    CHECK(best.sum_rate == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(best.su_hit_rate() == 1.0);
    CHECK(best.pu_requests == 0);
    CHECK(best.pu_hit_rate() == 0.0);  // no PU request, defined as zero
    CHECK(best.mean_delay == doctest::Approx(0.4).epsilon(1e-12));

    // 5 slots: shared hit at 2, idle hit at 4, miss (PU active), idle hit at 1, miss (idle)
    std::vector<SlotOutcome> mixed{hit_slot(2.0, true, true), hit_slot(4.0, false, false),
                                   miss_slot(5.0, true), hit_slot(1.0, false, false),
                                   miss_slot(5.0, false)};
    EpisodeSummary s = episode_summary(mixed);
    CHECK(s.sum_rate == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(s.su_hits == 3);
    CHECK(s.su_requests == 5);
    CHECK(s.pu_hits == 1);
    CHECK(s.pu_requests == 2);
    CHECK(s.mean_delay == doctest::Approx((0.5 + 0.25 + 5.0 + 1.0 + 5.0) / 5.0).epsilon(1e-12));
    CHECK(s.su_hit_rate() == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(s.pu_hit_rate() == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(episode_summary(std::vector<SlotOutcome>{}), std::invalid_argument);
}

TEST_CASE("metrics tracker: smoothing and raw passthrough") {
    MetricsTracker tr(0.5);
    EpisodeSummary a;
    a.sum_rate = 10.0;
    a.mean_delay = 2.0;
    a.su_hits = 1;
    a.su_requests = 2;
    MetricsRecord r1 = tr.push(a);
    CHECK(r1.episode == 1);
    CHECK(r1.asr_ema == 10.0);  // first value initializes the average
    CHECK(r1.su_hit_rate == 0.5);

    EpisodeSummary b;
    b.sum_rate = 20.0;
    b.mean_delay = 4.0;
    b.su_hits = 2;
    b.su_requests = 2;
    MetricsRecord r2 = tr.push(b);
    CHECK(r2.episode == 2);
    CHECK(r2.asr_ema == doctest::Approx(15.0).epsilon(1e-12));
    CHECK(r2.delay_ema == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r2.su_hit_rate == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(r2.raw_episode_sum_rate == 20.0);
}

TEST_CASE("sum rate equals total reward when no penalty is charged") {
    // with phi = 0 every slot's reward equals its achieved rate
    Config cfg;
    cfg.phi = 0.0;
    cfg.agent.episodes = 4;
    ActionTable table = ActionTable::enumerate(cfg.M, cfg.N, cfg.C_s, cfg.cooperative);
    Environment env(cfg, 15);
    Rng pick(2);
    for (int e = 0; e < 4; ++e) {
        std::vector<SlotOutcome> outcomes;
        double reward_total = 0.0;
        for (int t = 0; t < cfg.T; ++t) {
            SlotOutcome o = env.step(table[pick.uniform_int(table.size())]);
            reward_total += o.reward;
            outcomes.push_back(o);
        }
        EpisodeSummary s = episode_summary(outcomes);
        CHECK(s.sum_rate == doctest::Approx(reward_total).epsilon(1e-12));
    }
}
