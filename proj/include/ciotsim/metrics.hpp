#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "ciotsim/env.hpp"

namespace ciot {

// new = (1 - w) * prev + w * value
inline double ema_update(double prev, double value, double w) {
    return (1.0 - w) * prev + w * value;
}

// Exponential moving average that initializes to the first raw value.
class Ema {
public:
    explicit Ema(double w) : w_(w) {}

    double push(double value) {
        v_ = started_ ? ema_update(v_, value, w_) : value;
        started_ = true;
        return v_;
    }

    double value() const { return v_; }
    bool started() const { return started_; }

private:
    double w_;
    double v_ = 0.0;
    bool started_ = false;
};

struct EpisodeSummary {
    double sum_rate = 0.0;
    double mean_delay = 0.0;
    int su_hits = 0;
    int pu_hits = 0;
    int su_requests = 0;
    int pu_requests = 0;

    double su_hit_rate() const {
        return su_requests > 0 ? static_cast<double>(su_hits) / su_requests : 0.0;
    }
    double pu_hit_rate() const {
        return pu_requests > 0 ? static_cast<double>(pu_hits) / pu_requests : 0.0;
    }
};

// Totals over one episode's slot outcomes. Every slot carries one own
// request; PU requests are counted only on PU-active slots.
inline EpisodeSummary episode_summary(std::span<const SlotOutcome> outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("episode_summary: empty episode");
    EpisodeSummary s;
    double delay_total = 0.0;
    for (const SlotOutcome& o : outcomes) {
        s.sum_rate += o.rate_achieved;
        delay_total += o.delay;
        ++s.su_requests;
        if (o.served_su_from_cache) ++s.su_hits;
        if (o.pu_active) {
            ++s.pu_requests;
            if (o.served_pu_from_cache) ++s.pu_hits;
        }
    }
    s.mean_delay = delay_total / static_cast<double>(outcomes.size());
    return s;
}

// One row of the per-episode metrics stream.
struct MetricsRecord {
    int episode = 0;           // 1-based
    double asr_ema = 0.0;      // moving average of the episode sum rate
    double delay_ema = 0.0;    // moving average of the episode mean delay
    double su_hit_rate = 0.0;  // moving average of the own-request hit rate
    double pu_hit_rate = 0.0;  // moving average of the PU-request hit rate
    double raw_episode_sum_rate = 0.0;
    double raw_episode_mean_delay = 0.0;
};

// Folds episode summaries into the smoothed metrics stream.
class MetricsTracker {
public:
    explicit MetricsTracker(double ema_weight)
        : asr_(ema_weight), delay_(ema_weight), su_(ema_weight), pu_(ema_weight) {}

    MetricsRecord push(const EpisodeSummary& s) {
        MetricsRecord r;
        r.episode = ++episode_;
        r.asr_ema = asr_.push(s.sum_rate);
        r.delay_ema = delay_.push(s.mean_delay);
        r.su_hit_rate = su_.push(s.su_hit_rate());
        r.pu_hit_rate = pu_.push(s.pu_hit_rate());
        r.raw_episode_sum_rate = s.sum_rate;
        r.raw_episode_mean_delay = s.mean_delay;
        return r;
    }

private:
    int episode_ = 0;
    Ema asr_, delay_, su_, pu_;
};

}  // namespace ciot
