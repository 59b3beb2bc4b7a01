#include "dhsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "dhsim/estimators.hpp"
#include "dhsim/policies.hpp"
#include "dhsim/stats.hpp"

namespace dhsim {

double episode_aggregate_delay(const InFlightFetch& fetch) {
    double d = fetch.completion_ms - fetch.start_ms;
    for (TimeMs t : fetch.queued_requests) d += fetch.completion_ms - t;
    return d;
}

double latency_improvement(double latency_lru_ms, double latency_a_ms) {
    if (!(latency_lru_ms > 0.0)) throw ConfigError("zero baseline latency");
    return (latency_lru_ms - latency_a_ms) / latency_lru_ms;
}

double miss_latency_for(std::uint64_t size_bytes, double base_ms, double per_byte_ms,
                        bool stochastic, Rng& rng) {
    const double mean = base_ms + per_byte_ms * static_cast<double>(size_bytes);
    if (!(mean > 0.0)) throw ConfigError("miss latency must be positive");
    if (!stochastic) return mean;
    return rng.exponential(mean);
}

namespace {

// Per-object history the ranking policies feed on.
struct ObjectTracker {
    double agg_delay_ewma = 0.0;
    bool ewma_initialized = false;
    WelfordStats episode_stats;
};

struct PendingCompletion {
    TimeMs time;
    std::uint64_t seq;  // schedule order, breaks completion-time ties
    bool operator>(const PendingCompletion& other) const {
        if (time != other.time) return time > other.time;
        return seq > other.seq;
    }
};

class Simulation {
public:
    Simulation(const ValidatedTrace& trace, const CacheConfig& config)
        : trace_(trace),
          config_(config),
          rng_(config.rng_seed),
          window_(config.window_size),
          params_{config.omega, config.cala_weight} {
        for (const auto& e : trace_.events()) sizes_.emplace(e.object, e.size_bytes);
    }

    SimReport run() {
        for (const TraceEvent& event : trace_.events()) {
            drain_completions_until(event.time_ms);
            process_arrival(event);
        }
        drain_completions_until(std::numeric_limits<double>::infinity());
        return finish();
    }

private:
    void process_arrival(const TraceEvent& event) {
        window_.record_arrival(event.time_ms, event.object);
        if (resident_.count(event.object)) {
            ++report_.hits;
            return;
        }
        if (auto it = in_flight_.find(event.object); it != in_flight_.end()) {
            ++report_.delayed_hits;
            report_.total_latency_ms += it->second.completion_ms - event.time_ms;
            it->second.queued_requests.push_back(event.time_ms);
            return;
        }
        ++report_.misses;
        const double z = miss_latency_for(event.size_bytes, config_.latency.base_ms,
                                          config_.latency.per_byte_ms,
                                          config_.latency.kind == LatencyKind::Exponential, rng_);
        report_.total_latency_ms += z;
        InFlightFetch fetch{event.object, event.time_ms, event.time_ms + z, {}};
        schedule_.push({fetch.completion_ms, schedule_seq_});
        scheduled_object_[schedule_seq_] = event.object;
        ++schedule_seq_;
        in_flight_.emplace(event.object, std::move(fetch));
    }

    void drain_completions_until(TimeMs t) {
        while (!schedule_.empty() && schedule_.top().time <= t) {
            const PendingCompletion pc = schedule_.top();
            schedule_.pop();
            const ObjectId object = scheduled_object_.at(pc.seq);
            scheduled_object_.erase(pc.seq);
            complete_fetch(object);
        }
    }

    void complete_fetch(const ObjectId& object) {
        auto node = in_flight_.extract(object);
        InFlightFetch& fetch = node.mapped();
        const double delay = episode_aggregate_delay(fetch);
        report_.episode_delay_total_ms += delay;

        ObjectTracker& tracker = trackers_[object];
        tracker.agg_delay_ewma = tracker.ewma_initialized
                                     ? mad_update(tracker.agg_delay_ewma, delay, config_.mad_alpha)
                                     : delay;
        tracker.ewma_initialized = true;
        tracker.episode_stats.add(delay);

        const std::uint64_t size = object_size(fetch);
        const TimeMs now = fetch.completion_ms;
        AdmissionDecision decision = decide(object, size, now);
        for (const ObjectId& victim : decision.victims) {
            used_ -= resident_.at(victim);
            resident_.erase(victim);
            ++report_.evictions;
        }
        if (decision.admit) {
            resident_.emplace(object, size);
            used_ += size;
            if (used_ > config_.capacity_bytes)
                throw std::logic_error("capacity exceeded after admission");
            report_.peak_used_bytes = std::max(report_.peak_used_bytes, used_);
        }

        report_.episodes.push_back({object, fetch.start_ms, fetch.completion_ms,
                                    static_cast<std::uint32_t>(fetch.queued_requests.size()),
                                    delay, decision.admit});
    }

    AdmissionDecision decide(const ObjectId& object, std::uint64_t size, TimeMs now) {
        const std::uint64_t free_bytes = config_.capacity_bytes - used_;
        if (free_bytes >= size) return {};
        std::vector<EvictionCandidate> cached;
        cached.reserve(resident_.size());
        for (const auto& [id, sz] : resident_) cached.push_back(make_candidate(id, sz, now));
        return plan_admission(cached, free_bytes, make_candidate(object, size, now),
                              config_.policy, params_);
    }

    EvictionCandidate make_candidate(const ObjectId& id, std::uint64_t size, TimeMs now) const {
        EvictionCandidate c;
        c.object = id;
        c.size_bytes = size;
        c.lambda_hat = window_.estimate_rate(id, now);
        c.residual_ms = window_.estimate_residual(id, now);
        c.z_mean_ms = mean_miss_latency_ms(config_.latency, size);
        c.recency_seq = window_.last_access_seq(id);
        if (auto it = trackers_.find(id); it != trackers_.end()) {
            c.agg_delay_ewma_ms = it->second.agg_delay_ewma;
            c.episode_mean_ms = it->second.episode_stats.mean;
            c.episode_std_ms = it->second.episode_stats.population_std();
        }
        return c;
    }

    std::uint64_t object_size(const InFlightFetch& fetch) const {
        // Sizes are consistent per object within a validated trace; the
        // fetch was created from one of its events.
        return sizes_.at(fetch.object);
    }

    SimReport finish() {
        report_.policy = report_label(config_.policy);
        report_.config = config_;
        const std::uint64_t events = report_.hits + report_.delayed_hits + report_.misses;
        if (events != trace_.size()) throw std::logic_error("event accounting mismatch");
        const double a = report_.total_latency_ms;
        const double b = report_.episode_delay_total_ms;
        if (std::abs(a - b) > 1e-6 * std::max(1.0, std::max(a, b)))
            throw std::logic_error("latency accountings diverge");
        return report_;
    }

    const ValidatedTrace& trace_;
    const CacheConfig& config_;
    Rng rng_;
    WindowState window_;
    RankParams params_;

    std::unordered_map<ObjectId, std::uint64_t> sizes_;
    std::unordered_map<ObjectId, std::uint64_t> resident_;
    std::uint64_t used_ = 0;
    std::unordered_map<ObjectId, InFlightFetch> in_flight_;
    std::unordered_map<ObjectId, ObjectTracker> trackers_;
    std::priority_queue<PendingCompletion, std::vector<PendingCompletion>,
                        std::greater<PendingCompletion>>
        schedule_;
    std::unordered_map<std::uint64_t, ObjectId> scheduled_object_;
    std::uint64_t schedule_seq_ = 0;
    SimReport report_;
};

}  // namespace

SimReport simulate(const ValidatedTrace& trace, const CacheConfig& config) {
    validate_config(config);
    ensure_fits(trace, config);
    return Simulation(trace, config).run();
}

}  // namespace dhsim
