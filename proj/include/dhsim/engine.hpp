#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dhsim/core.hpp"
#include "dhsim/rng.hpp"

namespace dhsim {

// One outstanding fetch: started by a miss at start_ms, completing at
// start_ms + Z. Requests landing inside (start, completion) queue here.
struct InFlightFetch {
    ObjectId object;
    TimeMs start_ms = 0.0;
    TimeMs completion_ms = 0.0;
    std::vector<TimeMs> queued_requests;
};

// Aggregate delay of a finished episode:
// (completion - start) + sum over queued t' of (completion - t').
double episode_aggregate_delay(const InFlightFetch& fetch);

// Relative latency reduction vs the LRU baseline. Throws ConfigError when
// the baseline is zero.
double latency_improvement(double latency_lru_ms, double latency_a_ms);

// Mean miss latency L + c*size; stochastic mode draws an exponential with
// that mean.
double miss_latency_for(std::uint64_t size_bytes, double base_ms, double per_byte_ms,
                        bool stochastic, Rng& rng);

struct EpisodeRecord {
    ObjectId object;
    TimeMs start_ms = 0.0;
    TimeMs completion_ms = 0.0;
    std::uint32_t delayed_hits = 0;
    double aggregate_delay_ms = 0.0;
    bool admitted = false;
};

struct SimReport {
    std::string policy;  // report label
    CacheConfig config;
    double total_latency_ms = 0.0;          // sum of per-event latencies
    double episode_delay_total_ms = 0.0;    // sum of finished episode delays
    std::uint64_t hits = 0;
    std::uint64_t delayed_hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t evictions = 0;
    std::uint64_t peak_used_bytes = 0;
    std::vector<EpisodeRecord> episodes;
};

// Event-driven simulation with delayed-hit semantics. Completions at time t
// process before arrivals at the same instant, so a request at exactly
// start + Z sees the admission outcome. In-flight objects consume no
// capacity. All remaining fetches are drained after the last arrival so both
// latency accountings close.
SimReport simulate(const ValidatedTrace& trace, const CacheConfig& config);

}  // namespace dhsim
