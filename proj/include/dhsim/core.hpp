#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dhsim {

// Times and durations are real-valued milliseconds. Trace times are
// non-negative; engine accounting never produces negative durations.
using TimeMs = double;

// Opaque, non-empty, unique per object within a trace.
using ObjectId = std::string;

struct TraceEvent {
    TimeMs time_ms = 0.0;
    ObjectId object;
    std::uint64_t size_bytes = 0;
};

enum class LatencyKind { Deterministic, Exponential };

// Miss latency for an object of size s has mean base_ms + per_byte_ms * s.
// Deterministic mode returns the mean itself, Exponential mode samples an
// exponential with that mean.
struct LatencySpec {
    LatencyKind kind = LatencyKind::Deterministic;
    double base_ms = 5.0;         // constant component L
    double per_byte_ms = 5.0e-8;  // size-proportional component c, default L / 100 MB
};

enum class PolicyKind {
    Lru,
    StochasticVA,     // va-stoch: exponential-latency mean/variance rank
    DeterministicVA,  // va-det: deterministic-latency mean/variance rank
    Lac,              // lac-style: mean-only deterministic rank
    Cala,             // cala-style: blend of observed delay EWMA and z^2
    Mad,              // mad-style: observed delay EWMA over R*s
    ToyMean,          // raw mean of finished episode delays, compare-on-admit
    ToyMeanStd,       // mean plus population std, compare-on-admit
};

// CLI selector (lru, va-stoch, ...).
const char* to_string(PolicyKind kind);
// Name used in report CSVs; simplified baselines carry a -style suffix.
const char* report_label(PolicyKind kind);
bool parse_policy(std::string_view name, PolicyKind& out);
// All selector strings, in a stable order (for usage messages).
const std::vector<std::string>& policy_names();

const char* to_string(LatencyKind kind);
bool parse_latency_kind(std::string_view name, LatencyKind& out);

struct CacheConfig {
    std::uint64_t capacity_bytes = 500'000'000;  // C
    std::size_t window_size = 10'000;            // S, most recent requests
    double omega = 1.0;                          // variance sensitivity
    PolicyKind policy = PolicyKind::StochasticVA;
    LatencySpec latency;
    std::uint64_t rng_seed = 1;
    double cala_weight = 0.5;
    double mad_alpha = 0.5;
};

enum class TraceFault {
    UnsortedTrace,
    InconsistentSize,
    ObjectLargerThanCache,
    InvalidEvent,
};

class TraceError : public std::runtime_error {
public:
    TraceError(TraceFault fault, std::size_t index, const std::string& what)
        : std::runtime_error(what), fault_(fault), index_(index) {}
    TraceFault fault() const { return fault_; }
    // Index of the first violating event.
    std::size_t index() const { return index_; }

private:
    TraceFault fault_;
    std::size_t index_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A trace that passed validation: events sorted by non-decreasing time,
// positive sizes consistent per object, non-empty ids, non-negative times.
// Immutable after construction; safe to share across parallel runs.
class ValidatedTrace {
public:
    const std::vector<TraceEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }
    std::uint64_t max_object_size() const { return max_size_; }
    std::uint64_t total_footprint() const { return footprint_; }

    friend ValidatedTrace validate_trace(std::vector<TraceEvent> events);

private:
    explicit ValidatedTrace(std::vector<TraceEvent> events);
    std::vector<TraceEvent> events_;
    std::uint64_t max_size_ = 0;
    std::uint64_t footprint_ = 0;  // sum of distinct object sizes
};

// Structural validation (ordering, sizes, ids). Throws TraceError naming the
// first violating event index.
ValidatedTrace validate_trace(std::vector<TraceEvent> events);

// Structural validation plus the capacity constraint max_i s_i < C.
ValidatedTrace validate_trace(std::vector<TraceEvent> events, const CacheConfig& config);

// Re-checks an already validated trace against a config's capacity.
void ensure_fits(const ValidatedTrace& trace, const CacheConfig& config);

// Throws ConfigError on out-of-range fields.
void validate_config(const CacheConfig& config);

double mean_miss_latency_ms(const LatencySpec& spec, std::uint64_t size_bytes);

}  // namespace dhsim
