#include "dhsim/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace dhsim {

namespace {

struct PolicyName {
    PolicyKind kind;
    const char* selector;
    const char* label;
};

constexpr PolicyName kPolicyNames[] = {
    {PolicyKind::Lru, "lru", "lru"},
    {PolicyKind::StochasticVA, "va-stoch", "va-stoch"},
    {PolicyKind::DeterministicVA, "va-det", "va-det"},
    {PolicyKind::Lac, "lac", "lac-style"},
    {PolicyKind::Cala, "cala", "cala-style"},
    {PolicyKind::Mad, "mad", "mad-style"},
    {PolicyKind::ToyMean, "toy-mean", "toy-mean"},
    {PolicyKind::ToyMeanStd, "toy-mean-std", "toy-mean-std"},
};

}  // namespace

const char* to_string(PolicyKind kind) {
    for (const auto& p : kPolicyNames)
        if (p.kind == kind) return p.selector;
    return "?";
}

const char* report_label(PolicyKind kind) {
    for (const auto& p : kPolicyNames)
        if (p.kind == kind) return p.label;
    return "?";
}

bool parse_policy(std::string_view name, PolicyKind& out) {
    for (const auto& p : kPolicyNames) {
        if (name == p.selector) {
            out = p.kind;
            return true;
        }
    }
    return false;
}

const std::vector<std::string>& policy_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& p : kPolicyNames) v.emplace_back(p.selector);
        return v;
    }();
    return names;
}

const char* to_string(LatencyKind kind) {
    return kind == LatencyKind::Deterministic ? "det" : "exp";
}

bool parse_latency_kind(std::string_view name, LatencyKind& out) {
    if (name == "det" || name == "deterministic") {
        out = LatencyKind::Deterministic;
        return true;
    }
    if (name == "exp" || name == "exponential") {
        out = LatencyKind::Exponential;
        return true;
    }
    return false;
}

ValidatedTrace::ValidatedTrace(std::vector<TraceEvent> events) : events_(std::move(events)) {
    std::unordered_map<ObjectId, std::uint64_t> sizes;
    for (const auto& e : events_) {
        max_size_ = std::max(max_size_, e.size_bytes);
        if (sizes.emplace(e.object, e.size_bytes).second) footprint_ += e.size_bytes;
    }
}

ValidatedTrace validate_trace(std::vector<TraceEvent> events) {
    std::unordered_map<ObjectId, std::uint64_t> sizes;
    TimeMs prev = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.object.empty())
            throw TraceError(TraceFault::InvalidEvent, i,
                             "event " + std::to_string(i) + ": empty object id");
        if (!(e.time_ms >= 0.0) || !std::isfinite(e.time_ms))
            throw TraceError(TraceFault::InvalidEvent, i,
                             "event " + std::to_string(i) + ": negative or non-finite time");
        if (e.size_bytes == 0)
            throw TraceError(TraceFault::InvalidEvent, i,
                             "event " + std::to_string(i) + ": zero size");
        if (i > 0 && e.time_ms < prev)
            throw TraceError(TraceFault::UnsortedTrace, i,
                             "event " + std::to_string(i) + ": time " + std::to_string(e.time_ms) +
                                 " precedes previous event");
        prev = e.time_ms;
        auto [it, inserted] = sizes.emplace(e.object, e.size_bytes);
        if (!inserted && it->second != e.size_bytes)
            throw TraceError(TraceFault::InconsistentSize, i,
                             "event " + std::to_string(i) + ": object '" + e.object +
                                 "' changes size from " + std::to_string(it->second) + " to " +
                                 std::to_string(e.size_bytes));
    }
    return ValidatedTrace(std::move(events));
}

ValidatedTrace validate_trace(std::vector<TraceEvent> events, const CacheConfig& config) {
    validate_config(config);
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].size_bytes >= config.capacity_bytes)
            throw TraceError(TraceFault::ObjectLargerThanCache, i,
                             "event " + std::to_string(i) + ": object '" + events[i].object +
                                 "' of size " + std::to_string(events[i].size_bytes) +
                                 " does not fit capacity " + std::to_string(config.capacity_bytes));
    }
    return validate_trace(std::move(events));
}

void ensure_fits(const ValidatedTrace& trace, const CacheConfig& config) {
    if (!trace.empty() && trace.max_object_size() >= config.capacity_bytes)
        throw TraceError(TraceFault::ObjectLargerThanCache, 0,
                         "largest object (" + std::to_string(trace.max_object_size()) +
                             " bytes) does not fit capacity " +
                             std::to_string(config.capacity_bytes));
}

void validate_config(const CacheConfig& config) {
    if (config.capacity_bytes == 0) throw ConfigError("capacity must be positive");
    if (config.window_size < 1) throw ConfigError("window size must be >= 1");
    if (!(config.omega >= 0.0)) throw ConfigError("omega must be >= 0");
    if (!(config.latency.base_ms >= 0.0)) throw ConfigError("base latency must be >= 0");
    if (!(config.latency.per_byte_ms >= 0.0)) throw ConfigError("per-byte latency must be >= 0");
    if (config.latency.base_ms == 0.0 && config.latency.per_byte_ms == 0.0)
        throw ConfigError("miss latency must be positive");
    if (!(config.cala_weight >= 0.0 && config.cala_weight <= 1.0))
        throw ConfigError("cala weight must be in [0,1]");
    if (!(config.mad_alpha > 0.0 && config.mad_alpha <= 1.0))
        throw ConfigError("mad alpha must be in (0,1]");
}

double mean_miss_latency_ms(const LatencySpec& spec, std::uint64_t size_bytes) {
    return spec.base_ms + spec.per_byte_ms * static_cast<double>(size_bytes);
}

}  // namespace dhsim
