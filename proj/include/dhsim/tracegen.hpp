#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dhsim/core.hpp"

namespace dhsim {

enum class ArrivalKind { Poisson, Pareto };

const char* to_string(ArrivalKind kind);
bool parse_arrival_kind(std::string_view name, ArrivalKind& out);

class InvalidSpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Synthetic workload: Zipf(alpha) object popularity, per-object sizes fixed
// uniform integers, global inter-arrival gaps exponential (Poisson mode) or
// Pareto with the scale matched to the same mean gap.
struct SyntheticSpec {
    std::size_t n_objects = 100;
    std::size_t n_requests = 100'000;
    double zipf_alpha = 1.0;
    ArrivalKind arrival = ArrivalKind::Poisson;
    double total_rate_per_ms = 1.0;
    double pareto_shape = 1.5;  // > 1 so the mean gap exists
    std::uint64_t size_min_bytes = 1'000'000;
    std::uint64_t size_max_bytes = 100'000'000;
    std::uint64_t seed = 1;
};

ValidatedTrace gen_synthetic(const SyntheticSpec& spec);

struct PopularityRow {
    ObjectId object;
    std::uint64_t count = 0;
    double mean_interarrival_ms = 0.0;  // NaN when fewer than two arrivals
    std::uint64_t size_bytes = 0;
};

class EmptyTraceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Per-object request counts and mean inter-arrival times, ordered by
// descending count (ties by id).
std::vector<PopularityRow> empirical_popularity(const ValidatedTrace& trace);

// Parses and validates a trace CSV file. Throws io::ParseError with the line
// number on malformed input, TraceError on semantic violations.
ValidatedTrace load_trace(const std::string& path);

}  // namespace dhsim
