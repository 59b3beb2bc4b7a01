#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "dhsim/core.hpp"

namespace dhsim {

class UnknownObjectError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TimeRegressionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ObjectStats {
    std::deque<TimeMs> arrivals;  // in-window arrival times, ascending
    TimeMs last_access = 0.0;     // kept even after all arrivals are pruned
    std::uint64_t last_seq = 0;   // global sequence number of the last access
    std::uint64_t insert_seq = 0;
};

// Count-based sliding window over the S most recent requests, powering the
// per-object arrival-rate and residual-time estimates. Single writer per
// simulation run.
class WindowState {
public:
    static constexpr double kRateFloor = 1e-6;    // per ms
    static constexpr double kRateCeiling = 1e6;   // per ms
    static constexpr double kEpsilonResidual = 1e-3;  // ms

    explicit WindowState(std::size_t window_size);

    // t must be >= every previously recorded time. Evicts the globally
    // oldest retained arrival once more than S are held.
    void record_arrival(TimeMs t, const ObjectId& object);

    // n >= 2 in-window arrivals: (n-1) / (t_last - t_first).
    // n == 1: 1 / (now - t_arrival), clamped to [kRateFloor, kRateCeiling].
    // n == 0 (fully pruned): kRateFloor.
    double estimate_rate(const ObjectId& object, TimeMs now) const;

    // LRU recency proxy: max(now - last_access, kEpsilonResidual).
    TimeMs estimate_residual(const ObjectId& object, TimeMs now) const;

    bool knows(const ObjectId& object) const;
    const ObjectStats& stats(const ObjectId& object) const;
    std::uint64_t last_access_seq(const ObjectId& object) const;
    std::size_t retained_total() const { return window_.size(); }
    std::size_t window_size() const { return window_size_; }

private:
    std::size_t window_size_;
    std::deque<ObjectId> window_;  // ids of the S most recent requests
    std::unordered_map<ObjectId, ObjectStats> objects_;
    std::uint64_t seq_ = 0;
    TimeMs last_time_ = 0.0;
    bool any_recorded_ = false;
};

}  // namespace dhsim
