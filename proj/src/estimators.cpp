#include "dhsim/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace dhsim {

WindowState::WindowState(std::size_t window_size) : window_size_(window_size) {
    if (window_size_ < 1) throw ConfigError("window size must be >= 1");
}

void WindowState::record_arrival(TimeMs t, const ObjectId& object) {
    if (any_recorded_ && t < last_time_)
        throw TimeRegressionError("arrival at " + std::to_string(t) +
                                  " precedes last recorded time " + std::to_string(last_time_));
    last_time_ = t;
    any_recorded_ = true;
    ++seq_;

    auto [it, inserted] = objects_.try_emplace(object);
    ObjectStats& stats = it->second;
    if (inserted) stats.insert_seq = seq_;
    stats.arrivals.push_back(t);
    stats.last_access = t;
    stats.last_seq = seq_;

    window_.push_back(object);
    while (window_.size() > window_size_) {
        // The globally oldest retained arrival is that object's front entry.
        ObjectStats& oldest = objects_.at(window_.front());
        oldest.arrivals.pop_front();
        window_.pop_front();
    }
}

const ObjectStats& WindowState::stats(const ObjectId& object) const {
    auto it = objects_.find(object);
    if (it == objects_.end()) throw UnknownObjectError("unknown object '" + object + "'");
    return it->second;
}

bool WindowState::knows(const ObjectId& object) const { return objects_.count(object) != 0; }

double WindowState::estimate_rate(const ObjectId& object, TimeMs now) const {
    const ObjectStats& s = stats(object);
    const auto& a = s.arrivals;
    if (a.size() >= 2) {
        const double span = a.back() - a.front();
        if (span <= 0.0) return kRateCeiling;  // all arrivals at one instant
        return static_cast<double>(a.size() - 1) / span;
    }
    if (a.size() == 1) {
        const double dt = now - a.front();
        if (dt <= 0.0) return kRateCeiling;
        return std::clamp(1.0 / dt, kRateFloor, kRateCeiling);
    }
    return kRateFloor;  // fully pruned from the window
}

TimeMs WindowState::estimate_residual(const ObjectId& object, TimeMs now) const {
    const ObjectStats& s = stats(object);
    return std::max(now - s.last_access, kEpsilonResidual);
}

std::uint64_t WindowState::last_access_seq(const ObjectId& object) const {
    return stats(object).last_seq;
}

}  // namespace dhsim
