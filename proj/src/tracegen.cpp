#include "dhsim/tracegen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "dhsim/io.hpp"
#include "dhsim/rng.hpp"

namespace dhsim {

const char* to_string(ArrivalKind kind) {
    return kind == ArrivalKind::Poisson ? "poisson" : "pareto";
}

bool parse_arrival_kind(std::string_view name, ArrivalKind& out) {
    if (name == "poisson") {
        out = ArrivalKind::Poisson;
        return true;
    }
    if (name == "pareto") {
        out = ArrivalKind::Pareto;
        return true;
    }
    return false;
}

namespace {

void check_spec(const SyntheticSpec& spec) {
    if (spec.n_objects < 1) throw InvalidSpecError("need at least one object");
    if (spec.n_requests < 1) throw InvalidSpecError("need at least one request");
    if (!(spec.zipf_alpha > 0.0)) throw InvalidSpecError("zipf alpha must be positive");
    if (!(spec.total_rate_per_ms > 0.0)) throw InvalidSpecError("arrival rate must be positive");
    if (spec.arrival == ArrivalKind::Pareto && !(spec.pareto_shape > 1.0))
        throw InvalidSpecError("pareto shape must exceed 1 for a finite mean gap");
    if (spec.size_min_bytes < 1 || spec.size_min_bytes > spec.size_max_bytes)
        throw InvalidSpecError("invalid size range");
}

ObjectId object_name(std::size_t index, std::size_t n_objects) {
    std::size_t digits = 1, p = 10;
    while (p <= n_objects) {
        ++digits;
        p *= 10;
    }
    std::string num = std::to_string(index + 1);
    return "o" + std::string(digits - num.size(), '0') + num;
}

}  // namespace

ValidatedTrace gen_synthetic(const SyntheticSpec& spec) {
    check_spec(spec);
    Rng rng(spec.seed);

    // Zipf(alpha) popularity over ranks 1..N, sampled by CDF inversion.
    std::vector<double> cdf(spec.n_objects);
    double total = 0.0;
    for (std::size_t k = 0; k < spec.n_objects; ++k) {
        total += std::pow(static_cast<double>(k + 1), -spec.zipf_alpha);
        cdf[k] = total;
    }
    for (auto& c : cdf) c /= total;
    cdf.back() = 1.0;

    std::vector<ObjectId> names(spec.n_objects);
    std::vector<std::uint64_t> sizes(spec.n_objects);
    for (std::size_t k = 0; k < spec.n_objects; ++k) {
        names[k] = object_name(k, spec.n_objects);
        sizes[k] = rng.uniform_int(spec.size_min_bytes, spec.size_max_bytes);
    }

    const double mean_gap = 1.0 / spec.total_rate_per_ms;
    // Pareto scale matched so both arrival models share the mean gap.
    const double pareto_scale = mean_gap * (spec.pareto_shape - 1.0) / spec.pareto_shape;

    std::vector<TraceEvent> events;
    events.reserve(spec.n_requests);
    TimeMs t = 0.0;
    for (std::size_t i = 0; i < spec.n_requests; ++i) {
        t += spec.arrival == ArrivalKind::Poisson ? rng.exponential(mean_gap)
                                                  : rng.pareto(spec.pareto_shape, pareto_scale);
        const double u = rng.uniform01_left();
        const std::size_t k =
            static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        events.push_back({t, names[k], sizes[k]});
    }
    return validate_trace(std::move(events));
}

std::vector<PopularityRow> empirical_popularity(const ValidatedTrace& trace) {
    if (trace.empty()) throw EmptyTraceError("empty trace");
    struct Acc {
        std::uint64_t count = 0;
        TimeMs first = 0.0, last = 0.0;
        std::uint64_t size = 0;
    };
    std::unordered_map<ObjectId, Acc> accs;
    for (const auto& e : trace.events()) {
        auto [it, inserted] = accs.try_emplace(e.object);
        Acc& a = it->second;
        if (inserted) {
            a.first = e.time_ms;
            a.size = e.size_bytes;
        }
        a.last = e.time_ms;
        ++a.count;
    }
    std::vector<PopularityRow> rows;
    rows.reserve(accs.size());
    for (const auto& [id, a] : accs) {
        const double mean_gap = a.count >= 2
                                    ? (a.last - a.first) / static_cast<double>(a.count - 1)
                                    : std::numeric_limits<double>::quiet_NaN();
        rows.push_back({id, a.count, mean_gap, a.size});
    }
    std::sort(rows.begin(), rows.end(), [](const PopularityRow& a, const PopularityRow& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.object < b.object;
    });
    return rows;
}

ValidatedTrace load_trace(const std::string& path) {
    return validate_trace(io::read_trace_csv(path));
}

}  // namespace dhsim
