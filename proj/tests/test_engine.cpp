#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "dhsim/engine.hpp"
#include "dhsim/rng.hpp"
#include "dhsim/stats.hpp"
#include "test_util.hpp"

using namespace dhsim;

namespace {

// 17 requests at 1 ms spacing, two equally sized objects, cache that holds
// exactly one. With deterministic z = 4 the empirical-mean policy totals 33
// and the mean-plus-std policy totals 30.
ValidatedTrace toy_trace() {
    const std::string sequence = "AAABAAABBBBAABBBB";
    std::vector<TraceEvent> events;
    for (std::size_t i = 0; i < sequence.size(); ++i)
        events.push_back({static_cast<double>(i + 1), std::string(1, sequence[i]), 100});
    return validate_trace(std::move(events));
}

CacheConfig toy_config(PolicyKind policy) {
    CacheConfig cfg;
    cfg.capacity_bytes = 150;
    cfg.policy = policy;
    cfg.latency.kind = LatencyKind::Deterministic;
    cfg.latency.base_ms = 4.0;
    cfg.latency.per_byte_ms = 0.0;
    cfg.rng_seed = 1;
    return cfg;
}

ValidatedTrace small_random_trace(std::uint64_t seed, std::size_t n_events) {
    Rng rng(seed);
    std::vector<std::uint64_t> sizes;
    for (int i = 0; i < 8; ++i) sizes.push_back(rng.uniform_int(10, 40));
    std::vector<TraceEvent> events;
    double t = 0.0;
    for (std::size_t i = 0; i < n_events; ++i) {
        t += rng.exponential(1.0);
        const std::size_t k = rng.uniform_int(0, sizes.size() - 1);
        events.push_back({t, "o" + std::to_string(k), sizes[k]});
    }
    return validate_trace(std::move(events));
}

const std::vector<PolicyKind> kAllPolicies{
    PolicyKind::Lru,  PolicyKind::StochasticVA, PolicyKind::DeterministicVA,
    PolicyKind::Lac,  PolicyKind::Cala,         PolicyKind::Mad,
    PolicyKind::ToyMean, PolicyKind::ToyMeanStd,
};

}  // namespace

TEST_CASE("toy example: empirical-mean policy totals 33") {
    const auto report = simulate(toy_trace(), toy_config(PolicyKind::ToyMean));
    CHECK(report.total_latency_ms == 33.0);
    CHECK(report.misses == 4);
    CHECK(report.delayed_hits == 8);
    CHECK(report.hits == 5);
    CHECK(report.episode_delay_total_ms == 33.0);
}

TEST_CASE("toy example: mean-plus-std policy totals 30") {
    const auto report = simulate(toy_trace(), toy_config(PolicyKind::ToyMeanStd));
    CHECK(report.total_latency_ms == 30.0);
    CHECK(report.misses == 4);
    CHECK(report.delayed_hits == 6);
    CHECK(report.hits == 7);
}

TEST_CASE("toy example: improvement of the variance-aware choice") {
    const double mean_total = simulate(toy_trace(), toy_config(PolicyKind::ToyMean)).total_latency_ms;
    const double std_total =
        simulate(toy_trace(), toy_config(PolicyKind::ToyMeanStd)).total_latency_ms;
    CHECK(latency_improvement(mean_total, std_total) == doctest::Approx(3.0 / 33.0));
}

TEST_CASE("episode aggregate delay sums remaining fetch times") {
    CHECK(episode_aggregate_delay({"A", 1.0, 5.0, {2.0, 3.0}}) == doctest::Approx(9.0));
    CHECK(episode_aggregate_delay({"A", 2.0, 9.5, {}}) == doctest::Approx(7.5));
    CHECK(episode_aggregate_delay({"B", 4.0, 8.0, {5.0, 6.0, 7.0}}) == doctest::Approx(10.0));
}

TEST_CASE("latency improvement formula") {
    CHECK(latency_improvement(100.0, 70.0) == doctest::Approx(0.30));
    CHECK(latency_improvement(100.0, 100.0) == doctest::Approx(0.0));
    CHECK(latency_improvement(33.0, 30.0) == doctest::Approx(0.0909090909));
    CHECK_THROWS_AS(latency_improvement(0.0, 1.0), ConfigError);
}

TEST_CASE("miss latency combines base and size components") {
    Rng rng(1);
    CHECK(miss_latency_for(1'000'000, 5.0, 0.0, false, rng) == doctest::Approx(5.0));
    CHECK(miss_latency_for(1'000'000, 1.0, 1e-6, false, rng) == doctest::Approx(2.0));

    MomentAccumulator acc;
    for (int i = 0; i < 1'000'000; ++i) acc.add(miss_latency_for(100, 5.0, 0.0, true, rng));
    CHECK(std::abs(acc.mean - 5.0) <= 3.0 * acc.se_mean());
}

TEST_CASE("single request is one miss episode") {
    const auto trace = validate_trace({{1.0, "X", 10}});
    CacheConfig cfg;
    cfg.capacity_bytes = 100;
    cfg.latency.kind = LatencyKind::Deterministic;
    cfg.latency.base_ms = 7.0;
    cfg.latency.per_byte_ms = 0.0;
    const auto report = simulate(trace, cfg);
    CHECK(report.total_latency_ms == doctest::Approx(7.0));
    CHECK(report.misses == 1);
    CHECK(report.hits == 0);
    CHECK(report.delayed_hits == 0);
    REQUIRE(report.episodes.size() == 1);
    CHECK(report.episodes[0].aggregate_delay_ms == doctest::Approx(7.0));
    CHECK(report.episodes[0].admitted);
}

TEST_CASE("arrival exactly at completion is a hit, strictly inside is delayed") {
    CacheConfig cfg;
    cfg.capacity_bytes = 100;
    cfg.latency.kind = LatencyKind::Deterministic;
    cfg.latency.base_ms = 4.0;
    cfg.latency.per_byte_ms = 0.0;

    const auto boundary = simulate(validate_trace({{0.0, "X", 10}, {4.0, "X", 10}}), cfg);
    CHECK(boundary.hits == 1);
    CHECK(boundary.delayed_hits == 0);
    CHECK(boundary.total_latency_ms == doctest::Approx(4.0));

    const auto inside = simulate(validate_trace({{0.0, "X", 10}, {3.5, "X", 10}}), cfg);
    CHECK(inside.hits == 0);
    CHECK(inside.delayed_hits == 1);
    CHECK(inside.total_latency_ms == doctest::Approx(4.5));
}

TEST_CASE("replay is deterministic") {
    const auto trace = small_random_trace(404, 2000);
    for (PolicyKind policy : kAllPolicies) {
        CacheConfig cfg;
        cfg.capacity_bytes = 90;
        cfg.policy = policy;
        cfg.latency.kind = LatencyKind::Exponential;
        cfg.latency.base_ms = 2.0;
        cfg.latency.per_byte_ms = 0.01;
        cfg.rng_seed = 99;
        const auto a = simulate(trace, cfg);
        const auto b = simulate(trace, cfg);
        CHECK(a.total_latency_ms == b.total_latency_ms);
        CHECK(a.hits == b.hits);
        CHECK(a.delayed_hits == b.delayed_hits);
        CHECK(a.misses == b.misses);
        REQUIRE(a.episodes.size() == b.episodes.size());
        for (std::size_t i = 0; i < a.episodes.size(); ++i) {
            CHECK(a.episodes[i].object == b.episodes[i].object);
            CHECK(a.episodes[i].aggregate_delay_ms == b.episodes[i].aggregate_delay_ms);
            CHECK(a.episodes[i].admitted == b.episodes[i].admitted);
        }
    }
}

TEST_CASE("both latency accountings close and counts conserve") {
    for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
        const auto trace = small_random_trace(seed, 3000);
        for (PolicyKind policy : kAllPolicies) {
            CacheConfig cfg;
            cfg.capacity_bytes = 70;
            cfg.policy = policy;
            cfg.latency.kind = seed % 2 ? LatencyKind::Exponential : LatencyKind::Deterministic;
            cfg.latency.base_ms = 1.0;
            cfg.latency.per_byte_ms = 0.02;
            cfg.rng_seed = seed;
            const auto r = simulate(trace, cfg);
            CHECK(r.hits + r.delayed_hits + r.misses == trace.size());
            CHECK(r.total_latency_ms ==
                  doctest::Approx(r.episode_delay_total_ms).epsilon(1e-9));
            double episode_sum = 0.0;
            std::uint64_t delayed = 0;
            for (const auto& e : r.episodes) {
                episode_sum += e.aggregate_delay_ms;
                delayed += e.delayed_hits;
            }
            CHECK(episode_sum == doctest::Approx(r.total_latency_ms).epsilon(1e-9));
            CHECK(delayed == r.delayed_hits);
            CHECK(r.episodes.size() == r.misses);
            CHECK(r.peak_used_bytes <= cfg.capacity_bytes);
        }
    }
}

TEST_CASE("unbounded capacity makes every policy identical") {
    const auto trace = small_random_trace(55, 2000);
    CacheConfig cfg;
    cfg.capacity_bytes = trace.total_footprint() + 1;
    cfg.latency.kind = LatencyKind::Exponential;
    cfg.latency.base_ms = 3.0;
    cfg.latency.per_byte_ms = 0.0;
    cfg.rng_seed = 5;

    cfg.policy = kAllPolicies.front();
    const auto base = simulate(trace, cfg);
    CHECK(base.evictions == 0);
    for (PolicyKind policy : kAllPolicies) {
        cfg.policy = policy;
        const auto r = simulate(trace, cfg);
        CHECK(r.total_latency_ms == base.total_latency_ms);  // bitwise: same draws
        CHECK(r.misses == base.misses);
        CHECK(r.evictions == 0);
    }
}

namespace {

// Always-missing-object scenario: a huge "blocker" object with an enormous
// observed episode delay occupies the cache under the empirical-mean policy,
// so every later fetch of the probe object is bypassed on admission. The
// probe's episodes are then independent draws of the aggregate delay with
// Poisson arrivals and the configured latency model.
MomentAccumulator always_miss_episodes(LatencyKind kind, double lambda, double horizon_ms,
                                       std::uint64_t seed) {
    Rng rng(seed);
    std::vector<TraceEvent> events;
    events.push_back({0.0, "blocker", 1'000'000});
    double t = 1e-6;
    while (true) {
        t += rng.exponential(1.0 / lambda);
        if (t > horizon_ms) break;
        events.push_back({t, "probe", 1'000});
    }
    CacheConfig cfg;
    cfg.capacity_bytes = 1'000'500;  // blocker and probe never fit together
    cfg.policy = PolicyKind::ToyMean;
    cfg.latency.kind = kind;
    cfg.latency.base_ms = 0.0;
    cfg.latency.per_byte_ms = 1e-3;  // probe z = 1 ms, blocker z = 1000 ms
    cfg.rng_seed = seed + 1;
    const auto report = simulate(validate_trace(std::move(events)), cfg);

    MomentAccumulator acc;
    double blocker_delay = 0.0;
    for (const auto& e : report.episodes) {
        if (e.object == "blocker")
            blocker_delay = e.aggregate_delay_ms;
        else
            acc.add(e.aggregate_delay_ms);
    }
    // The blocker must dominate every probe rank or the setup is void.
    REQUIRE(blocker_delay > 100.0);
    return acc;
}

}  // namespace

TEST_CASE("episode delays match the exponential-latency closed form") {
    const auto acc = always_miss_episodes(LatencyKind::Exponential, 1.0, 220'000.0, 2024);
    REQUIRE(acc.n >= 100'000);
    CHECK(std::abs(acc.mean - 2.0) <= 3.0 * acc.se_mean());
    CHECK(std::abs(acc.sample_variance() - 12.0) <= 0.05 * 12.0);
}

TEST_CASE("episode delays match the deterministic-latency closed form") {
    const auto acc = always_miss_episodes(LatencyKind::Deterministic, 1.0, 220'000.0, 77);
    REQUIRE(acc.n >= 100'000);
    CHECK(std::abs(acc.mean - 1.5) <= 3.0 * acc.se_mean());
    CHECK(std::abs(acc.sample_variance() - 1.0 / 3.0) <= 0.05 / 3.0);
}

TEST_CASE("oversized objects are rejected against the configured capacity") {
    const auto trace = validate_trace({{1.0, "A", 200}});
    CacheConfig cfg;
    cfg.capacity_bytes = 100;
    CHECK_THROWS_AS(simulate(trace, cfg), TraceError);
}
