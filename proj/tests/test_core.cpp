#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <unordered_map>

#include "dhsim/core.hpp"
#include "dhsim/io.hpp"
#include "dhsim/rng.hpp"
#include "test_util.hpp"

using namespace dhsim;

namespace {

CacheConfig config_with_capacity(std::uint64_t capacity) {
    CacheConfig cfg;
    cfg.capacity_bytes = capacity;
    return cfg;
}

}  // namespace

TEST_CASE("well-formed trace validates") {
    std::vector<TraceEvent> events{{1.0, "A", 10}, {2.0, "B", 20}};
    const auto trace = validate_trace(events, config_with_capacity(100));
    CHECK(trace.size() == 2);
    CHECK(trace.max_object_size() == 20);
    CHECK(trace.total_footprint() == 30);
}

TEST_CASE("unsorted trace names the violating index") {
    std::vector<TraceEvent> events{{2.0, "A", 10}, {1.0, "B", 20}};
    try {
        validate_trace(std::move(events));
        FAIL("expected TraceError");
    } catch (const TraceError& e) {
        CHECK(e.fault() == TraceFault::UnsortedTrace);
        CHECK(e.index() == 1);
    }
}

TEST_CASE("inconsistent size names the violating index") {
    std::vector<TraceEvent> events{{1.0, "A", 10}, {2.0, "A", 11}};
    try {
        validate_trace(std::move(events));
        FAIL("expected TraceError");
    } catch (const TraceError& e) {
        CHECK(e.fault() == TraceFault::InconsistentSize);
        CHECK(e.index() == 1);
    }
}

TEST_CASE("object at or above capacity is rejected") {
    std::vector<TraceEvent> events{{1.0, "A", 100}};
    try {
        validate_trace(std::move(events), config_with_capacity(100));
        FAIL("expected TraceError");
    } catch (const TraceError& e) {
        CHECK(e.fault() == TraceFault::ObjectLargerThanCache);
        CHECK(e.index() == 0);
    }
}

TEST_CASE("zero size, empty id and negative time are invalid") {
    CHECK_THROWS_AS(validate_trace({{1.0, "A", 0}}), TraceError);
    CHECK_THROWS_AS(validate_trace({{1.0, "", 5}}), TraceError);
    CHECK_THROWS_AS(validate_trace({{-1.0, "A", 5}}), TraceError);
}

TEST_CASE("equal timestamps are allowed, order preserved") {
    std::vector<TraceEvent> events{{1.0, "A", 10}, {1.0, "B", 20}, {1.0, "A", 10}};
    const auto trace = validate_trace(std::move(events));
    CHECK(trace.events()[0].object == "A");
    CHECK(trace.events()[1].object == "B");
}

TEST_CASE("validation is idempotent") {
    std::vector<TraceEvent> events{{1.0, "A", 10}, {2.5, "B", 20}, {2.5, "A", 10}};
    const auto once = validate_trace(events);
    const auto twice = validate_trace(once.events());
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once.events()[i].time_ms == twice.events()[i].time_ms);
        CHECK(once.events()[i].object == twice.events()[i].object);
        CHECK(once.events()[i].size_bytes == twice.events()[i].size_bytes);
    }
}

TEST_CASE("config validation rejects out-of-range fields") {
    CacheConfig cfg;
    cfg.capacity_bytes = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = CacheConfig{};
    cfg.omega = -0.5;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = CacheConfig{};
    cfg.window_size = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    cfg = CacheConfig{};
    cfg.latency.base_ms = 0.0;
    cfg.latency.per_byte_ms = 0.0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
    CHECK_NOTHROW(validate_config(CacheConfig{}));
}

TEST_CASE("trace CSV round-trips bit-exactly") {
    // Random traces mixing integer and fractional times.
    Rng rng(20240901);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<TraceEvent> events;
        double t = 0.0;
        const int n = 1 + static_cast<int>(rng.uniform_int(0, 40));
        for (int i = 0; i < n; ++i) {
            t += rng.next_u64() % 2 ? rng.exponential(3.7) : static_cast<double>(rng.uniform_int(0, 9));
            const ObjectId id = "obj" + std::to_string(rng.uniform_int(0, 5));
            events.push_back({t, id, 0});
        }
        // Consistent per-object sizes.
        std::unordered_map<ObjectId, std::uint64_t> sizes;
        for (auto& e : events) {
            auto [it, inserted] = sizes.try_emplace(e.object, rng.uniform_int(1, 1'000'000'000));
            e.size_bytes = it->second;
        }

        std::stringstream buffer;
        io::write_trace_csv(buffer, events);
        const auto loaded = io::read_trace_csv(buffer);
        REQUIRE(loaded.size() == events.size());
        for (std::size_t i = 0; i < events.size(); ++i) {
            CHECK(loaded[i].time_ms == events[i].time_ms);  // bit-exact via shortest round-trip
            CHECK(loaded[i].object == events[i].object);
            CHECK(loaded[i].size_bytes == events[i].size_bytes);
        }
    }
}

TEST_CASE("trace CSV uses LF endings and the fixed header") {
    std::stringstream buffer;
    io::write_trace_csv(buffer, {{1.0, "A", 10}});
    CHECK(buffer.str() == "time_ms,object_id,size_bytes\n1,A,10\n");
}

TEST_CASE("mean miss latency combines base and size components") {
    LatencySpec spec;
    spec.base_ms = 1.0;
    spec.per_byte_ms = 1e-6;
    CHECK(mean_miss_latency_ms(spec, 1'000'000) == doctest::Approx(2.0));
}

TEST_CASE("policy names parse and format") {
    PolicyKind kind;
    CHECK(parse_policy("va-stoch", kind));
    CHECK(kind == PolicyKind::StochasticVA);
    CHECK(!parse_policy("nonsense", kind));
    CHECK(std::string(report_label(PolicyKind::Lac)) == "lac-style");
    CHECK(std::string(to_string(PolicyKind::Lac)) == "lac");
    CHECK(policy_names().size() == 8);
}
