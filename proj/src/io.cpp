#include "dhsim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace dhsim::io {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

double parse_double(const std::string& field, std::size_t line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(line, "line " + std::to_string(line) + ": bad number '" + field + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& field, std::size_t line) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(line, "line " + std::to_string(line) + ": bad integer '" + field + "'");
    return v;
}

namespace {

void check_id_field(const ObjectId& id, std::size_t line) {
    if (id.empty()) throw ParseError(line, "line " + std::to_string(line) + ": empty object id");
    if (id.find_first_of(",\r\n") != std::string::npos)
        throw ParseError(line, "line " + std::to_string(line) + ": object id contains a delimiter");
}

std::vector<std::string> split_csv_line(const std::string& line_text) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line_text.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line_text.substr(start));
            break;
        }
        fields.push_back(line_text.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<TraceEvent>& events) {
    out << kTraceHeader << '\n';
    for (const auto& e : events) {
        check_id_field(e.object, 0);
        out << format_double(e.time_ms) << ',' << e.object << ',' << e.size_bytes << '\n';
    }
}

void write_trace_csv(const std::string& path, const std::vector<TraceEvent>& events) {
    std::ofstream out(path, std::ios::binary);  // LF endings on every platform
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_trace_csv(out, events);
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<TraceEvent> read_trace_csv(std::istream& in) {
    std::vector<TraceEvent> events;
    std::string line_text;
    std::size_t line = 0;
    while (std::getline(in, line_text)) {
        ++line;
        if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
        if (line == 1) {
            if (line_text != kTraceHeader)
                throw ParseError(1, "line 1: expected header '" + std::string(kTraceHeader) + "'");
            continue;
        }
        if (line_text.empty()) continue;
        auto fields = split_csv_line(line_text);
        if (fields.size() != 3)
            throw ParseError(line, "line " + std::to_string(line) + ": expected 3 fields, got " +
                                       std::to_string(fields.size()));
        TraceEvent e;
        e.time_ms = parse_double(fields[0], line);
        e.object = fields[1];
        check_id_field(e.object, line);
        e.size_bytes = parse_u64(fields[2], line);
        events.push_back(std::move(e));
    }
    return events;
}

std::vector<TraceEvent> read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_trace_csv(in);
}

std::string report_row(const SimReport& report, std::optional<double> improvement_vs_lru) {
    const CacheConfig& c = report.config;
    std::ostringstream out;
    out << report.policy << ',' << c.rng_seed << ',' << c.capacity_bytes << ',' << c.window_size
        << ',' << format_double(c.omega) << ',' << format_double(c.latency.base_ms) << ','
        << format_double(c.latency.per_byte_ms) << ',' << to_string(c.latency.kind) << ','
        << format_double(report.total_latency_ms) << ',' << report.hits << ','
        << report.delayed_hits << ',' << report.misses << ',';
    if (improvement_vs_lru) out << format_double(*improvement_vs_lru);
    return out.str();
}

std::string popularity_row(const PopularityRow& row) {
    std::ostringstream out;
    out << row.object << ',' << row.count << ',' << format_double(row.mean_interarrival_ms) << ','
        << row.size_bytes;
    return out.str();
}

std::string episodes_json(const SimReport& report) {
    nlohmann::json j;
    j["policy"] = report.policy;
    j["seed"] = report.config.rng_seed;
    j["total_latency_ms"] = report.total_latency_ms;
    j["hits"] = report.hits;
    j["delayed_hits"] = report.delayed_hits;
    j["misses"] = report.misses;
    auto& episodes = j["episodes"] = nlohmann::json::array();
    for (const auto& e : report.episodes) {
        episodes.push_back({{"object", e.object},
                            {"start_ms", e.start_ms},
                            {"completion_ms", e.completion_ms},
                            {"delayed_hits", e.delayed_hits},
                            {"aggregate_delay_ms", e.aggregate_delay_ms},
                            {"admitted", e.admitted}});
    }
    return j.dump(2);
}

}  // namespace dhsim::io
