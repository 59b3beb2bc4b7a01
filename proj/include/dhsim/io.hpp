#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dhsim/core.hpp"
#include "dhsim/engine.hpp"
#include "dhsim/tracegen.hpp"

namespace dhsim::io {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(what), line_(line) {}
    // 1-based line number in the input file.
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Shortest round-trip decimal form (std::to_chars); "nan"/"inf" spelled out.
std::string format_double(double v);
double parse_double(const std::string& field, std::size_t line);
std::uint64_t parse_u64(const std::string& field, std::size_t line);

inline constexpr const char* kTraceHeader = "time_ms,object_id,size_bytes";
inline constexpr const char* kReportHeader =
    "policy,seed,C_bytes,S,omega,L_ms,c_ms_per_byte,latency_model,total_latency_ms,hits,"
    "delayed_hits,misses,improvement_vs_lru";
inline constexpr const char* kPopularityHeader = "object_id,count,mean_interarrival_ms,size_bytes";
inline constexpr const char* kMomentsHeader =
    "lambda,z,model,analytic_mean,analytic_var,mc_mean,mc_var,se_mean,se_var,n_samples";

void write_trace_csv(std::ostream& out, const std::vector<TraceEvent>& events);
void write_trace_csv(const std::string& path, const std::vector<TraceEvent>& events);

// Throws ParseError with the offending 1-based line number.
std::vector<TraceEvent> read_trace_csv(std::istream& in);
std::vector<TraceEvent> read_trace_csv(const std::string& path);

// One report CSV row; improvement is left empty when absent.
std::string report_row(const SimReport& report, std::optional<double> improvement_vs_lru);

std::string popularity_row(const PopularityRow& row);

// Per-episode JSON detail for a run.
std::string episodes_json(const SimReport& report);

}  // namespace dhsim::io
