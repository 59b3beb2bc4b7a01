// dhsim command-line front end: synthetic trace generation, single runs,
// parameter sweeps, analytic-vs-Monte-Carlo moment validation, and trace
// characterization reports. All outputs are deterministic given the full
// flag set; seeds are always explicit.

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dhsim/core.hpp"
#include "dhsim/delay_model.hpp"
#include "dhsim/engine.hpp"
#include "dhsim/io.hpp"
#include "dhsim/tracegen.hpp"

namespace {

using namespace dhsim;

std::uint64_t parse_size_bytes(const std::string& text) {
    std::string num = text;
    std::uint64_t mult = 1;
    if (text.size() > 2) {
        const std::string suffix = text.substr(text.size() - 2);
        if (suffix == "MB") {
            mult = 1'000'000;
            num = text.substr(0, text.size() - 2);
        } else if (suffix == "GB") {
            mult = 1'000'000'000;
            num = text.substr(0, text.size() - 2);
        }
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(num, &pos);
        if (pos != num.size() || v < 0) throw std::invalid_argument(text);
        return static_cast<std::uint64_t>(v * static_cast<double>(mult));
    } catch (const std::exception&) {
        throw CLI::ValidationError("size", "cannot parse size '" + text + "' (bytes, MB or GB)");
    }
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<PolicyKind> parse_policies(const std::string& text) {
    std::vector<PolicyKind> out;
    for (const auto& name : split_list(text)) {
        PolicyKind kind;
        if (!parse_policy(name, kind)) {
            std::string valid;
            for (const auto& n : policy_names()) valid += (valid.empty() ? "" : ", ") + n;
            throw CLI::ValidationError("--policy",
                                       "unknown policy '" + name + "' (valid: " + valid + ")");
        }
        out.push_back(kind);
    }
    if (out.empty()) throw CLI::ValidationError("--policy", "no policies given");
    return out;
}

std::vector<double> parse_doubles(const std::string& flag, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "cannot parse number '" + item + "'");
        }
    }
    if (out.empty()) throw CLI::ValidationError(flag, "empty value list");
    return out;
}

struct SimFlags {
    std::string cache = "500MB";
    std::size_t window = 10'000;
    double omega = 1.0;
    std::string latency = "exp";
    double base_latency_ms = 5.0;
    double per_byte_ms = -1.0;  // negative: derive L / 100 MB
    double cala_weight = 0.5;
    double mad_alpha = 0.5;
    std::uint64_t seed = 0;

    void add_to(CLI::App* cmd, bool with_omega = true) {
        cmd->add_option("--cache", cache, "cache capacity C (bytes, MB or GB)")
            ->capture_default_str();
        cmd->add_option("--window", window, "sliding window size S in requests")
            ->capture_default_str();
        if (with_omega)
            cmd->add_option("--omega", omega, "variance sensitivity weight")
                ->capture_default_str();
        cmd->add_option("--latency", latency, "miss latency model: det or exp")
            ->capture_default_str();
        cmd->add_option("--L", base_latency_ms, "constant miss latency component in ms")
            ->capture_default_str();
        cmd->add_option("--c", per_byte_ms,
                        "per-byte miss latency in ms/byte (default L / 100 MB)");
        cmd->add_option("--cala-weight", cala_weight, "cala blend weight in [0,1]")
            ->capture_default_str();
        cmd->add_option("--mad-alpha", mad_alpha, "mad EWMA alpha in (0,1]")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "RNG seed")->required();
    }

    CacheConfig config(PolicyKind policy) const {
        CacheConfig cfg;
        cfg.capacity_bytes = parse_size_bytes(cache);
        cfg.window_size = window;
        cfg.omega = omega;
        cfg.policy = policy;
        if (!parse_latency_kind(latency, cfg.latency.kind))
            throw CLI::ValidationError("--latency", "expected det or exp, got '" + latency + "'");
        cfg.latency.base_ms = base_latency_ms;
        cfg.latency.per_byte_ms =
            per_byte_ms >= 0.0 ? per_byte_ms : base_latency_ms / 100'000'000.0;
        cfg.cala_weight = cala_weight;
        cfg.mad_alpha = mad_alpha;
        cfg.rng_seed = seed;
        return cfg;
    }
};

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!path.empty()) {
        file.open(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
        out = &file;
    }
    for (const auto& line : lines) *out << line << '\n';
    if (!*out) throw std::runtime_error("write failed");
}

int cmd_gen_trace(CLI::App& app) {
    auto* cmd = app.add_subcommand("gen-trace", "generate a synthetic trace CSV");
    auto spec = std::make_shared<SyntheticSpec>();
    auto arrival = std::make_shared<std::string>("poisson");
    auto size_min = std::make_shared<std::string>("1MB");
    auto size_max = std::make_shared<std::string>("100MB");
    auto output = std::make_shared<std::string>();
    cmd->add_option("--objects", spec->n_objects, "number of distinct objects")
        ->capture_default_str();
    cmd->add_option("--requests", spec->n_requests, "number of requests")->capture_default_str();
    cmd->add_option("--zipf-alpha", spec->zipf_alpha, "Zipf popularity exponent")
        ->capture_default_str();
    cmd->add_option("--arrival", *arrival, "arrival process: poisson or pareto")
        ->capture_default_str();
    cmd->add_option("--rate", spec->total_rate_per_ms, "total request rate per ms")
        ->capture_default_str();
    cmd->add_option("--pareto-shape", spec->pareto_shape, "Pareto gap shape (> 1)")
        ->capture_default_str();
    cmd->add_option("--size-min", *size_min, "minimum object size")->capture_default_str();
    cmd->add_option("--size-max", *size_max, "maximum object size")->capture_default_str();
    cmd->add_option("--seed", spec->seed, "RNG seed")->required();
    cmd->add_option("-o,--output", *output, "output trace CSV path")->required();

    cmd->callback([spec, arrival, size_min, size_max, output] {
        if (!parse_arrival_kind(*arrival, spec->arrival))
            throw CLI::ValidationError("--arrival",
                                       "expected poisson or pareto, got '" + *arrival + "'");
        spec->size_min_bytes = parse_size_bytes(*size_min);
        spec->size_max_bytes = parse_size_bytes(*size_max);
        const ValidatedTrace trace = gen_synthetic(*spec);
        io::write_trace_csv(*output, trace.events());

        const auto pop = empirical_popularity(trace);
        const auto& events = trace.events();
        std::cout << "wrote " << *output << ": " << events.size() << " requests, " << pop.size()
                  << " objects, span " << io::format_double(events.back().time_ms) << " ms\n";
        std::cout << "top objects:";
        for (std::size_t i = 0; i < std::min<std::size_t>(5, pop.size()); ++i)
            std::cout << ' ' << pop[i].object << ':' << pop[i].count;
        std::cout << '\n';
    });
    return 0;
}

void cmd_simulate(CLI::App& app) {
    auto* cmd = app.add_subcommand("simulate", "run one trace under one or more policies");
    auto trace_path = std::make_shared<std::string>();
    auto policy_list = std::make_shared<std::string>("va-stoch,lru");
    auto flags = std::make_shared<SimFlags>();
    auto output = std::make_shared<std::string>();
    auto episodes_path = std::make_shared<std::string>();
    cmd->add_option("trace", *trace_path, "trace CSV path")->required();
    cmd->add_option("--policy", *policy_list, "comma-separated policies")->capture_default_str();
    flags->add_to(cmd);
    cmd->add_option("-o,--output", *output, "report CSV path (default stdout)");
    cmd->add_option("--episodes", *episodes_path, "write per-episode JSON detail here");

    cmd->callback([trace_path, policy_list, flags, output, episodes_path] {
        const auto policies = parse_policies(*policy_list);
        const ValidatedTrace trace = load_trace(*trace_path);

        std::vector<SimReport> reports;
        std::optional<double> lru_total;
        for (PolicyKind policy : policies) {
            reports.push_back(simulate(trace, flags->config(policy)));
            if (policy == PolicyKind::Lru) lru_total = reports.back().total_latency_ms;
        }

        std::vector<std::string> lines{io::kReportHeader};
        for (const auto& r : reports) {
            std::optional<double> improvement;
            if (lru_total && *lru_total > 0.0)
                improvement = latency_improvement(*lru_total, r.total_latency_ms);
            lines.push_back(io::report_row(r, improvement));
        }
        write_lines(*output, lines);

        if (!episodes_path->empty()) {
            std::ofstream out(*episodes_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open '" + *episodes_path + "'");
            out << "[\n";
            for (std::size_t i = 0; i < reports.size(); ++i)
                out << io::episodes_json(reports[i]) << (i + 1 < reports.size() ? ",\n" : "\n");
            out << "]\n";
        }
    });
}

struct SweepAxis {
    std::string name;
    std::vector<double> numeric;       // omega / base_latency
    std::vector<std::uint64_t> sizes;  // cache_size / window
    std::size_t count() const { return numeric.empty() ? sizes.size() : numeric.size(); }
    std::string value_label(std::size_t i) const {
        return numeric.empty() ? std::to_string(sizes[i]) : io::format_double(numeric[i]);
    }
};

void cmd_sweep(CLI::App& app) {
    auto* cmd = app.add_subcommand("sweep", "sweep one axis over policies and repetitions");
    auto trace_path = std::make_shared<std::string>();
    auto axis_name = std::make_shared<std::string>();
    auto values_text = std::make_shared<std::string>();
    auto policy_list = std::make_shared<std::string>("va-stoch,lru");
    auto reps = std::make_shared<std::size_t>(1);
    auto jobs = std::make_shared<std::size_t>(0);
    auto flags = std::make_shared<SimFlags>();
    auto output = std::make_shared<std::string>();
    cmd->add_option("trace", *trace_path, "trace CSV path")->required();
    cmd->add_option("--axis", *axis_name, "omega | window | cache_size | base_latency")
        ->required();
    cmd->add_option("--values", *values_text, "comma-separated axis values")->required();
    cmd->add_option("--policies", *policy_list, "comma-separated policies")
        ->capture_default_str();
    cmd->add_option("--reps", *reps, "repetitions per setting (seed = base seed + index)")
        ->capture_default_str();
    cmd->add_option("--jobs", *jobs, "worker threads (default: hardware)");
    flags->add_to(cmd);
    cmd->add_option("-o,--output", *output, "sweep CSV path (default stdout)");

    cmd->callback([trace_path, axis_name, values_text, policy_list, reps, jobs, flags, output] {
        const auto policies = parse_policies(*policy_list);
        if (*reps < 1) throw CLI::ValidationError("--reps", "repetitions must be >= 1");

        SweepAxis axis;
        axis.name = *axis_name;
        if (axis.name == "omega" || axis.name == "base_latency") {
            axis.numeric = parse_doubles("--values", *values_text);
            std::sort(axis.numeric.begin(), axis.numeric.end());
        } else if (axis.name == "window" || axis.name == "cache_size") {
            for (const auto& item : split_list(*values_text))
                axis.sizes.push_back(parse_size_bytes(item));
            if (axis.sizes.empty()) throw CLI::ValidationError("--values", "empty value list");
            std::sort(axis.sizes.begin(), axis.sizes.end());
        } else {
            throw CLI::ValidationError(
                "--axis", "expected omega, window, cache_size or base_latency");
        }

        const ValidatedTrace trace = load_trace(*trace_path);

        struct Run {
            std::size_t value_idx, policy_idx, rep;
            CacheConfig config;
            SimReport report;
        };
        std::vector<Run> runs;
        for (std::size_t v = 0; v < axis.count(); ++v) {
            for (std::size_t p = 0; p < policies.size(); ++p) {
                for (std::size_t r = 0; r < *reps; ++r) {
                    CacheConfig cfg = flags->config(policies[p]);
                    cfg.rng_seed = flags->seed + r;
                    if (axis.name == "omega") cfg.omega = axis.numeric[v];
                    if (axis.name == "base_latency") {
                        cfg.latency.base_ms = axis.numeric[v];
                        if (flags->per_byte_ms < 0.0)
                            cfg.latency.per_byte_ms = axis.numeric[v] / 100'000'000.0;
                    }
                    if (axis.name == "window")
                        cfg.window_size = static_cast<std::size_t>(axis.sizes[v]);
                    if (axis.name == "cache_size") cfg.capacity_bytes = axis.sizes[v];
                    runs.push_back({v, p, r, cfg, {}});
                }
            }
        }

        std::size_t workers = *jobs ? *jobs : std::thread::hardware_concurrency();
        workers = std::max<std::size_t>(1, std::min(workers, runs.size()));
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < runs.size(); i = next.fetch_add(1))
                    runs[i].report = simulate(trace, runs[i].config);
            });
        }
        for (auto& t : pool) t.join();

        // Deterministic row order: axis value, policy label, repetition.
        std::sort(runs.begin(), runs.end(), [&](const Run& a, const Run& b) {
            if (a.value_idx != b.value_idx) return a.value_idx < b.value_idx;
            const std::string la = report_label(policies[a.policy_idx]);
            const std::string lb = report_label(policies[b.policy_idx]);
            if (la != lb) return la < lb;
            return a.rep < b.rep;
        });

        // LRU baseline per (axis value, repetition) group.
        std::vector<double> lru_totals(axis.count() * *reps, -1.0);
        for (const auto& run : runs)
            if (policies[run.policy_idx] == PolicyKind::Lru)
                lru_totals[run.value_idx * *reps + run.rep] = run.report.total_latency_ms;

        std::vector<std::string> lines{"axis,axis_value,repetition," +
                                       std::string(io::kReportHeader)};
        for (const auto& run : runs) {
            std::optional<double> improvement;
            const double base = lru_totals[run.value_idx * *reps + run.rep];
            if (base > 0.0) improvement = latency_improvement(base, run.report.total_latency_ms);
            lines.push_back(axis.name + ',' + axis.value_label(run.value_idx) + ',' +
                            std::to_string(run.rep) + ',' + io::report_row(run.report, improvement));
        }
        write_lines(*output, lines);
    });
}

int g_exit_code = 0;

void cmd_validate_moments(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "validate-moments", "compare analytic delay moments against the Monte Carlo oracle");
    auto lambdas_text = std::make_shared<std::string>("0.1,1,5");
    auto zs_text = std::make_shared<std::string>("0.5,1,4");
    auto models_text = std::make_shared<std::string>("det,exp");
    auto n = std::make_shared<std::size_t>(1'000'000);
    auto seed = std::make_shared<std::uint64_t>(0);
    auto output = std::make_shared<std::string>();
    cmd->add_option("--lambdas", *lambdas_text, "arrival rates per ms")->capture_default_str();
    cmd->add_option("--zs", *zs_text, "mean latencies in ms")->capture_default_str();
    cmd->add_option("--models", *models_text, "latency models: det,exp")->capture_default_str();
    cmd->add_option("--n", *n, "Monte Carlo samples per grid point")->capture_default_str();
    cmd->add_option("--seed", *seed, "RNG seed")->required();
    cmd->add_option("-o,--output", *output, "CSV path (default stdout)");

    cmd->callback([lambdas_text, zs_text, models_text, n, seed, output] {
        const auto lambdas = parse_doubles("--lambdas", *lambdas_text);
        const auto zs = parse_doubles("--zs", *zs_text);
        std::vector<LatencyKind> models;
        for (const auto& name : split_list(*models_text)) {
            LatencyKind kind;
            if (!parse_latency_kind(name, kind))
                throw CLI::ValidationError("--models", "expected det or exp, got '" + name + "'");
            models.push_back(kind);
        }
        if (models.empty()) throw CLI::ValidationError("--models", "no models given");

        std::vector<std::string> lines{io::kMomentsHeader};
        std::vector<std::string> failures;
        std::uint64_t row = 0;
        for (double lambda : lambdas) {
            for (double z : zs) {
                for (LatencyKind kind : models) {
                    const LatencyModel model = kind == LatencyKind::Deterministic
                                                   ? LatencyModel::deterministic(z)
                                                   : LatencyModel::exponential(z);
                    const DelayMoments analytic = kind == LatencyKind::Deterministic
                                                      ? moments_deterministic(lambda, z)
                                                      : moments_exponential(lambda, z);
                    Rng rng(*seed + row);
                    ++row;
                    const OracleResult mc = aggregate_delay_oracle(lambda, model, *n, rng);
                    std::ostringstream line;
                    line << io::format_double(lambda) << ',' << io::format_double(z) << ','
                         << to_string(kind) << ',' << io::format_double(analytic.mean_ms) << ','
                         << io::format_double(analytic.variance_ms2) << ','
                         << io::format_double(mc.moments.mean_ms) << ','
                         << io::format_double(mc.moments.variance_ms2) << ','
                         << io::format_double(mc.se_mean) << ','
                         << io::format_double(mc.se_variance) << ',' << mc.n_samples;
                    lines.push_back(line.str());

                    const bool mean_ok =
                        std::abs(mc.moments.mean_ms - analytic.mean_ms) <= 3.0 * mc.se_mean;
                    const bool var_ok =
                        analytic.variance_ms2 == 0.0
                            ? mc.moments.variance_ms2 == 0.0
                            : std::abs(mc.moments.variance_ms2 - analytic.variance_ms2) <=
                                  0.05 * analytic.variance_ms2;
                    if (!mean_ok || !var_ok) failures.push_back(line.str());
                }
            }
        }
        write_lines(*output, lines);
        if (!failures.empty()) {
            std::cerr << failures.size() << " grid point(s) outside tolerance:\n";
            for (const auto& f : failures) std::cerr << "  " << f << '\n';
            g_exit_code = 1;
        }
    });
}

void cmd_report(CLI::App& app) {
    auto* cmd = app.add_subcommand("report", "emit a trace characterization CSV");
    auto trace_path = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    cmd->add_option("trace", *trace_path, "trace CSV path")->required();
    cmd->add_option("-o,--output", *output, "characterization CSV path (default stdout)");

    cmd->callback([trace_path, output] {
        const ValidatedTrace trace = load_trace(*trace_path);
        std::vector<std::string> lines{io::kPopularityHeader};
        for (const auto& row : empirical_popularity(trace)) lines.push_back(io::popularity_row(row));
        write_lines(*output, lines);
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace-driven cache simulator for delayed hits under stochastic fetch latency"};
    app.require_subcommand(1);
    cmd_gen_trace(app);
    cmd_simulate(app);
    cmd_sweep(app);
    cmd_validate_moments(app);
    cmd_report(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // 2 on usage errors, 0 for --help
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return g_exit_code;
}
