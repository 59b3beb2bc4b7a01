#include "dhsim/delay_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dhsim/stats.hpp"

namespace dhsim {

namespace {

void check_rate_latency(double lambda, double z) {
    if (!(z > 0.0)) throw std::invalid_argument("non-positive latency");
    if (lambda < 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("negative rate");
}

struct GaussLegendre {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

// Nodes/weights by Newton iteration on the Legendre recurrence.
GaussLegendre compute_gauss_legendre(int n) {
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        gl.nodes[i] = -x;
        gl.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    return gl;
}

const GaussLegendre& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussLegendre> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

// Integer power by squaring; far cheaper than powl inside the hot sum.
long double ipow(long double base, int exp) {
    long double r = 1.0L;
    while (exp > 0) {
        if (exp & 1) r *= base;
        base *= base;
        exp >>= 1;
    }
    return r;
}

// Density at x of the sum of k iid uniforms on [0,1): the alternating
// binomial sum, in long double with Kahan compensation. The density is
// symmetric about k/2 and the sum only cancels acceptably on the lower
// half, so evaluate at min(x, k-x). The cancellation grows like e^{0.37k};
// past k ~ 110 even extended precision cannot resolve it and the normal
// limit N(k/2, k/12) takes over (closer than the surviving precision there).
double unit_uniform_sum_pdf(int k, double x) {
    if (k < 1 || !(x > 0.0) || !(x < static_cast<double>(k))) return 0.0;
    if (k == 1) return 1.0;
    if (k > 110) {
        const double mean = k / 2.0, var = k / 12.0;
        return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) /
               std::sqrt(2.0 * std::numbers::pi * var);
    }
    x = std::min(x, k - x);
    const int jmax = std::min(static_cast<int>(std::floor(x)), k);
    long double sum = 0.0L, comp = 0.0L;
    long double binom = 1.0L;  // C(k, j)
    const long double lx = static_cast<long double>(x);
    for (int j = 0; j <= jmax; ++j) {
        long double term = binom * ipow(lx - j, k - 1);
        if (j & 1) term = -term;
        long double y = term - comp;
        long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        binom = binom * (k - j) / (j + 1);
    }
    long double density = sum * expl(-lgammal(static_cast<long double>(k)));
    return density > 0.0L ? static_cast<double>(density) : 0.0;
}

}  // namespace

LatencyModel LatencyModel::deterministic(double z_ms) {
    if (!(z_ms > 0.0)) throw std::invalid_argument("non-positive latency");
    return {LatencyKind::Deterministic, z_ms};
}

LatencyModel LatencyModel::exponential(double z_ms) {
    if (!(z_ms > 0.0)) throw std::invalid_argument("non-positive latency");
    return {LatencyKind::Exponential, z_ms};
}

DelayMoments moments_deterministic(double lambda_per_ms, double z_ms) {
    check_rate_latency(lambda_per_ms, z_ms);
    return {z_ms * (1.0 + lambda_per_ms * z_ms / 2.0),
            lambda_per_ms * z_ms * z_ms * z_ms / 3.0};
}

DelayMoments moments_exponential(double lambda_per_ms, double z_ms) {
    check_rate_latency(lambda_per_ms, z_ms);
    const double z2 = z_ms * z_ms;
    const double z3 = z2 * z_ms;
    const double z4 = z3 * z_ms;
    return {z_ms + lambda_per_ms * z2,
            z2 + 6.0 * lambda_per_ms * z3 + 5.0 * lambda_per_ms * lambda_per_ms * z4};
}

double sample_latency(const LatencyModel& model, Rng& rng) {
    if (!(model.mean_ms > 0.0)) throw std::invalid_argument("non-positive latency");
    if (model.kind == LatencyKind::Deterministic) return model.mean_ms;
    return rng.exponential(model.mean_ms);
}

OracleResult aggregate_delay_oracle(double lambda_per_ms, const LatencyModel& model,
                                    std::size_t n_samples, Rng& rng) {
    if (n_samples < 1) throw std::invalid_argument("need at least one sample");
    if (lambda_per_ms < 0.0) throw std::invalid_argument("negative rate");
    MomentAccumulator acc;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double z = sample_latency(model, rng);
        const std::uint64_t k = rng.poisson(lambda_per_ms * z);
        double d = z;
        for (std::uint64_t j = 0; j < k; ++j) {
            const double offset = rng.uniform01() * z;  // arrival offset on (0, z]
            d += z - offset;
        }
        acc.add(d);
    }
    OracleResult r;
    r.moments = {acc.mean, acc.sample_variance()};
    r.se_mean = acc.se_mean();
    r.se_variance = acc.se_variance();
    r.n_samples = n_samples;
    return r;
}

double pdf_point_mass_term(double lambda, double mu, double d) {
    if (!(mu > 0.0)) throw std::invalid_argument("non-positive rate mu");
    if (lambda < 0.0) throw std::invalid_argument("negative rate");
    if (d < 0.0) throw std::invalid_argument("negative delay");
    return mu * std::exp(-(lambda + mu) * d);
}

double conditional_pdf_given_k_z(int k, double z, double d) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(z > 0.0)) throw std::invalid_argument("non-positive latency");
    return unit_uniform_sum_pdf(k, (d - z) / z) / z;
}

PdfEvalConfig PdfEvalConfig::for_params(double lambda, double z_mean) {
    check_rate_latency(lambda, z_mean);
    const double z_q = z_mean * -std::log(1e-6);  // 1 - 1e-6 quantile of Exp(1/z)
    const double lz = lambda * z_q;
    PdfEvalConfig cfg;
    cfg.k_max = std::max(20, static_cast<int>(std::ceil(lz + 8.0 * std::sqrt(lz))));
    cfg.quad_points = 32;
    return cfg;
}

PdfValue pdf_numeric(double lambda, double mu, double d, const PdfEvalConfig& cfg) {
    if (!(d > 0.0)) throw std::invalid_argument("delay must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("non-positive rate mu");
    if (lambda < 0.0) throw std::invalid_argument("negative rate");
    if (cfg.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    if (cfg.quad_points < 16) throw std::invalid_argument("quad_points must be >= 16");

    PdfValue out;
    double total = pdf_point_mass_term(lambda, mu, d);
    if (lambda == 0.0) {
        out.density = total;
        return out;
    }

    const auto& gl = gauss_legendre(cfg.quad_points);
    double last_term = 0.0;
    double prev_term = 0.0;
    int negligible_run = 0;
    bool converged = false;
    for (int k = 1; k <= cfg.k_max; ++k) {
        const double log_k_factorial = std::lgamma(k + 1.0);
        // Integrand is piecewise smooth in z with breaks at z = d/(j+1);
        // integrate each piece of [d/(k+1), d] separately.
        double term = 0.0;
        for (int j = k; j >= 1; --j) {
            const double a = d / (j + 1);
            const double b = d / j;
            const double half = 0.5 * (b - a);
            const double mid = 0.5 * (a + b);
            double piece = 0.0;
            for (int q = 0; q < cfg.quad_points; ++q) {
                const double z = mid + half * gl.nodes[q];
                const double log_weight = k * std::log(lambda * z) - lambda * z - log_k_factorial;
                if (log_weight < -700.0) continue;
                const double cond = conditional_pdf_given_k_z(k, z, d);
                if (cond <= 0.0) continue;
                piece += gl.weights[q] * std::exp(log_weight) * cond * mu * std::exp(-mu * z);
            }
            term += half * piece;
        }
        total += term;
        prev_term = last_term;
        last_term = term;
        // Once the contributions are falling and negligible for three
        // consecutive k the remaining tail cannot matter.
        if (k > 1 && term <= prev_term && term < 1e-13 * std::max(total, 1e-300)) {
            if (++negligible_run >= 3) {
                converged = true;
                break;
            }
        } else {
            negligible_run = 0;
        }
    }
    out.density = total;
    out.kmax_rel_contribution = total > 0.0 ? last_term / total : 0.0;
    out.truncation_warning = !converged && out.kmax_rel_contribution > 1e-6;
    return out;
}

}  // namespace dhsim
