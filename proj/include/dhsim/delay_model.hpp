#pragma once

#include <cstddef>
#include <cstdint>

#include "dhsim/core.hpp"
#include "dhsim/rng.hpp"

namespace dhsim {

// Fetch latency distribution: a point mass at z, or an exponential with
// mean z (rate mu = 1/z).
struct LatencyModel {
    LatencyKind kind = LatencyKind::Deterministic;
    double mean_ms = 1.0;  // z

    static LatencyModel deterministic(double z_ms);
    static LatencyModel exponential(double z_ms);

    double rate() const { return 1.0 / mean_ms; }  // mu
};

// Mean and variance of the aggregate delay of one fetch episode.
struct DelayMoments {
    double mean_ms = 0.0;
    double variance_ms2 = 0.0;
};

// Deterministic latency z, Poisson(lambda) arrivals:
//   mean = z * (1 + lambda*z/2), variance = lambda * z^3 / 3.
DelayMoments moments_deterministic(double lambda_per_ms, double z_ms);

// Exponential latency with mean z, Poisson(lambda) arrivals:
//   mean = z + lambda*z^2, variance = z^2 + 6*lambda*z^3 + 5*lambda^2*z^4.
DelayMoments moments_exponential(double lambda_per_ms, double z_ms);

double sample_latency(const LatencyModel& model, Rng& rng);

struct OracleResult {
    DelayMoments moments;  // sample mean / unbiased sample variance
    double se_mean = 0.0;
    double se_variance = 0.0;
    std::size_t n_samples = 0;
};

// Monte Carlo reference for the aggregate delay: per sample draw the fetch
// time Z, a Poisson(lambda*Z) count of delayed hits, uniform offsets on
// (0, Z], and accumulate D = Z + sum(Z - offset).
OracleResult aggregate_delay_oracle(double lambda_per_ms, const LatencyModel& model,
                                    std::size_t n_samples, Rng& rng);

// Zero-arrival contribution of the aggregate-delay density: mu * e^{-(lambda+mu)d}.
double pdf_point_mass_term(double lambda, double mu, double d);

// Density of the aggregate delay given k >= 1 delayed hits and fetch time z;
// support (z, (k+1)z], zero outside. Alternating binomial sum evaluated with
// compensated long-double summation.
double conditional_pdf_given_k_z(int k, double z, double d);

struct PdfEvalConfig {
    int k_max = 20;        // truncation of the series over the hit count k
    int quad_points = 32;  // Gauss-Legendre nodes per smooth piece

    // k_max covering the Poisson tail at the 1-1e-6 latency quantile:
    // max(20, ceil(lambda*z_q + 8*sqrt(lambda*z_q))).
    static PdfEvalConfig for_params(double lambda, double z_mean);
};

struct PdfValue {
    double density = 0.0;
    // True when the k = k_max series term still contributed more than 1e-6
    // of the accumulated density.
    bool truncation_warning = false;
    double kmax_rel_contribution = 0.0;
};

// Numeric aggregate-delay density for exponential latency: point-mass term
// plus the truncated series of per-k quadratures over z in [d/(k+1), d].
PdfValue pdf_numeric(double lambda, double mu, double d, const PdfEvalConfig& cfg);

}  // namespace dhsim
