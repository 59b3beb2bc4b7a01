#pragma once

#include <cmath>
#include <cstddef>

namespace dhsim {

// One-pass central moments up to order four (Pebay update). The fourth
// moment backs the standard error of the variance estimate.
struct MomentAccumulator {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x) {
        const double n1 = static_cast<double>(n);
        ++n;
        const double nn = static_cast<double>(n);
        const double delta = x - mean;
        const double delta_n = delta / nn;
        const double delta_n2 = delta_n * delta_n;
        const double term1 = delta * delta_n * n1;
        mean += delta_n;
        m4 += term1 * delta_n2 * (nn * nn - 3.0 * nn + 3.0) + 6.0 * delta_n2 * m2 -
              4.0 * delta_n * m3;
        m3 += term1 * delta_n * (nn - 2.0) - 3.0 * delta_n * m2;
        m2 += term1;
    }

    // Unbiased (n-1) sample variance.
    double sample_variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }

    double central_moment4() const { return n > 0 ? m4 / static_cast<double>(n) : 0.0; }

    double se_mean() const {
        return n > 1 ? std::sqrt(sample_variance() / static_cast<double>(n)) : 0.0;
    }

    // SE of the unbiased variance estimator via the fourth central moment:
    // Var(s^2) ~ (m4 - (n-3)/(n-1) * s^4) / n.
    double se_variance() const {
        if (n < 2) return 0.0;
        const double nn = static_cast<double>(n);
        const double s2 = sample_variance();
        double v = (central_moment4() - (nn - 3.0) / (nn - 1.0) * s2 * s2) / nn;
        return v > 0.0 ? std::sqrt(v) : 0.0;
    }
};

// Running mean and population standard deviation (Welford).
struct WelfordStats {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    double population_variance() const { return n > 0 ? m2 / static_cast<double>(n) : 0.0; }
    double population_std() const { return std::sqrt(population_variance()); }
};

}  // namespace dhsim
