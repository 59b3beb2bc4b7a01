#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace dhsim {

// All stochastic code draws through this wrapper. std::*_distribution output
// sequences are implementation-defined, so every sampler here is pinned to an
// explicit algorithm over mt19937_64 to keep seeded runs reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on (0, 1]: never 0, safe under log().
    double uniform01() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

    // Uniform on [0, 1).
    double uniform01_left() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Inverse-CDF exponential with the given mean: -mean * ln(U), U on (0,1].
    double exponential(double mean) {
        if (!(mean > 0.0)) throw std::invalid_argument("exponential mean must be positive");
        return -mean * std::log(uniform01());
    }

    // Pareto with minimum `scale` and tail index `shape`.
    double pareto(double shape, double scale) {
        if (!(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("bad pareto parameters");
        return scale * std::pow(uniform01(), -1.0 / shape);
    }

    // Unbiased integer on [lo, hi] inclusive.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
        std::uint64_t range = hi - lo + 1;
        if (range == 0) return gen_();  // full 64-bit range
        std::uint64_t bound = UINT64_MAX - UINT64_MAX % range;
        std::uint64_t draw;
        do {
            draw = gen_();
        } while (draw >= bound);
        return lo + draw % range;
    }

    // Knuth product method, split into chunks so exp(-mean) never underflows.
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be non-negative");
        std::uint64_t total = 0;
        while (mean > 30.0) {
            total += poisson_knuth(30.0);
            mean -= 30.0;
        }
        return total + poisson_knuth(mean);
    }

private:
    std::uint64_t poisson_knuth(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = uniform01();
        while (prod > limit) {
            ++k;
            prod *= uniform01();
        }
        return k;
    }

    std::mt19937_64 gen_;
};

}  // namespace dhsim
