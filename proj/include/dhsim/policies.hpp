#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dhsim/core.hpp"

namespace dhsim {

class DegenerateInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Scores are comparative: higher retention priority for higher values.
// Exponential-latency moments: [(z + l*z^2) + w*sqrt(z^2 + 6l*z^3 + 5l^2*z^4)] / (R*s).
double rank_stochastic(double lambda, double z, double omega, double residual, double size);

// Deterministic-latency moments: [z(1 + l*z/2) + w*sqrt(l*z^3/3)] / (R*s).
double rank_deterministic_va(double lambda, double z, double omega, double residual, double size);

// Mean-only deterministic rank: z(1 + l*z/2) / (R*s).
double rank_lac(double lambda, double z, double residual, double size);

// Blend of the observed delay EWMA and z^2 (normalized by 1 ms):
// [w*ewma + (1-w)*z^2] / (R*s), w in [0,1].
double rank_cala(double agg_delay_ewma, double z, double weight, double residual, double size);

// EWMA step for the observed episode delay: alpha*observed + (1-alpha)*ewma.
double mad_update(double ewma, double observed_aggdelay, double alpha);

struct RankParams {
    double omega = 1.0;
    double cala_weight = 0.5;
};

// Per-object inputs an eviction decision consumes.
struct EvictionCandidate {
    ObjectId object;
    std::uint64_t size_bytes = 0;
    double lambda_hat = 0.0;          // per ms
    double residual_ms = 1.0;         // R-hat
    double z_mean_ms = 1.0;           // mean miss latency
    double agg_delay_ewma_ms = 0.0;   // MAD / CALA tracker
    double episode_mean_ms = 0.0;     // toy policies: raw episode statistics
    double episode_std_ms = 0.0;
    std::uint64_t recency_seq = 0;    // higher = more recently requested
};

double rank_candidate(const EvictionCandidate& c, PolicyKind policy, const RankParams& params);

class CannotFitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Minimal prefix of cached objects, in ascending rank order, whose removal
// frees at least incoming_size bytes beyond free_bytes. Ties break by LRU
// order (least recent first), then ObjectId. LRU is the constant-rank
// degenerate case. Throws CannotFitError when everything is not enough.
std::vector<ObjectId> choose_victims(const std::vector<EvictionCandidate>& cached,
                                     std::uint64_t free_bytes, std::uint64_t incoming_size,
                                     PolicyKind policy, const RankParams& params);

struct AdmissionDecision {
    bool admit = true;
    std::vector<ObjectId> victims;
};

// Eviction plan for a completed fetch. The ranking policies always admit
// the newly fetched object; the toy kinds compare it against the would-be
// victims and bypass admission when it ranks below the best of them.
AdmissionDecision plan_admission(const std::vector<EvictionCandidate>& cached,
                                 std::uint64_t free_bytes, const EvictionCandidate& incoming,
                                 PolicyKind policy, const RankParams& params);

}  // namespace dhsim
