#include "dhsim/policies.hpp"

#include <algorithm>
#include <cmath>

#include "dhsim/delay_model.hpp"

namespace dhsim {

namespace {

void check_denominator(double residual, double size) {
    if (!(residual > 0.0)) throw DegenerateInputError("residual must be positive");
    if (!(size > 0.0)) throw DegenerateInputError("size must be positive");
}

void check_omega(double omega) {
    if (!(omega >= 0.0)) throw DegenerateInputError("omega must be >= 0");
}

bool is_toy(PolicyKind policy) {
    return policy == PolicyKind::ToyMean || policy == PolicyKind::ToyMeanStd;
}

struct RankedCandidate {
    double rank;
    const EvictionCandidate* candidate;
};

std::vector<RankedCandidate> ranked_ascending(const std::vector<EvictionCandidate>& cached,
                                              PolicyKind policy, const RankParams& params) {
    std::vector<RankedCandidate> ranked;
    ranked.reserve(cached.size());
    for (const auto& c : cached) ranked.push_back({rank_candidate(c, policy, params), &c});
    std::sort(ranked.begin(), ranked.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.rank != b.rank) return a.rank < b.rank;
        if (a.candidate->recency_seq != b.candidate->recency_seq)
            return a.candidate->recency_seq < b.candidate->recency_seq;  // least recent first
        return a.candidate->object < b.candidate->object;
    });
    return ranked;
}

}  // namespace

double rank_stochastic(double lambda, double z, double omega, double residual, double size) {
    check_denominator(residual, size);
    check_omega(omega);
    const DelayMoments m = moments_exponential(lambda, z);
    return (m.mean_ms + omega * std::sqrt(m.variance_ms2)) / (residual * size);
}

double rank_deterministic_va(double lambda, double z, double omega, double residual, double size) {
    check_denominator(residual, size);
    check_omega(omega);
    const DelayMoments m = moments_deterministic(lambda, z);
    return (m.mean_ms + omega * std::sqrt(m.variance_ms2)) / (residual * size);
}

double rank_lac(double lambda, double z, double residual, double size) {
    check_denominator(residual, size);
    return moments_deterministic(lambda, z).mean_ms / (residual * size);
}

double rank_cala(double agg_delay_ewma, double z, double weight, double residual, double size) {
    check_denominator(residual, size);
    if (!(weight >= 0.0 && weight <= 1.0))
        throw DegenerateInputError("cala weight must be in [0,1]");
    if (!(z > 0.0)) throw DegenerateInputError("non-positive latency");
    // z^2 is in ms^2; dividing by 1 ms keeps the blend in ms.
    return (weight * agg_delay_ewma + (1.0 - weight) * z * z) / (residual * size);
}

double mad_update(double ewma, double observed_aggdelay, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DegenerateInputError("alpha must be in (0,1]");
    return alpha * observed_aggdelay + (1.0 - alpha) * ewma;
}

double rank_candidate(const EvictionCandidate& c, PolicyKind policy, const RankParams& params) {
    const double size = static_cast<double>(c.size_bytes);
    switch (policy) {
        case PolicyKind::Lru:
            return 0.0;  // constant rank, recency tie-break reproduces LRU
        case PolicyKind::StochasticVA:
            return rank_stochastic(c.lambda_hat, c.z_mean_ms, params.omega, c.residual_ms, size);
        case PolicyKind::DeterministicVA:
            return rank_deterministic_va(c.lambda_hat, c.z_mean_ms, params.omega, c.residual_ms,
                                         size);
        case PolicyKind::Lac:
            return rank_lac(c.lambda_hat, c.z_mean_ms, c.residual_ms, size);
        case PolicyKind::Cala:
            return rank_cala(c.agg_delay_ewma_ms, c.z_mean_ms, params.cala_weight, c.residual_ms,
                             size);
        case PolicyKind::Mad:
            check_denominator(c.residual_ms, size);
            return c.agg_delay_ewma_ms / (c.residual_ms * size);
        case PolicyKind::ToyMean:
            return c.episode_mean_ms;
        case PolicyKind::ToyMeanStd:
            return c.episode_mean_ms + c.episode_std_ms;
    }
    throw DegenerateInputError("unknown policy");
}

std::vector<ObjectId> choose_victims(const std::vector<EvictionCandidate>& cached,
                                     std::uint64_t free_bytes, std::uint64_t incoming_size,
                                     PolicyKind policy, const RankParams& params) {
    if (free_bytes >= incoming_size) return {};
    const std::uint64_t need = incoming_size - free_bytes;
    auto ranked = ranked_ascending(cached, policy, params);
    std::vector<ObjectId> victims;
    std::uint64_t freed = 0;
    for (const auto& r : ranked) {
        victims.push_back(r.candidate->object);
        freed += r.candidate->size_bytes;
        if (freed >= need) return victims;
    }
    throw CannotFitError("evicting every cached object frees " + std::to_string(freed) +
                         " bytes, need " + std::to_string(need));
}

AdmissionDecision plan_admission(const std::vector<EvictionCandidate>& cached,
                                 std::uint64_t free_bytes, const EvictionCandidate& incoming,
                                 PolicyKind policy, const RankParams& params) {
    AdmissionDecision decision;
    if (free_bytes >= incoming.size_bytes) return decision;
    decision.victims = choose_victims(cached, free_bytes, incoming.size_bytes, policy, params);
    if (is_toy(policy) && !decision.victims.empty()) {
        // The incoming object competes with the costliest object it would
        // displace; it is bypassed when it ranks strictly lower.
        double worst_victim_rank = 0.0;
        for (const auto& c : cached) {
            for (const auto& id : decision.victims) {
                if (c.object == id)
                    worst_victim_rank =
                        std::max(worst_victim_rank, rank_candidate(c, policy, params));
            }
        }
        if (rank_candidate(incoming, policy, params) < worst_victim_rank) {
            decision.admit = false;
            decision.victims.clear();
        }
    }
    return decision;
}

}  // namespace dhsim
