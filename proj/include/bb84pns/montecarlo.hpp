#pragma once

// Pulse-by-pulse Monte Carlo of the honest link, used as an independent check
// of the closed-form rates in model.hpp. Sampling is deliberately literal:
// draw the photon number, thin each photon by t*eta, split arrivals
// (1+V)/2 : (1-V)/2, fire a dark count on empty slots with probability p_d;
// the 1/2 sifting factor is applied analytically. Deterministic for a given
// seed: pulses are processed in fixed-size batches whose RNG streams are
// derived from (seed, batch index).

#include <cstdint>

#include "bb84pns/model.hpp"

namespace bb84pns {

struct SimConfig {
    long long n_pulses;
    std::uint64_t seed;
    SourceModel source;
    ChannelParams channel;
    DetectorParams detector;
};

struct SimResult {
    long long n_pulses;
    long long n_right;
    long long n_wrong;
    long long n_arrived;   ///< pulses with at least one surviving photon
    double c_right_hat;    ///< sifted, i.e. 1/2 * n_right / n_pulses
    double c_wrong_hat;
    double c_right_se;     ///< binomial standard errors of the estimates
    double c_wrong_se;
    double q_hat;          ///< n_wrong / (n_right + n_wrong); NaN if no counts
    double q_se;
    double arrived_hat;    ///< n_arrived / n_pulses (pre-sifting)
    double arrived_se;
};

SimResult simulate_link(const SimConfig& config);

} // namespace bb84pns
