#include "bb84pns/montecarlo.hpp"

#include "bb84pns/errors.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace bb84pns {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Top 53 bits of the engine output; uniform on [0, 1). Done by hand so the
// stream does not depend on the library's uniform_real_distribution.
double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double binom_se(double p_hat, double n) { return std::sqrt(p_hat * (1.0 - p_hat) / n); }

} // namespace

SimResult simulate_link(const SimConfig& cfg) {
    if (cfg.n_pulses < 1)
        throw std::invalid_argument("simulate_link: need at least one pulse");

    std::vector<double> cdf(static_cast<std::size_t>(cfg.source.n_max()) + 1);
    double acc = 0.0;
    for (int n = 0; n <= cfg.source.n_max(); ++n) {
        acc += cfg.source.p(n);
        cdf[static_cast<std::size_t>(n)] = acc;
    }
    cdf.back() = 1.0; // absorb the truncation tail into the top bin

    const double p_arrive = cfg.channel.t() * cfg.detector.eta;
    const double p_right_given_photon = (1.0 + cfg.channel.v) / 2.0;

    long long n_right = 0, n_wrong = 0, n_arrived = 0;
    constexpr long long batch_size = 1LL << 20; // reseed per batch, order-independent
    const long long n_batches = (cfg.n_pulses + batch_size - 1) / batch_size;
    for (long long b = 0; b < n_batches; ++b) {
        std::mt19937_64 eng(splitmix64(cfg.seed ^ static_cast<std::uint64_t>(b)));
        const long long in_batch =
            std::min(batch_size, cfg.n_pulses - b * batch_size);
        for (long long i = 0; i < in_batch; ++i) {
            const double u = uniform01(eng);
            int n = 0;
            while (cdf[static_cast<std::size_t>(n)] <= u) ++n;

            bool arrived = false;
            for (int k = 0; k < n; ++k) {
                if (uniform01(eng) < p_arrive) {
                    arrived = true;
                    break; // one detected photon already makes the pulse click
                }
            }
            if (arrived) ++n_arrived;

            if (arrived) {
                if (uniform01(eng) < p_right_given_photon)
                    ++n_right;
                else
                    ++n_wrong;
            } else {
                // each of the two outcomes can dark-fire independently
                if (uniform01(eng) < cfg.detector.p_d) ++n_right;
                if (uniform01(eng) < cfg.detector.p_d) ++n_wrong;
            }
        }
    }

    SimResult res{};
    res.n_pulses = cfg.n_pulses;
    res.n_right = n_right;
    res.n_wrong = n_wrong;
    res.n_arrived = n_arrived;
    const double n = static_cast<double>(cfg.n_pulses);
    // counters are pre-sifting; the 1/2 sifting factor enters here analytically
    const double right_raw = static_cast<double>(n_right) / n;
    const double wrong_raw = static_cast<double>(n_wrong) / n;
    res.c_right_hat = 0.5 * right_raw;
    res.c_wrong_hat = 0.5 * wrong_raw;
    res.c_right_se = 0.5 * binom_se(right_raw, n);
    res.c_wrong_se = 0.5 * binom_se(wrong_raw, n);
    res.arrived_hat = static_cast<double>(n_arrived) / n;
    res.arrived_se = binom_se(res.arrived_hat, n);
    const long long clicks = n_right + n_wrong;
    if (clicks == 0)
        throw NoCountsError("simulate_link: no detections; increase n_pulses "
                            "or the detection rates");
    res.q_hat = static_cast<double>(n_wrong) / static_cast<double>(clicks);
    res.q_se = binom_se(res.q_hat, static_cast<double>(clicks));
    return res;
}

} // namespace bb84pns
