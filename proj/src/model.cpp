#include "bb84pns/model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bb84pns {

namespace {
constexpr double tail_tol = 1e-12;
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("binary_entropy: argument " + std::to_string(x) +
                                " outside [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double transmission(double alpha_db_per_km, double distance_km) {
    if (alpha_db_per_km < 0.0)
        throw std::invalid_argument("transmission: negative attenuation");
    if (distance_km < 0.0)
        throw std::invalid_argument("transmission: negative distance");
    return std::pow(10.0, -alpha_db_per_km * distance_km / 10.0);
}

SourceModel SourceModel::poissonian(double mu, int n_max) {
    if (mu < 0.0) throw std::invalid_argument("source: negative mean photon number");
    if (n_max < 2) throw std::invalid_argument("source: n_max must be at least 2");
    SourceModel s;
    s.kind_ = SourceKind::Poissonian;
    s.mu_ = mu;
    s.g2_ = 1.0;
    s.n_max_ = n_max;
    s.probs_.resize(static_cast<std::size_t>(n_max) + 1);
    double p = std::exp(-mu); // p_A(0), then recur p_A(n) = p_A(n-1) mu / n
    for (int n = 0; n <= n_max; ++n) {
        s.probs_[static_cast<std::size_t>(n)] = p;
        p *= mu / (n + 1);
    }
    double tail = 1.0 - std::accumulate(s.probs_.begin(), s.probs_.end(), 0.0);
    if (tail >= tail_tol)
        throw std::invalid_argument("source: Poissonian tail beyond n_max is " +
                                    std::to_string(tail) + ", raise n_max or lower mu");
    return s;
}

SourceModel SourceModel::custom(std::vector<double> probs, int n_max) {
    if (n_max < 2) throw std::invalid_argument("source: n_max must be at least 2");
    if (probs.empty()) throw std::invalid_argument("source: empty probability list");
    for (double p : probs)
        if (!(p >= 0.0) || !std::isfinite(p))
            throw std::invalid_argument("source: probabilities must be finite and >= 0");
    probs.resize(static_cast<std::size_t>(n_max) + 1, 0.0); // pad or truncate
    double norm = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (norm <= 0.0) throw std::invalid_argument("source: probabilities sum to zero");
    for (double& p : probs) p /= norm;

    SourceModel s;
    s.kind_ = SourceKind::Custom;
    s.n_max_ = n_max;
    s.probs_ = std::move(probs);
    s.mu_ = 0.0;
    for (int n = 1; n <= n_max; ++n) s.mu_ += n * s.probs_[static_cast<std::size_t>(n)];
    s.g2_ = s.probs_[1] > 0.0 ? 2.0 * s.probs_[2] / (s.probs_[1] * s.probs_[1]) : 0.0;
    return s;
}

double SourceModel::p(int n) const {
    if (n < 0) throw std::domain_error("source: negative photon number");
    if (n > n_max_) return 0.0;
    return probs_[static_cast<std::size_t>(n)];
}

ChannelParams::ChannelParams(double alpha_db_per_km, double distance_km, double visibility)
    : alpha(alpha_db_per_km), d(distance_km), v(visibility),
      t_(transmission(alpha_db_per_km, distance_km)) {
    if (!(visibility >= 0.0 && visibility <= 1.0))
        throw std::invalid_argument("channel: visibility " + std::to_string(visibility) +
                                    " outside [0,1]");
}

DetectorParams::DetectorParams(double eta, double p_d) : eta(eta), p_d(p_d) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("detector: efficiency " + std::to_string(eta) +
                                    " outside (0,1]");
    if (!(p_d >= 0.0 && p_d < 1.0))
        throw std::invalid_argument("detector: dark-count probability " +
                                    std::to_string(p_d) + " outside [0,1)");
}

double p_empty(const SourceModel& source, double t, double eta) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("p_empty: t outside (0,1]");
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("p_empty: eta outside (0,1]");
    const double miss = 1.0 - t * eta; // per-photon loss probability
    double acc = 0.0, w = 1.0;
    for (int n = 0; n <= source.n_max(); ++n) {
        acc += source.p(n) * w;
        w *= miss;
    }
    return acc;
}

LinkRates link_rates(const SourceModel& source, const ChannelParams& channel,
                     const DetectorParams& detector) {
    LinkRates r{};
    r.p_b0 = p_empty(source, channel.t(), detector.eta);
    const double hit = 1.0 - r.p_b0;
    r.c_right = 0.5 * (hit * (1.0 + channel.v) / 2.0 + r.p_b0 * detector.p_d);
    r.c_wrong = 0.5 * (hit * (1.0 - channel.v) / 2.0 + r.p_b0 * detector.p_d);
    const double total = r.c_right + r.c_wrong;
    if (total <= 0.0)
        throw NoCountsError("link_rates: no photon detections and no dark counts, "
                            "QBER undefined");
    r.q = r.c_wrong / total;
    r.i_ab = total * (1.0 - binary_entropy(r.q));
    return r;
}

} // namespace bb84pns
