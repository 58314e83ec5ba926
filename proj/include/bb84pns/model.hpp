#pragma once

// Honest-party model of a weak-pulse BB84 link: photon-number distribution of
// the source, lossy fibre, imperfect interference (visibility V) and a
// threshold detector with efficiency eta and dark-count probability p_d.
// Everything downstream (attack engine, optimizers, Monte Carlo) builds on
// the quantities defined here.

#include <vector>

#include "bb84pns/errors.hpp"

namespace bb84pns {

/// Shannon binary entropy in bits; H(0) = H(1) = 0. Throws std::domain_error
/// outside [0,1].
double binary_entropy(double x);

/// Fibre transmission t = 10^(-alpha d / 10) for attenuation alpha in dB/km
/// and distance d in km. Negative inputs are rejected.
double transmission(double alpha_db_per_km, double distance_km);

enum class SourceKind { Poissonian, Custom };

// Photon-number distribution p_A(n), truncated at n_max. Poissonian sources
// keep the closed-form probabilities (the tail beyond n_max must be below
// 1e-12); custom distributions are renormalized after truncation/padding.
class SourceModel {
public:
    static SourceModel poissonian(double mu, int n_max = default_n_max);
    static SourceModel custom(std::vector<double> probs, int n_max = default_n_max);

    SourceKind kind() const { return kind_; }
    /// Mean photon number (for custom sources: the derived mean).
    double mu() const { return mu_; }
    /// Second-order correlation 2 p_A(2)/p_A(1)^2; 1 for Poissonian, 0 when
    /// the source emits no photon pairs. Range-checked only where it is used
    /// as a model input.
    double g2() const { return g2_; }
    int n_max() const { return n_max_; }
    const std::vector<double>& probs() const { return probs_; }
    double p(int n) const;

    static constexpr int default_n_max = 20;

private:
    SourceModel() = default;
    SourceKind kind_ = SourceKind::Poissonian;
    double mu_ = 0.0;
    double g2_ = 1.0;
    int n_max_ = default_n_max;
    std::vector<double> probs_; // index n = 0..n_max
};

// Fibre parameters plus interference visibility. d = 0 (t = 1) is legal here;
// the optimizers impose their own distance floor.
struct ChannelParams {
    ChannelParams(double alpha_db_per_km, double distance_km, double visibility);
    double alpha;
    double d;
    double v;
    double t() const { return t_; }

private:
    double t_;
};

struct DetectorParams {
    DetectorParams(double eta, double p_d);
    double eta;
    double p_d;
};

// Per-pulse sifted count rates of the honest link.
struct LinkRates {
    double p_b0;    ///< probability that no photon reaches the detector
    double c_right; ///< correct sifted count rate
    double c_wrong; ///< erroneous sifted count rate
    double q;       ///< QBER c_wrong / (c_right + c_wrong)
    double i_ab;    ///< Alice-Bob mutual information per pulse
};

/// Probability that no photon arrives: sum_n p_A(n) (1 - t eta)^n.
double p_empty(const SourceModel& source, double t, double eta);

/// Honest-link rates. C_right/C_wrong combine photon detections, split
/// (1+V)/2 : (1-V)/2, with dark counts p_B(0) p_d on empty slots; the 1/2
/// sifting factor is included. Throws NoCountsError when both rates vanish.
LinkRates link_rates(const SourceModel& source, const ChannelParams& channel,
                     const DetectorParams& detector);

} // namespace bb84pns
