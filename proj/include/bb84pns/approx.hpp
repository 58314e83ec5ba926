#pragma once

// Closed-form approximation layer, valid for high visibility and distances
// where dark counts are a small correction (2 p_d << mu t eta): the source is
// truncated after two photons (p_1 = mu, p_2 = g2 mu^2/2) and Bob's rate is
// linearized to mu t eta. Cross-checked against the full engine by the tests.

#include "bb84pns/errors.hpp"

namespace bb84pns {

struct ApproxParams {
    ApproxParams(double t, double eta, double p_d, double g2, double v);
    double t;   ///< line transmission, (0, 1]
    double eta;
    double p_d;
    double g2;  ///< second-order correlation, (0, 1]
    double v;
};

/// S(mu) with Eve restricted to passing/blocking/cloning single photons and
/// storing one photon of every pair: I(A:B) - I(A:E) with
///   I(A:B) = 1/2 (mu t eta + 2 p_d)(1 - H(Q)),
///   Q = 1/2 - V / (2 (1 + 2 p_d/(mu t eta))),
///   I(A:E) = 1/2 mu eta [(t - g2 mu/2) i1(D1) + g2 mu/2],
///   D1 = (1 - V) / (2 - g2 mu / t).
/// Throws ApproxInfeasibleError when mu leaves the validity region
/// (t - g2 mu/2 outside [0, 1] or D1 outside [0, 1/2]).
double s_of_mu(double mu, const ApproxParams& p);

/// Explicit optimal mean photon number (t/g2)(1 - H(Q_opt)/H(P)) with
/// Q_opt = (1-V)/2, P = 1/2 - sqrt(V(1-V)). Valid for V >= 0.8 (equals 0 at
/// the V = 0.8 boundary); V < 0.8 is rejected.
double mu_star_approx(const ApproxParams& p);

/// Explicit maximal rate 1/4 eta (t^2/g2) H(P) (1 - H(Q_opt)/H(P))^2 on the
/// same domain as mu_star_approx.
double s_approx(const ApproxParams& p);

/// Near-perfect-visibility rate at V = 1 - eps:
/// 1/2 eta t (t/g2) (1/2 - H(eps/2)), for eps in [0, 0.25]; crosses zero at
/// H(eps/2) = 1/2 (eps ~ 0.22).
double s_near_perfect_v(double eps, double t, double eta, double g2);

struct TransmissionLimit {
    double t_lim;    ///< transmission where dark counts erase the key rate
    double d_lim;    ///< corresponding distance in km for the given alpha
    bool unbounded;  ///< p_d = 0: no dark-count limit exists
};

/// Limiting transmission t_lim = sqrt(2 ln2 g2 p_d / eta) at V = 1 and the
/// matching distance -10 log10(t_lim)/alpha.
TransmissionLimit t_limit(double eta, double p_d, double g2, double alpha);

} // namespace bb84pns
