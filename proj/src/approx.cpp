#include "bb84pns/approx.hpp"

#include "bb84pns/attack.hpp"
#include "bb84pns/errors.hpp"
#include "bb84pns/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bb84pns {

namespace {

// The closed forms below keep only the leading orders in mu: Eve's relevant
// pulses are n = 1 (clone or block) and n = 2 (storage), with p_2 ~ g2 mu^2/2
// and every multiphoton pulse assumed delivered. They are meaningful in the
// weak-pulse regime mu << t and, for the optimal-mu forms, near-unit
// visibility where the n = 1 cloner is barely used.
void check_common(double t, double eta, double p_d, double g2) {
    if (!(t > 0.0) || t > 1.0)
        throw std::invalid_argument("approx: transmission must be in (0, 1]");
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("approx: detector efficiency must be in (0, 1]");
    if (p_d < 0.0 || p_d >= 1.0)
        throw std::invalid_argument("approx: dark count probability must be in [0, 1)");
    if (!(g2 > 0.0) || g2 > 1.0)
        throw std::invalid_argument("approx: g2 must be in (0, 1]");
}

void check_near_perfect(double v) {
    if (v < 0.8)
        throw ApproxInfeasibleError(
            "approx: the optimal-mu expansion assumes near-perfect visibility "
            "(V >= 0.8); at V = " + std::to_string(v) +
            " the single-photon cloner dominates and the expansion is invalid");
}

} // namespace

ApproxParams::ApproxParams(double t, double eta, double p_d, double g2, double v)
    : t(t), eta(eta), p_d(p_d), g2(g2), v(v) {
    check_common(t, eta, p_d, g2);
    if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("approx: visibility must be in [0, 1]");
}

double s_of_mu(double mu, const ApproxParams& p) {
    if (!(mu > 0.0)) throw std::invalid_argument("s_of_mu: mu must be positive");
    const double signal = mu * p.t * p.eta;
    const double q = 0.5 - p.v / (2.0 * (1.0 + 2.0 * p.p_d / signal));
    const double i_ab = 0.5 * (signal + 2.0 * p.p_d) * (1.0 - binary_entropy(q));

    // Eve: block what the two-photon surplus allows, clone the n = 1 rest.
    const double p_c1 = p.t - p.g2 * mu / 2.0;
    if (p_c1 < 0.0)
        throw ApproxInfeasibleError("s_of_mu: mu so large that blocked singles exceed "
                                    "the transmitted rate; the expansion breaks down");
    const double d1 = (1.0 - p.v) / (2.0 - p.g2 * mu / p.t);
    if (d1 < 0.0 || d1 > 0.5)
        throw ApproxInfeasibleError("s_of_mu: required cloner disturbance leaves [0, 1/2]");
    const double i_ae = 0.5 * mu * p.eta * (p_c1 * i1(d1) + p.g2 * mu / 2.0);
    return i_ab - i_ae;
}

double mu_star_approx(const ApproxParams& p) {
    check_near_perfect(p.v);
    const double q_opt = (1.0 - p.v) / 2.0;
    const double big_p = 0.5 - std::sqrt(p.v * (1.0 - p.v));
    // the margin vanishes at V = 0.8 up to rounding; never let it go negative
    const double margin =
        std::max(0.0, 1.0 - binary_entropy(q_opt) / binary_entropy(big_p));
    return (p.t / p.g2) * margin;
}

double s_approx(const ApproxParams& p) {
    check_near_perfect(p.v);
    const double q_opt = (1.0 - p.v) / 2.0;
    const double big_p = 0.5 - std::sqrt(p.v * (1.0 - p.v));
    const double hp = binary_entropy(big_p);
    const double margin = std::max(0.0, 1.0 - binary_entropy(q_opt) / hp);
    return 0.25 * p.eta * (p.t * p.t / p.g2) * hp * margin * margin;
}

double s_near_perfect_v(double eps, double t, double eta, double g2) {
    check_common(t, eta, 0.0, g2);
    if (eps < 0.0 || eps > 0.25)
        throw std::invalid_argument("s_near_perfect_v: eps must be in [0, 0.25]");
    return 0.5 * eta * t * (t / g2) * (0.5 - binary_entropy(eps / 2.0));
}

TransmissionLimit t_limit(double eta, double p_d, double g2, double alpha) {
    check_common(0.5, eta, p_d, g2); // t unused here, pass a valid placeholder
    if (!(alpha > 0.0))
        throw std::invalid_argument("t_limit: attenuation must be positive");
    if (p_d == 0.0) return TransmissionLimit{0.0, std::numeric_limits<double>::infinity(), true};
    // The V = 1 margin 1/4 eta t^2/g2 falls to the dark-count cost (ln2/2) p_d
    // at t^2 = 2 ln2 g2 p_d / eta; below that no mu is secure.
    const double t_lim = std::sqrt(2.0 * std::numbers::ln2 * g2 * p_d / eta);
    const double d_lim = -10.0 * std::log10(t_lim) / alpha;
    return TransmissionLimit{t_lim, d_lim, false};
}

} // namespace bb84pns
