#include "bb84pns/attack.hpp"

#include <cmath>
#include <string>

namespace bb84pns {

namespace {

constexpr double prob_slack = 1e-12; // fp dust tolerated on an individual probability
constexpr double sum_tol = 1e-9;

void check_prob(double p, const char* name) {
    if (!(p >= -prob_slack && p <= 1.0 + prob_slack))
        throw std::invalid_argument(std::string("attack: ") + name + " = " +
                                    std::to_string(p) + " outside [0,1]");
}

} // namespace

double i1(double d1) {
    if (!(d1 >= 0.0 && d1 <= 0.5))
        throw std::domain_error("i1: disturbance " + std::to_string(d1) +
                                " outside [0,1/2]");
    return 1.0 - binary_entropy(0.5 + std::sqrt(d1 * (1.0 - d1)));
}

double i2_cloner_a(double d2) {
    if (!(d2 >= 0.0 && d2 <= 0.25))
        throw std::domain_error("i2_cloner_a: disturbance " + std::to_string(d2) +
                                " outside [0,1/4]");
    if (d2 == 0.0) return 0.0;
    // 8 d2 (1 - 4 d2) / (1 - 2 d2)^2 = 1 - ((1 - 6 d2)/(1 - 2 d2))^2 <= 1,
    // so the fidelity below stays in [1/2, 1]; clamp the sqrt argument's dust.
    const double arg = std::max(0.0, 8.0 * d2 * (1.0 - 4.0 * d2));
    const double p2 = std::min(1.0, 0.5 * (1.0 + std::sqrt(arg) / (1.0 - 2.0 * d2)));
    return 2.0 * d2 + (1.0 - 2.0 * d2) * (1.0 - binary_entropy(p2));
}

double i2(ClonerKind cloner, double d2) {
    switch (cloner) {
        case ClonerKind::None: return 0.0;
        case ClonerKind::ClonerA: return i2_cloner_a(d2);
        case ClonerKind::ClonerC: return 1.0;
    }
    throw std::logic_error("i2: bad cloner kind");
}

AttackStrategy::AttackStrategy(ClonerKind cloner, double p_c1, double p_b1, double p_l1,
                               double d1, double p_s2, double p_c2, double p_b2, double d2)
    : cloner(cloner), p_c1(p_c1), p_b1(p_b1), p_l1(p_l1), d1(d1), p_s2(p_s2), p_c2(p_c2),
      p_b2(p_b2), d2(d2) {
    check_prob(p_c1, "p_c1");
    check_prob(p_b1, "p_b1");
    check_prob(p_l1, "p_l1");
    check_prob(p_s2, "p_s2");
    check_prob(p_c2, "p_c2");
    check_prob(p_b2, "p_b2");
    if (std::abs(p_c1 + p_b1 + p_l1 - 1.0) > sum_tol)
        throw std::invalid_argument("attack: p_c1 + p_b1 + p_l1 != 1");
    if (std::abs(p_s2 + p_c2 + p_b2 - 1.0) > sum_tol)
        throw std::invalid_argument("attack: p_s2 + p_c2 + p_b2 != 1");
    if (!(d1 >= 0.0 && d1 <= 0.5))
        throw std::invalid_argument("attack: d1 outside [0,1/2]");
    switch (cloner) {
        case ClonerKind::None:
            if (std::abs(p_c2) > prob_slack)
                throw std::invalid_argument("attack: p_c2 != 0 without a cloner");
            break;
        case ClonerKind::ClonerA:
            if (!(d2 >= 0.0 && d2 <= 0.25))
                throw std::invalid_argument("attack: cloner A d2 outside [0,1/4]");
            break;
        case ClonerKind::ClonerC:
            if (std::abs(d2 - cloner_c_d2) > sum_tol)
                throw std::invalid_argument("attack: cloner C fixes d2 = " +
                                            std::to_string(cloner_c_d2));
            break;
    }
}

EveRates eve_rates(const SourceModel& source, const DetectorParams& detector,
                   const AttackStrategy& attack) {
    const double eta = detector.eta;
    EveRates r{};
    r.r1 = 0.5 * eta * source.p(1) * attack.p_c1;
    r.r_pass = 0.5 * eta * source.p(1) * attack.p_l1;
    r.r2s = 0.5 * eta * source.p(2) * attack.p_s2;
    r.r2c = 0.5 * (1.0 - (1.0 - eta) * (1.0 - eta)) * source.p(2) * attack.p_c2;
    double acc = 0.0, miss = (1.0 - eta) * (1.0 - eta); // (1-eta)^(n-1) at n = 3
    for (int n = 3; n <= source.n_max(); ++n) {
        acc += (1.0 - miss) * source.p(n); // one photon stored, n-1 forwarded
        miss *= 1.0 - eta;
    }
    r.r3 = 0.5 * acc;
    r.i_ae = r.r1 * i1(attack.d1) + r.r2s + r.r2c * i2(attack.cloner, attack.d2) + r.r3;
    return r;
}

std::pair<double, double> constraint_residuals(const SourceModel& source,
                                               const ChannelParams& channel,
                                               const DetectorParams& detector,
                                               const AttackStrategy& attack) {
    const EveRates er = eve_rates(source, detector, attack);
    const double expected = 0.5 * (1.0 - p_empty(source, channel.t(), detector.eta));
    const double res_rate = (er.r1 + er.r_pass + er.r2s + er.r2c + er.r3) - expected;
    const double res_error =
        (er.r1 * attack.d1 + er.r2c * attack.d2) - expected * (1.0 - channel.v) / 2.0;
    return {res_rate, res_error};
}

double secret_key_rate(const SourceModel& source, const ChannelParams& channel,
                       const DetectorParams& detector, const AttackStrategy& attack) {
    const auto [res_rate, res_error] = constraint_residuals(source, channel, detector, attack);
    if (std::abs(res_rate) > feasibility_tol || std::abs(res_error) > feasibility_tol)
        throw InfeasibleAttackError(
            "secret_key_rate: attack does not reproduce the observed statistics "
            "(rate residual " + std::to_string(res_rate) + ", error residual " +
                std::to_string(res_error) + ")",
            res_rate, res_error);
    const LinkRates link = link_rates(source, channel, detector);
    const EveRates er = eve_rates(source, detector, attack);
    return link.i_ab - er.i_ae;
}

double reverse_reconciliation_factor(int n, const DetectorParams& detector) {
    if (n < 1) throw std::invalid_argument("reverse_reconciliation_factor: n < 1");
    const double surv = std::pow(1.0 - detector.eta, n);
    const double dark = detector.p_d * surv;
    const double denom = (1.0 - surv) + dark;
    if (denom <= 0.0) return 1.0; // eta = ... cannot happen: eta > 0 => 1 - surv > 0
    return 1.0 - binary_entropy(dark / denom);
}

double cl_reference_mu(double eta) {
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("cl_reference_mu: eta outside (0,1)");
    return 2.0 / (1.0 - eta);
}

} // namespace bb84pns
