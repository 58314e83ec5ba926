#pragma once

// Eve's attack space against the link in model.hpp: on single-photon pulses
// she clones (phase-covariant 1->2, disturbance d1), blocks, or passes; on
// two-photon pulses she stores one photon and forwards the other, applies a
// 2->3 cloner (disturbance d2), or blocks both; pulses with n >= 3 photons
// always lose one photon to her quantum memory. Her information rate and the
// two observables she must reproduce (Bob's count rate and error rate) are
// computed here.

#include <numbers>
#include <utility>

#include "bb84pns/model.hpp"

namespace bb84pns {

enum class ClonerKind { None, ClonerA, ClonerC };

/// Disturbance of the symmetric phase-covariant 2->3 cloner (cloner C),
/// at which it hands Eve full information: 1/2 (1 - 1/sqrt(2)).
inline constexpr double cloner_c_d2 = 0.5 * (1.0 - std::numbers::sqrt2 / 2.0);

/// Eve's information from an accepted single-photon clone at disturbance d1:
/// 1 - H(1/2 + sqrt(d1 (1 - d1))). Domain [0, 1/2].
double i1(double d1);

/// Information of the asymmetric universal 2->3 cloner (cloner A) at
/// disturbance d2 in [0, 1/4]; reaches 1 at d2 = 1/6, falls back to 1/2 at
/// d2 = 1/4.
double i2_cloner_a(double d2);

/// Cloner information dispatch: None -> 0, ClonerA -> i2_cloner_a(d2),
/// ClonerC -> 1 (its disturbance is pinned to cloner_c_d2).
double i2(ClonerKind cloner, double d2);

// A complete strategy. Probabilities are conditional on the photon number:
// p_c1 + p_b1 + p_l1 = 1 (clone / block / let pass, n = 1) and
// p_s2 + p_c2 + p_b2 = 1 (store / clone / block, n = 2), each within 1e-9.
// ClonerC pins d2 = cloner_c_d2; ClonerNone forces p_c2 = 0.
struct AttackStrategy {
    AttackStrategy(ClonerKind cloner, double p_c1, double p_b1, double p_l1, double d1,
                   double p_s2, double p_c2, double p_b2, double d2);

    ClonerKind cloner;
    double p_c1, p_b1, p_l1;
    double d1;
    double p_s2, p_c2, p_b2;
    double d2;
};

// Per-pulse sifted rates of the attack channels and the resulting
// information; r_pass carries rate but never information.
struct EveRates {
    double r1;     ///< accepted single-photon clones
    double r2s;    ///< accepted two-photon storage events
    double r2c;    ///< accepted two-photon cloning events
    double r3;     ///< accepted n >= 3 storage events
    double r_pass; ///< undisturbed single-photon pass-throughs
    double i_ae;   ///< r1 i1(d1) + r2s + r2c i2 + r3
};

EveRates eve_rates(const SourceModel& source, const DetectorParams& detector,
                   const AttackStrategy& attack);

/// (rate residual, error residual): how far the attack misses Bob's expected
/// photon count rate 1/2 (1 - p_B(0)) and optical error rate
/// 1/2 (1 - p_B(0)) (1 - V)/2. A reproducing attack has both near zero.
std::pair<double, double> constraint_residuals(const SourceModel& source,
                                               const ChannelParams& channel,
                                               const DetectorParams& detector,
                                               const AttackStrategy& attack);

/// S = I(A:B) - I(A:E) for an attack that reproduces the observed statistics;
/// residuals beyond feasibility_tol raise InfeasibleAttackError.
double secret_key_rate(const SourceModel& source, const ChannelParams& channel,
                       const DetectorParams& detector, const AttackStrategy& attack);

/// Tolerance on the constraint residuals accepted by secret_key_rate and
/// required of every optimizer result.
inline constexpr double feasibility_tol = 1e-9;

/// Reverse-reconciliation correction for n-photon pulses: 1 - H(eps_n) with
/// eps_n = p_d (1-eta)^n / (1 - (1-eta)^n + p_d (1-eta)^n), the probability
/// that Bob's detection was a dark count rather than Eve's forwarded photon.
double reverse_reconciliation_factor(int n, const DetectorParams& detector);

/// Mean photon number 2/(1 - eta) at which intercept-resend on two-photon
/// pulses would match the line's loss budget (diagnostic only).
double cl_reference_mu(double eta);

} // namespace bb84pns
