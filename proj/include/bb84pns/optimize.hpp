#pragma once

// Eve-side and Alice-side optimization. optimize_attack maximizes I(A:E) over
// the strategy space of attack.hpp subject to the two reproduction
// constraints; optimize_mu then maximizes S = I(A:B) - I(A:E) over the mean
// photon number. grid_oracle is a deliberately simple exhaustive search used
// to cross-check optimize_attack. All functions are pure and deterministic.

#include <vector>

#include "bb84pns/attack.hpp"

namespace bb84pns {

// One fully solved operating point.
struct SecurityPoint {
    double d;   ///< distance, km
    double v;   ///< visibility
    double mu;  ///< mean photon number
    AttackStrategy attack;
    double q;
    double i_ab;
    double i_ae;
    double s;   ///< i_ab - i_ae, kept signed; clamp at display time
};

struct OptimalMu {
    double mu_star;
    SecurityPoint point;
    bool insecure; ///< true when max_mu S <= 0 (secure key rate is zero)
};

struct ScanResult {
    std::vector<SecurityPoint> points;
    ClonerKind cloner;
    double alpha;
    DetectorParams detector;
};

/// Best attack for Eve: maximize I(A:E) subject to reproducing Bob's count
/// and error rates. Canonical results have p_l1 = 0 and p_b2 = 0 and ties are
/// broken toward smaller p_c2, then smaller d1. Throws
/// InfeasibleChannelError when Eve cannot reach the required rate at all and
/// NoFeasibleAttackError when the constrained search is empty.
AttackStrategy optimize_attack(const SourceModel& source, const ChannelParams& channel,
                               const DetectorParams& detector, ClonerKind cloner);

/// Independent verification path: scan the constraint-reduced parameter space
/// (p_c2, and d2 for cloner A) on a uniform grid of `resolution` points per
/// axis, then refine once around the best cell. resolution >= 50 required.
AttackStrategy grid_oracle(const SourceModel& source, const ChannelParams& channel,
                           const DetectorParams& detector, ClonerKind cloner,
                           int resolution);

/// Alice's best Poissonian mean photon number at distance d (>= 10 km, where
/// line losses make the n >= 3 storage attack consistent): maximize S(mu)
/// over mu in [1e-4, 1], golden-section on log mu to 1e-4 relative. When
/// S <= 0 everywhere the best point is returned with insecure = true.
OptimalMu optimize_mu(double distance_km, double alpha, const DetectorParams& detector,
                      double visibility, ClonerKind cloner);

/// S vs distance at fixed V, distance range within [10, 150] km. For cloner
/// None / ClonerA each point reuses the cloner-C optimal mu at that distance
/// and re-optimizes only the attack (suboptimal-Eve comparison at equal
/// source settings). Monotonically nonincreasing in d.
ScanResult scan_distance(double d_min, double d_max, double step, double alpha,
                         const DetectorParams& detector, double visibility,
                         ClonerKind cloner);

/// S vs visibility at fixed distance, V range within [0.7, 1].
ScanResult scan_visibility(double distance_km, double v_min, double v_max, double step,
                           double alpha, const DetectorParams& detector, ClonerKind cloner);

/// Assemble a SecurityPoint from a solved attack (validates the residuals).
SecurityPoint make_security_point(const SourceModel& source, const ChannelParams& channel,
                                  const DetectorParams& detector, const AttackStrategy& attack);

} // namespace bb84pns
