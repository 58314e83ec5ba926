#include "bb84pns/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

namespace bb84pns {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double tie_tol = 1e-12;

// Rate-unit coefficients of the reduced attack problem. With p_l1 = 0 the
// two reproduction constraints read
//   a1 p_c1 + a2s p_s2 + a2c p_c2 + r3 = c_ph
//   a1 p_c1 d1 + a2c p_c2 d2           = e_budget
// which pin the remaining knobs once (p_c2, d2) are chosen: normally Eve
// blocks no pairs (p_s2 = 1 - p_c2) and singles absorb the rate slack, but
// when even p_c1 = 0 overshoots Bob's rate she must block pairs as well.
struct Reduced {
    double a1;       // 1/2 eta p_A(1)
    double a2s;      // 1/2 eta p_A(2)
    double a2c;      // 1/2 (1 - (1-eta)^2) p_A(2)
    double r3;       // fixed storage rate from n >= 3
    double c_ph;     // Bob's expected photon rate 1/2 (1 - p_B(0))
    double e_budget; // optical error rate c_ph (1 - V)/2
};

Reduced reduce(const SourceModel& src, const ChannelParams& ch, const DetectorParams& det) {
    Reduced rp{};
    const double eta = det.eta;
    rp.a1 = 0.5 * eta * src.p(1);
    rp.a2s = 0.5 * eta * src.p(2);
    rp.a2c = 0.5 * (1.0 - (1.0 - eta) * (1.0 - eta)) * src.p(2);
    double acc = 0.0, miss = (1.0 - eta) * (1.0 - eta);
    for (int n = 3; n <= src.n_max(); ++n) {
        acc += (1.0 - miss) * src.p(n);
        miss *= 1.0 - eta;
    }
    rp.r3 = 0.5 * acc;
    rp.c_ph = 0.5 * (1.0 - p_empty(src, ch.t(), det.eta));
    rp.e_budget = rp.c_ph * (1.0 - ch.v) / 2.0;
    return rp;
}

struct Candidate {
    double p_c2 = 0.0;
    double d2 = 0.0;
    double p_c1 = 0.0;
    double d1 = 0.0;
    double p_s2 = 0.0;
    double info = neg_inf;
};

// Strictly better: more information; near-ties resolved toward smaller p_c2,
// then smaller d1 (canonical representative among equivalent optima).
bool better(const Candidate& a, const Candidate& b) {
    if (a.info > b.info + tie_tol) return true;
    if (a.info < b.info - tie_tol) return false;
    if (a.p_c2 < b.p_c2 - tie_tol) return true;
    if (a.p_c2 > b.p_c2 + tie_tol) return false;
    return a.d1 < b.d1 - tie_tol;
}

// Eliminate the remaining knobs for a given (p_c2, d2); nullopt when any
// leaves its box. i2v is the cloner information at d2.
//
// For fixed (p_c2, d2) the problem reduces to choosing the single-photon
// rate r1 = a1 p_c1 with r1 d1 = err1 fixed by the error budget. The payoff
// r1 i1(err1/r1) - r1 is maximal at the smallest admissible r1 because
// stored singles at d1 = 1/2 carry a full bit, exactly like stored pairs.
// The floor on r1 is whichever binds: the rate slack left after storing all
// non-cloned pairs (num), or 2 err1 so that d1 <= 1/2. When num < 2 err1
// Eve must block pairs to make room for the error-producing singles.
std::optional<Candidate> solve_candidate(const Reduced& rp, double c, double d2, double i2v) {
    c = std::clamp(c, 0.0, 1.0);
    double err1 = rp.e_budget - rp.a2c * c * d2; // error left for the n=1 cloner
    if (err1 < -1e-12) return std::nullopt;      // cloning overshoots the error rate
    err1 = std::max(0.0, err1);

    Candidate cand;
    cand.p_c2 = c;
    cand.d2 = d2;
    const double num = rp.c_ph - rp.r3 - rp.a2s * (1.0 - c) - rp.a2c * c;

    if (num >= 2.0 * err1) {
        // Pair-preserving regime: p_b2 = 0, singles absorb the rate slack.
        double p_c1;
        if (rp.a1 > 0.0) {
            p_c1 = num / rp.a1;
            if (p_c1 > 1.0 + 1e-11) return std::nullopt;
            p_c1 = std::min(p_c1, 1.0);
        } else {
            if (num > 1e-13) return std::nullopt; // no n=1 pulses to absorb the slack
            p_c1 = 0.0;
        }
        const double r1 = rp.a1 * p_c1;
        double d1 = 0.0;
        if (err1 > 0.0) d1 = r1 > 0.0 ? std::min(0.5, err1 / r1) : 0.0;
        cand.p_c1 = p_c1;
        cand.d1 = d1;
        cand.p_s2 = 1.0 - c;
        cand.info = r1 * i1(d1) + rp.a2s * cand.p_s2 + rp.a2c * c * i2v + rp.r3;
        return cand;
    }

    // Rate-saturated regime: the fewest singles that still produce err1 are
    // r1 = 2 err1 at d1 = 1/2; blocked pairs (p_b2 > 0) make up the rate.
    double p_c1 = 0.0;
    if (rp.a1 > 0.0) {
        p_c1 = 2.0 * err1 / rp.a1;
        if (p_c1 > 1.0 + 1e-11) return std::nullopt; // singles cannot produce err1
        p_c1 = std::min(p_c1, 1.0);
    } else if (err1 > 1e-13) {
        return std::nullopt;
    }
    const double stored = rp.c_ph - rp.r3 - rp.a2c * c - 2.0 * err1; // = a2s p_s2
    if (stored < -1e-12) return std::nullopt; // overdelivers even blocking all pairs
    double p_s2 = 0.0;
    if (rp.a2s > 0.0) {
        p_s2 = std::clamp(stored, 0.0, rp.a2s * (1.0 - c)) / rp.a2s;
    } else if (stored > 1e-13) {
        return std::nullopt; // no pairs available to store
    }
    cand.p_c1 = p_c1;
    cand.d1 = err1 > 0.0 ? 0.5 : 0.0;
    cand.p_s2 = p_s2;
    cand.info = rp.a1 * p_c1 * i1(cand.d1) + rp.a2s * p_s2 + rp.a2c * c * i2v + rp.r3;
    return cand;
}

struct Interval {
    double lo = 0.0, hi = 1.0;
    bool empty = false;
};

// Intersect the linear inequalities coef*c + cst >= 0 that delimit the
// feasible p_c2 set (an interval, possibly empty or degenerate). A point is
// feasible when the cloner fits the error budget, the required single rate
// max(num, 2 err1) fits in a1, and the least Eve can deliver while still
// producing the errors does not exceed Bob's rate.
Interval feasible_interval(const Reduced& rp, double d2) {
    Interval iv;
    const std::pair<double, double> rows[] = {
        {-rp.a2c * d2, rp.e_budget},                              // err1 >= 0
        {rp.a2c - rp.a2s, rp.a1 + rp.a2s + rp.r3 - rp.c_ph},      // num <= a1
        {-rp.a2c * (1.0 - 2.0 * d2), rp.c_ph - rp.r3 - 2.0 * rp.e_budget}, // 2 err1 <= rate slack
        {2.0 * rp.a2c * d2, rp.a1 - 2.0 * rp.e_budget},           // 2 err1 <= a1
    };
    for (auto [coef, cst] : rows) {
        if (coef == 0.0) {
            if (cst < -1e-13) iv.empty = true;
        } else if (coef > 0.0) {
            iv.lo = std::max(iv.lo, -cst / coef);
        } else {
            iv.hi = std::min(iv.hi, cst / -coef);
        }
    }
    if (iv.lo > iv.hi + 1e-15) iv.empty = true;
    return iv;
}

template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double xtol) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > xtol) {
        if (f1 >= f2) { // ties walk left, toward smaller arguments
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 >= f2 ? std::pair<double, double>{x1, f1} : std::pair<double, double>{x2, f2};
}

// Best candidate at fixed d2: bracket the maximum on a uniform grid over the
// feasible interval, polish with golden section, keep exact endpoints in the
// running since the optimum often sits on a feasibility boundary.
std::optional<Candidate> inner_best(const Reduced& rp, double d2, double i2v) {
    const Interval iv = feasible_interval(rp, d2);
    if (iv.empty) return std::nullopt;
    auto at = [&](double c) { return solve_candidate(rp, c, d2, i2v); };
    if (iv.hi - iv.lo < 1e-15) return at(iv.lo);

    constexpr int cells = 128;
    std::optional<Candidate> best;
    int best_i = 0;
    for (int i = 0; i <= cells; ++i) {
        const double c = iv.lo + (iv.hi - iv.lo) * i / cells;
        auto cand = at(c);
        if (cand && (!best || better(*cand, *best))) {
            best = cand;
            best_i = i;
        }
    }
    if (!best) return std::nullopt;

    const double bl = iv.lo + (iv.hi - iv.lo) * std::max(0, best_i - 1) / cells;
    const double bh = iv.lo + (iv.hi - iv.lo) * std::min(cells, best_i + 1) / cells;
    auto [cx, cf] = golden_max(
        [&](double c) {
            auto cand = at(c);
            return cand ? cand->info : neg_inf;
        },
        bl, bh, 1e-12);
    if (std::isfinite(cf)) {
        if (auto cand = at(cx); cand && better(*cand, *best)) best = cand;
    }
    return best;
}

[[noreturn]] void throw_infeasible(const Reduced& rp, ClonerKind cloner) {
    const double best2 = cloner == ClonerKind::None ? rp.a2s : std::max(rp.a2s, rp.a2c);
    if (rp.a1 + best2 + rp.r3 < rp.c_ph - 1e-12)
        throw InfeasibleChannelError(
            "optimize_attack: expected detection rate " + std::to_string(rp.c_ph) +
            " exceeds what Eve can deliver even forwarding everything (" +
            std::to_string(rp.a1 + best2 + rp.r3) + ")");
    throw NoFeasibleAttackError(
        "optimize_attack: no strategy reproduces the observed rate and error "
        "statistics at these settings");
}

AttackStrategy to_strategy(ClonerKind cloner, const Candidate& cand) {
    double d2 = cand.d2;
    if (cloner == ClonerKind::ClonerC) d2 = cloner_c_d2;
    if (cloner == ClonerKind::None) d2 = 0.0;
    if (cloner == ClonerKind::ClonerA && cand.p_c2 <= 1e-15) d2 = 0.0; // unused, canonical
    const double p_c1 = std::clamp(cand.p_c1, 0.0, 1.0);
    const double p_c2 = std::clamp(cand.p_c2, 0.0, 1.0);
    const double p_s2 = std::clamp(cand.p_s2, 0.0, 1.0 - p_c2);
    return AttackStrategy(cloner, p_c1, std::max(0.0, 1.0 - p_c1), 0.0, cand.d1,
                          p_s2, p_c2, std::max(0.0, 1.0 - p_s2 - p_c2), d2);
}

} // namespace

AttackStrategy optimize_attack(const SourceModel& source, const ChannelParams& channel,
                               const DetectorParams& detector, ClonerKind cloner) {
    const Reduced rp = reduce(source, channel, detector);
    std::optional<Candidate> best;
    switch (cloner) {
        case ClonerKind::None:
            best = solve_candidate(rp, 0.0, 0.0, 0.0);
            break;
        case ClonerKind::ClonerC:
            best = inner_best(rp, cloner_c_d2, 1.0);
            break;
        case ClonerKind::ClonerA: {
            // Outer search over d2 by iterated grid refinement; the inner
            // problem is solved exactly per d2 probe.
            double lo = 0.0, hi = 0.25;
            double best_d2 = 0.0;
            constexpr int rounds = 7;
            int points = 64;
            for (int round = 0; round < rounds; ++round) {
                int best_i = -1;
                for (int i = 0; i <= points; ++i) {
                    const double d2 = lo + (hi - lo) * i / points;
                    auto cand = inner_best(rp, d2, i2_cloner_a(d2));
                    if (cand && (!best || better(*cand, *best))) {
                        best = cand;
                        best_d2 = d2;
                        best_i = i;
                    }
                }
                if (!best) break;
                const double h = (hi - lo) / points;
                if (best_i >= 0) {
                    lo = std::max(0.0, best_d2 - h);
                    hi = std::min(0.25, best_d2 + h);
                } else { // this round added nothing; shrink around the incumbent
                    lo = std::max(0.0, best_d2 - h / 2);
                    hi = std::min(0.25, best_d2 + h / 2);
                }
                points = 16;
            }
            break;
        }
    }
    if (!best) throw_infeasible(rp, cloner);
    AttackStrategy attack = to_strategy(cloner, *best);
    const auto [rr, re] = constraint_residuals(source, channel, detector, attack);
    if (std::abs(rr) > feasibility_tol || std::abs(re) > feasibility_tol)
        throw std::logic_error("optimize_attack: internal feasibility violation");
    return attack;
}

AttackStrategy grid_oracle(const SourceModel& source, const ChannelParams& channel,
                           const DetectorParams& detector, ClonerKind cloner,
                           int resolution) {
    if (resolution < 50)
        throw std::invalid_argument("grid_oracle: resolution must be at least 50");

    // Independent elimination: same constraints written out directly, each
    // candidate materialized as an AttackStrategy and judged through the
    // public eve_rates / constraint_residuals path only.
    const double eta = detector.eta;
    const double p1 = source.p(1), p2 = source.p(2);
    const double a1 = 0.5 * eta * p1;
    const double a2s = 0.5 * eta * p2;
    const double a2c = 0.5 * (1.0 - (1.0 - eta) * (1.0 - eta)) * p2;
    double acc = 0.0, miss = (1.0 - eta) * (1.0 - eta);
    for (int n = 3; n <= source.n_max(); ++n) {
        acc += (1.0 - miss) * source.p(n);
        miss *= 1.0 - eta;
    }
    const double r3 = 0.5 * acc;
    const double c_ph = 0.5 * (1.0 - p_empty(source, channel.t(), detector.eta));
    const double e_budget = c_ph * (1.0 - channel.v) / 2.0;

    auto try_candidate = [&](double c, double d2) -> std::optional<AttackStrategy> {
        double err1 = e_budget - a2c * c * d2;
        if (err1 < -1e-12) return std::nullopt;
        err1 = std::max(0.0, err1);
        const double num = c_ph - r3 - a2s * (1.0 - c) - a2c * c;
        double p_c1 = 0.0, d1 = 0.0, p_s2 = 1.0 - c;
        if (num >= 2.0 * err1) { // pairs all kept, singles absorb the slack
            if (a1 > 0.0) {
                p_c1 = num / a1;
                if (p_c1 > 1.0 + 1e-11) return std::nullopt;
                p_c1 = std::min(p_c1, 1.0);
            } else if (num > 1e-13) {
                return std::nullopt;
            }
            const double r1 = a1 * p_c1;
            if (err1 > 0.0) d1 = r1 > 0.0 ? std::min(0.5, err1 / r1) : 0.0;
        } else { // rate-saturated: minimal singles at d1 = 1/2, pairs blocked
            if (a1 > 0.0) {
                p_c1 = 2.0 * err1 / a1;
                if (p_c1 > 1.0 + 1e-11) return std::nullopt;
                p_c1 = std::min(p_c1, 1.0);
            } else if (err1 > 1e-13) {
                return std::nullopt;
            }
            d1 = err1 > 0.0 ? 0.5 : 0.0;
            const double stored = c_ph - r3 - a2c * c - 2.0 * err1;
            if (stored < -1e-12) return std::nullopt;
            if (a2s > 0.0) {
                p_s2 = std::clamp(stored, 0.0, a2s * (1.0 - c)) / a2s;
            } else if (stored > 1e-13) {
                return std::nullopt;
            } else {
                p_s2 = 0.0;
            }
        }
        const double strat_d2 = cloner == ClonerKind::ClonerC ? cloner_c_d2
                              : cloner == ClonerKind::None    ? 0.0
                                                              : d2;
        AttackStrategy strat(cloner, p_c1, 1.0 - p_c1, 0.0, d1, p_s2, c,
                             std::max(0.0, 1.0 - p_s2 - c), strat_d2);
        const auto [rr, re] = constraint_residuals(source, channel, detector, strat);
        if (std::abs(rr) > feasibility_tol || std::abs(re) > feasibility_tol)
            return std::nullopt;
        return strat;
    };

    std::optional<AttackStrategy> best;
    double best_info = neg_inf, best_c = 0.0, best_d2 = 0.0;
    auto consider = [&](double c, double d2) {
        auto strat = try_candidate(c, d2);
        if (!strat) return;
        const double info = eve_rates(source, detector, *strat).i_ae;
        const bool wins =
            info > best_info + tie_tol ||
            (info >= best_info - tie_tol &&
             (c < best_c - tie_tol ||
              (c <= best_c + tie_tol && strat->d1 < best->d1 - tie_tol)));
        if (!best || wins) {
            best = strat;
            best_info = info;
            best_c = c;
            best_d2 = d2;
        }
    };

    const bool scan_d2 = cloner == ClonerKind::ClonerA;
    const double fixed_d2 = cloner == ClonerKind::ClonerC ? cloner_c_d2 : 0.0;

    auto sweep = [&](double c_lo, double c_hi, double d2_lo, double d2_hi) {
        for (int i = 0; i <= resolution; ++i) {
            const double c = cloner == ClonerKind::None
                                 ? 0.0
                                 : c_lo + (c_hi - c_lo) * i / resolution;
            if (scan_d2) {
                for (int j = 0; j <= resolution; ++j)
                    consider(c, d2_lo + (d2_hi - d2_lo) * j / resolution);
            } else {
                consider(c, fixed_d2);
            }
            if (cloner == ClonerKind::None) break;
        }
    };

    sweep(0.0, 1.0, 0.0, 0.25);
    if (best && cloner != ClonerKind::None) {
        // one refinement pass around the best cell
        const double hc = 1.0 / resolution;
        const double hd = 0.25 / resolution;
        sweep(std::max(0.0, best_c - hc), std::min(1.0, best_c + hc),
              std::max(0.0, best_d2 - hd), std::min(0.25, best_d2 + hd));
    }
    if (!best) {
        const Reduced rp = reduce(source, channel, detector);
        throw_infeasible(rp, cloner);
    }
    return *best;
}

SecurityPoint make_security_point(const SourceModel& source, const ChannelParams& channel,
                                  const DetectorParams& detector,
                                  const AttackStrategy& attack) {
    const auto [rr, re] = constraint_residuals(source, channel, detector, attack);
    if (std::abs(rr) > feasibility_tol || std::abs(re) > feasibility_tol)
        throw InfeasibleAttackError("security point: attack does not reproduce the "
                                    "observed statistics",
                                    rr, re);
    const LinkRates link = link_rates(source, channel, detector);
    const EveRates er = eve_rates(source, detector, attack);
    return SecurityPoint{channel.d, channel.v, source.mu(), attack,
                         link.q,    link.i_ab, er.i_ae,     link.i_ab - er.i_ae};
}

OptimalMu optimize_mu(double distance_km, double alpha, const DetectorParams& detector,
                      double visibility, ClonerKind cloner) {
    if (distance_km < 10.0)
        throw std::invalid_argument("optimize_mu: distance below the 10 km floor where "
                                    "the n >= 3 storage attack is consistent");
    const ChannelParams channel(alpha, distance_km, visibility);
    const double x_lo = std::log(1e-4), x_hi = std::log(1.0);

    auto eval = [&](double x) -> std::optional<SecurityPoint> {
        const double mu = std::exp(x);
        try {
            const SourceModel src = SourceModel::poissonian(mu);
            const AttackStrategy atk = optimize_attack(src, channel, detector, cloner);
            return make_security_point(src, channel, detector, atk);
        } catch (const InfeasibleError&) {
            return std::nullopt; // e.g. mu so large Eve would have to block pulses
        }
    };

    constexpr int coarse = 25;
    std::optional<SecurityPoint> best;
    int best_i = -1;
    for (int i = 0; i <= coarse; ++i) {
        const double x = x_lo + (x_hi - x_lo) * i / coarse;
        auto pt = eval(x);
        if (pt && (!best || pt->s > best->s)) {
            best = pt;
            best_i = i;
        }
    }
    if (!best)
        throw NoFeasibleAttackError("optimize_mu: no feasible mean photon number in "
                                    "[1e-4, 1]");

    const double bl = x_lo + (x_hi - x_lo) * std::max(0, best_i - 1) / coarse;
    const double bh = x_lo + (x_hi - x_lo) * std::min(coarse, best_i + 1) / coarse;
    auto [gx, gs] = golden_max(
        [&](double x) {
            auto pt = eval(x);
            return pt ? pt->s : neg_inf;
        },
        bl, bh, 1e-4);
    if (std::isfinite(gs) && gs > best->s) {
        if (auto pt = eval(gx)) best = pt;
    }
    return OptimalMu{best->mu, *best, best->s <= 0.0};
}

namespace {

std::vector<double> sweep_values(double lo, double hi, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("scan: step must be positive");
    if (hi < lo) throw std::invalid_argument("scan: empty range");
    std::vector<double> v;
    for (int i = 0;; ++i) {
        const double x = lo + step * i;
        if (x > hi + 1e-9) break;
        v.push_back(std::min(x, hi));
    }
    return v;
}

} // namespace

ScanResult scan_distance(double d_min, double d_max, double step, double alpha,
                         const DetectorParams& detector, double visibility,
                         ClonerKind cloner) {
    if (d_min < 10.0 || d_max > 150.0)
        throw std::invalid_argument("scan_distance: range must lie within [10, 150] km");
    ScanResult result{{}, cloner, alpha, detector};
    for (double d : sweep_values(d_min, d_max, step)) {
        const OptimalMu om = optimize_mu(d, alpha, detector, visibility, ClonerKind::ClonerC);
        if (cloner == ClonerKind::ClonerC) {
            result.points.push_back(om.point);
        } else {
            // Weaker-Eve comparison at the same source setting: reuse the
            // cloner-C optimal mu, re-optimize only the attack.
            const SourceModel src = SourceModel::poissonian(om.mu_star);
            const ChannelParams ch(alpha, d, visibility);
            const AttackStrategy atk = optimize_attack(src, ch, detector, cloner);
            result.points.push_back(make_security_point(src, ch, detector, atk));
        }
    }
    return result;
}

ScanResult scan_visibility(double distance_km, double v_min, double v_max, double step,
                           double alpha, const DetectorParams& detector,
                           ClonerKind cloner) {
    if (v_min < 0.7 || v_max > 1.0)
        throw std::invalid_argument("scan_visibility: range must lie within [0.7, 1]");
    ScanResult result{{}, cloner, alpha, detector};
    for (double v : sweep_values(v_min, v_max, step))
        result.points.push_back(optimize_mu(distance_km, alpha, detector, v, cloner).point);
    return result;
}

} // namespace bb84pns
