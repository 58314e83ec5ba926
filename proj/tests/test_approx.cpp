#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bb84pns/approx.hpp"
#include "bb84pns/model.hpp"
#include "bb84pns/optimize.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace bb84pns;

namespace {

// maximize s_of_mu on a fine mu grid, skipping the infeasible tail
struct GridMax {
    double mu = 0.0;
    double s = -1e300;
};
GridMax maximize_s(const ApproxParams& p) {
    GridMax best;
    const double mu_hi = 2.0 * p.t / p.g2;
    for (int i = 1; i <= 4000; ++i) {
        double mu = mu_hi * i / 4001.0;
        try {
            double s = s_of_mu(mu, p);
            if (s > best.s) best = {mu, s};
        } catch (const ApproxInfeasibleError&) {
            continue;
        }
    }
    return best;
}

} // namespace

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(ApproxParams(0.1, 0.1, 1e-5, 1.0, 0.9));
    CHECK_THROWS_AS(ApproxParams(0.0, 0.1, 1e-5, 1.0, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(ApproxParams(1.5, 0.1, 1e-5, 1.0, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(ApproxParams(0.1, 0.0, 1e-5, 1.0, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(ApproxParams(0.1, 0.1, 1.0, 1.0, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(ApproxParams(0.1, 0.1, 1e-5, 0.0, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(ApproxParams(0.1, 0.1, 1e-5, 1.1, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(ApproxParams(0.1, 0.1, 1e-5, 1.0, 1.1), std::invalid_argument);
}

TEST_CASE("s_of_mu closed form") {
    ApproxParams p(0.1, 0.1, 1e-5, 1.0, 0.9);
    CHECK(s_of_mu(0.08, p) == doctest::Approx(5.8175806540558385e-5).epsilon(1e-12));
    CHECK_THROWS_AS(s_of_mu(0.0, p), std::invalid_argument);
    CHECK_THROWS_AS(s_of_mu(-0.1, p), std::invalid_argument);
    // mu > 2t/g2 leaves no single photons for Eve to forward
    CHECK_THROWS_AS(s_of_mu(0.21, p), ApproxInfeasibleError);
    // low visibility pushes D1 beyond 1/2
    ApproxParams noisy(0.1, 0.1, 1e-5, 1.0, 0.3);
    CHECK_THROWS_AS(s_of_mu(0.095, noisy), ApproxInfeasibleError);
}

TEST_CASE("s_of_mu matches the full engine on a two-photon-truncated source") {
    // source with p1 = mu, p2 = g2 mu^2/2 exactly; remaining gap is the
    // linearization of Bob's rate, O(g2 mu^2 t eta)
    const double t = std::pow(10.0, -0.5); // d = 20 km at 0.25 dB/km
    const double eta = 0.1, p_d = 1e-5, g2 = 1.0, v = 0.9;
    ApproxParams p(t, eta, p_d, g2, v);
    ChannelParams ch(0.25, 20.0, v);
    DetectorParams det(eta, p_d);
    for (double mu : {0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3}) {
        CAPTURE(mu);
        auto src = SourceModel::custom({1.0 - mu - g2 * mu * mu / 2.0, mu,
                                        g2 * mu * mu / 2.0}, 2);
        auto atk = optimize_attack(src, ch, det, ClonerKind::None);
        double s_full = secret_key_rate(src, ch, det, atk);
        double gap = std::abs(s_of_mu(mu, p) - s_full);
        CHECK(gap <= std::max(1e-6, 2.0 * g2 * mu * mu * t * eta));
    }
}

TEST_CASE("explicit optimum") {
    ApproxParams p(0.1, 0.1, 1e-5, 1.0, 0.95);
    CHECK(mu_star_approx(p) == doctest::Approx(0.08034795137905227).epsilon(1e-12));
    CHECK(s_approx(p) == doctest::Approx(0.00013851483514261109).epsilon(1e-12));
    // V = 1: mu* = t/g2 and S* = eta t^2 / (4 g2)
    ApproxParams perfect(0.1, 0.1, 1e-5, 1.0, 1.0);
    CHECK(mu_star_approx(perfect) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(s_approx(perfect) == doctest::Approx(2.5e-4).epsilon(1e-12));
    // the V = 0.8 boundary is the zero of the optimum (up to rounding in H)
    ApproxParams edge(0.1, 0.1, 1e-5, 1.0, 0.8);
    CHECK(std::abs(mu_star_approx(edge)) <= 1e-12);
    CHECK(std::abs(s_approx(edge)) <= 1e-24);
    ApproxParams below(0.1, 0.1, 1e-5, 1.0, 0.79);
    CHECK_THROWS_AS(mu_star_approx(below), ApproxInfeasibleError);
    CHECK_THROWS_AS(s_approx(below), ApproxInfeasibleError);
}

TEST_CASE("explicit optimum tracks the numerical maximum of s_of_mu") {
    // dark counts are kept negligible so the expansion's own optimum applies.
    // The small-disturbance expansion behind s_approx loses accuracy toward
    // the V = 0.9 edge: the measured shortfall there is ~20% of the true
    // maximum (mu* itself stays within 10%), so the rate bound is widened.
    for (double v : {0.9, 0.95, 1.0}) {
        for (double t : {0.02, 0.1, 0.3}) {
            CAPTURE(v);
            CAPTURE(t);
            ApproxParams p(t, 0.1, 1e-7, 1.0, v);
            GridMax gm = maximize_s(p);
            CHECK(std::abs(mu_star_approx(p) - gm.mu) <= 0.10 * gm.mu);
            CHECK(std::abs(s_approx(p) - gm.s) <= (v < 0.95 ? 0.25 : 0.10) * gm.s);
        }
    }
}

TEST_CASE("near-perfect visibility expansion") {
    CHECK(s_near_perfect_v(0.02, 0.1, 0.1, 1.0) ==
          doctest::Approx(0.00020960343205204441).epsilon(1e-12));
    CHECK(s_near_perfect_v(0.0, 0.1, 0.1, 1.0) == doctest::Approx(2.5e-4).epsilon(1e-12));
    // zero crossing where H(eps/2) reaches 1/2
    const double eps0 = 0.2200557288767191;
    CHECK(std::abs(s_near_perfect_v(eps0, 0.1, 0.1, 1.0)) < 1e-15);
    CHECK(s_near_perfect_v(0.21, 0.1, 0.1, 1.0) > 0.0);
    CHECK(s_near_perfect_v(0.23, 0.1, 0.1, 1.0) < 0.0);
    CHECK_THROWS_AS(s_near_perfect_v(-0.01, 0.1, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(s_near_perfect_v(0.26, 0.1, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("dark-count transmission limit") {
    auto tl = t_limit(0.1, 1e-5, 1.0, 0.25);
    CHECK(!tl.unbounded);
    CHECK(tl.t_lim == doctest::Approx(0.011774100225154747).epsilon(1e-12));
    CHECK(tl.d_lim == doctest::Approx(77.162890865817608).epsilon(1e-12));
    // p_d -> 4 p_d doubles t_lim and costs 10 log10(2) / alpha = 12.04 km
    auto tl4 = t_limit(0.1, 4e-5, 1.0, 0.25);
    CHECK(tl4.t_lim == doctest::Approx(2.0 * tl.t_lim).epsilon(1e-12));
    CHECK(tl4.d_lim - tl.d_lim == doctest::Approx(-12.041199826559248).epsilon(1e-9));
    // a cleaner source pushes the limit out: t_lim ~ sqrt(g2)
    auto tlq = t_limit(0.1, 1e-5, 0.25, 0.25);
    CHECK(tlq.t_lim == doctest::Approx(0.5 * tl.t_lim).epsilon(1e-12));
    auto unbounded = t_limit(0.1, 0.0, 1.0, 0.25);
    CHECK(unbounded.unbounded);
    CHECK(unbounded.t_lim == 0.0);
    CHECK(std::isinf(unbounded.d_lim));
    CHECK_THROWS_AS(t_limit(0.1, 1e-5, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("no positive rate survives at the transmission limit") {
    auto tl = t_limit(0.1, 1e-5, 1.0, 0.25);
    ApproxParams p(tl.t_lim, 0.1, 1e-5, 1.0, 1.0);
    GridMax gm = maximize_s(p);
    CHECK(gm.s <= 1e-7);
    // slightly above the limit a positive rate reappears
    ApproxParams above(2.0 * tl.t_lim, 0.1, 1e-5, 1.0, 1.0);
    CHECK(maximize_s(above).s > 1e-7);
}
