#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bb84pns/optimize.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace bb84pns;

namespace {

const DetectorParams det(0.1, 1e-5);

bool same_strategy(const AttackStrategy& a, const AttackStrategy& b) {
    return a.cloner == b.cloner && a.p_c1 == b.p_c1 && a.p_b1 == b.p_b1 &&
           a.p_l1 == b.p_l1 && a.d1 == b.d1 && a.p_s2 == b.p_s2 && a.p_c2 == b.p_c2 &&
           a.p_b2 == b.p_b2 && a.d2 == b.d2;
}

void check_canonical(const SourceModel& src, const ChannelParams& ch,
                     const AttackStrategy& atk) {
    CHECK(atk.p_l1 == 0.0);
    // blocking pairs only ever pays when even p_c1 = 0 would overshoot
    // Bob's rate; the surviving singles then sit at d1 = 1/2 (a full bit,
    // the same as storage) so that as few as possible carry the errors
    if (atk.p_b2 > 0.0) CHECK((atk.d1 == 0.5 || atk.d1 == 0.0));
    CHECK(atk.p_c1 >= 0.0);
    CHECK(atk.p_c1 <= 1.0);
    CHECK(atk.p_c2 >= 0.0);
    CHECK(atk.p_c2 <= 1.0);
    CHECK(atk.d1 >= 0.0);
    CHECK(atk.d1 <= 0.5);
    auto [res_t, res_v] = constraint_residuals(src, ch, det, atk);
    CHECK(std::abs(res_t) <= feasibility_tol);
    CHECK(std::abs(res_v) <= feasibility_tol);
}

} // namespace

TEST_CASE("single-photon source gives the exact beam-splitting solution") {
    auto src = SourceModel::custom({0.0, 1.0});
    ChannelParams ch(0.25, 40.0, 0.9); // t = 0.1
    auto atk = optimize_attack(src, ch, det, ClonerKind::None);
    CHECK(atk.p_c1 == doctest::Approx(ch.t()).epsilon(1e-9));
    CHECK(atk.d1 == doctest::Approx(0.05).epsilon(1e-9));
    check_canonical(src, ch, atk);
}

TEST_CASE("perfect visibility forces a pure storage attack") {
    // at V = 1 Eve may introduce no error: d1 = 0 and no cloning
    auto om = optimize_mu(30.0, 0.25, det, 1.0, ClonerKind::ClonerC);
    CHECK(!om.insecure);
    CHECK(om.point.s > 0.0);
    CHECK(om.point.attack.d1 <= 1e-12);
    CHECK(om.point.attack.p_c2 <= 1e-12);
    // regression pins for the solved operating point
    CHECK(om.mu_star == doctest::Approx(0.19636478251283837).epsilon(1e-6));
    CHECK(om.point.s == doctest::Approx(0.00080567504364535355).epsilon(1e-6));
    // Eve's information reduces to the exact storage rate a2s + r3
    auto src = SourceModel::poissonian(om.mu_star);
    auto er = eve_rates(src, det, om.point.attack);
    CHECK(om.point.i_ae == doctest::Approx(er.r2s + er.r3).epsilon(1e-12));
}

TEST_CASE("cloner comparison at d=30, V=0.9") {
    auto om = optimize_mu(30.0, 0.25, det, 0.9, ClonerKind::ClonerC);
    CHECK(om.mu_star == doctest::Approx(0.10360557058316193).epsilon(1e-6));
    CHECK(om.point.s == doctest::Approx(0.00023786288738014981).epsilon(1e-6));

    auto src = SourceModel::poissonian(om.mu_star);
    ChannelParams ch(0.25, 30.0, 0.9);
    auto pt_none = make_security_point(src, ch, det,
                                       optimize_attack(src, ch, det, ClonerKind::None));
    auto pt_a = make_security_point(src, ch, det,
                                    optimize_attack(src, ch, det, ClonerKind::ClonerA));
    CHECK(pt_none.s == doctest::Approx(0.00025718884259266707).epsilon(1e-6));
    CHECK(pt_a.s == doctest::Approx(0.00025124717824881389).epsilon(1e-6));
    // a stronger two-photon machine can only help Eve
    CHECK(om.point.s <= pt_a.s);
    CHECK(pt_a.s <= pt_none.s);
}

TEST_CASE("saturated cloning below the visibility boundary") {
    // V = 0.85 is below the p_c2 = 1 saturation point: Eve clones every pair
    // and still needs single-photon disturbance to cover the error budget
    auto om = optimize_mu(30.0, 0.25, det, 0.85, ClonerKind::ClonerC);
    CHECK(om.point.attack.p_c2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(om.point.attack.d1 > 1e-3);
}

TEST_CASE("grid oracle agrees with the optimizer") {
    struct Inst {
        double mu, v, d;
        ClonerKind cloner;
    };
    const std::vector<Inst> battery = {
        {0.05, 0.85, 20.0, ClonerKind::ClonerC}, {0.10, 0.90, 30.0, ClonerKind::ClonerA},
        {0.20, 0.95, 15.0, ClonerKind::ClonerC}, {0.30, 1.00, 40.0, ClonerKind::ClonerA},
        {0.15, 0.80, 50.0, ClonerKind::ClonerC}, {0.40, 0.88, 10.0, ClonerKind::ClonerA},
        {0.25, 0.92, 25.0, ClonerKind::None},    {0.12, 0.87, 35.0, ClonerKind::ClonerC},
    };
    for (const auto& in : battery) {
        CAPTURE(in.mu);
        CAPTURE(in.v);
        CAPTURE(in.d);
        auto src = SourceModel::poissonian(in.mu);
        ChannelParams ch(0.25, in.d, in.v);
        auto opt = optimize_attack(src, ch, det, in.cloner);
        auto oracle = grid_oracle(src, ch, det, in.cloner, 200);
        double i_opt = eve_rates(src, det, opt).i_ae;
        double i_orc = eve_rates(src, det, oracle).i_ae;
        // the continuous optimizer may only beat the refined grid
        CHECK(i_opt >= i_orc - 1e-9);
        CHECK(std::abs(i_opt - i_orc) <= 1e-6);
        check_canonical(src, ch, opt);
    }
    auto src = SourceModel::poissonian(0.1);
    ChannelParams ch(0.25, 30.0, 0.9);
    CHECK_THROWS_AS(grid_oracle(src, ch, det, ClonerKind::ClonerC, 10),
                    std::invalid_argument);
}

TEST_CASE("a cloner never hurts Eve") {
    for (double v : {0.82, 0.9, 0.97}) {
        for (double d : {15.0, 30.0, 45.0}) {
            auto src = SourceModel::poissonian(0.15);
            ChannelParams ch(0.25, d, v);
            double none = eve_rates(src, det, optimize_attack(src, ch, det,
                                                              ClonerKind::None)).i_ae;
            double a = eve_rates(src, det, optimize_attack(src, ch, det,
                                                           ClonerKind::ClonerA)).i_ae;
            double c = eve_rates(src, det, optimize_attack(src, ch, det,
                                                           ClonerKind::ClonerC)).i_ae;
            CHECK(none <= a + 1e-12);
            CHECK(none <= c + 1e-12);
        }
    }
}

TEST_CASE("optimizer is deterministic") {
    auto src = SourceModel::poissonian(0.18);
    ChannelParams ch(0.25, 33.0, 0.91);
    auto a = optimize_attack(src, ch, det, ClonerKind::ClonerA);
    auto b = optimize_attack(src, ch, det, ClonerKind::ClonerA);
    CHECK(same_strategy(a, b));
    auto m1 = optimize_mu(27.0, 0.25, det, 0.93, ClonerKind::ClonerC);
    auto m2 = optimize_mu(27.0, 0.25, det, 0.93, ClonerKind::ClonerC);
    CHECK(m1.mu_star == m2.mu_star);
    CHECK(m1.point.s == m2.point.s);
    CHECK(same_strategy(m1.point.attack, m2.point.attack));
}

TEST_CASE("optimize_mu is a genuine argmax over mu") {
    auto om = optimize_mu(30.0, 0.25, det, 0.92, ClonerKind::ClonerC);
    ChannelParams ch(0.25, 30.0, 0.92);
    for (int i = 0; i <= 24; ++i) {
        double mu = std::exp(std::log(1e-4) + (std::log(1.0) - std::log(1e-4)) * i / 24.0);
        try {
            auto src = SourceModel::poissonian(mu);
            auto pt = make_security_point(src, ch, det,
                                          optimize_attack(src, ch, det, ClonerKind::ClonerC));
            CHECK(om.point.s >= pt.s - 1e-10);
        } catch (const InfeasibleError&) {
            continue; // mu outside Eve's feasible band
        }
    }
}

TEST_CASE("insecure flag below the visibility threshold") {
    auto om = optimize_mu(30.0, 0.25, det, 0.70, ClonerKind::ClonerC);
    CHECK(om.insecure);
    CHECK(om.point.s <= 0.0);
    CHECK(om.point.s == doctest::Approx(om.point.i_ab - om.point.i_ae).epsilon(1e-12));
}

TEST_CASE("distance floor and infeasibility errors") {
    CHECK_THROWS_AS(optimize_mu(5.0, 0.25, det, 0.9, ClonerKind::ClonerC),
                    std::invalid_argument);
    // at d = 150 the unavoidable n >= 3 storage rate overshoots Bob's rate
    auto bright = SourceModel::poissonian(1.0);
    ChannelParams far(0.25, 150.0, 0.9);
    CHECK_THROWS_AS(optimize_attack(bright, far, det, ClonerKind::None),
                    NoFeasibleAttackError);
    // on a lossless line Eve's forced photon loss undershoots at n >= 3
    ChannelParams lossless(0.25, 0.0, 0.9);
    auto src = SourceModel::poissonian(0.5);
    CHECK_THROWS_AS(optimize_attack(src, lossless, det, ClonerKind::ClonerC),
                    InfeasibleChannelError);
}

TEST_CASE("scan over distance") {
    auto scan = scan_distance(10.0, 60.0, 10.0, 0.25, det, 1.0, ClonerKind::ClonerC);
    REQUIRE(scan.points.size() == 6);
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
        CHECK(scan.points[i].d == doctest::Approx(10.0 + 10.0 * i));
        if (i > 0) CHECK(scan.points[i].s <= scan.points[i - 1].s + 1e-8);
    }
    // at V = 1 the cloner is forced off, so eavesdropping power does not matter
    auto scan_none = scan_distance(10.0, 60.0, 10.0, 0.25, det, 1.0, ClonerKind::None);
    REQUIRE(scan_none.points.size() == 6);
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
        CHECK(scan_none.points[i].mu == scan.points[i].mu);
        CHECK(scan_none.points[i].s == doctest::Approx(scan.points[i].s).epsilon(1e-12));
    }
    CHECK_THROWS_AS(scan_distance(5.0, 60.0, 10.0, 0.25, det, 1.0, ClonerKind::ClonerC),
                    std::invalid_argument);
    CHECK_THROWS_AS(scan_distance(10.0, 160.0, 10.0, 0.25, det, 1.0, ClonerKind::ClonerC),
                    std::invalid_argument);
}

TEST_CASE("scan over visibility") {
    auto scan = scan_visibility(30.0, 0.7, 1.0, 0.05, 0.25, det, ClonerKind::ClonerC);
    REQUIRE(scan.points.size() == 7);
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
        CHECK(scan.points[i].v == doctest::Approx(0.7 + 0.05 * i));
        if (i > 0) CHECK(scan.points[i].s >= scan.points[i - 1].s - 1e-8);
    }
    CHECK(scan.points.front().s <= 0.0); // V = 0.7 is deep in the insecure region
    CHECK(scan.points.back().s > 0.0);
    CHECK_THROWS_AS(scan_visibility(30.0, 0.6, 1.0, 0.05, 0.25, det, ClonerKind::ClonerC),
                    std::invalid_argument);
}

TEST_CASE("make_security_point validates the attack") {
    auto src = SourceModel::poissonian(0.1);
    ChannelParams ch(0.25, 30.0, 0.9);
    AttackStrategy block(ClonerKind::None, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    CHECK_THROWS_AS(make_security_point(src, ch, det, block), InfeasibleAttackError);

    auto atk = optimize_attack(src, ch, det, ClonerKind::ClonerC);
    auto pt = make_security_point(src, ch, det, atk);
    auto lr = link_rates(src, ch, det);
    CHECK(pt.q == doctest::Approx(lr.q).epsilon(1e-14));
    CHECK(pt.i_ab == doctest::Approx(lr.i_ab).epsilon(1e-14));
    CHECK(pt.s == doctest::Approx(pt.i_ab - pt.i_ae).epsilon(1e-12));
    CHECK(pt.mu == 0.1);
    CHECK(pt.d == 30.0);
    CHECK(pt.v == 0.9);
}
