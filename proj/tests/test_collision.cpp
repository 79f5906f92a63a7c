#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "euler3b/collision.hpp"
#include "euler3b/integrals.hpp"
#include "euler3b/kepler.hpp"
#include "test_util.hpp"

using namespace e3b;
using std::numbers::pi;

namespace {

PlanarKCoordinates focal_k(const MassModel& ms)
{
    PlanarKCoordinates k;
    k.G = testing::uniform(0.4, 1.2);
    k.Lambda = k.G / testing::uniform(0.3, 0.98);
    k.C = k.G + testing::uniform(0.1, 1.0);
    k.R_prime = testing::uniform(-1, 1);
    k.zeta = testing::uniform(-pi, pi);
    k.g_node = testing::uniform(-pi, pi);
    k.g_peri = testing::uniform(-pi, pi);
    // keep x away from x′ so the E1 term stays regular
    k.ell = testing::uniform(-pi, pi);
    k.r_prime = focal_radius(k.Lambda, k.G, k.g_peri, ms).r_prime;
    k.sigma = testing::uniform(0, 1) < 0.5 ? 1 : -1;
    return k;
}

}  // namespace

TEST_CASE("focal radius anchors")
{
    MassModel ms(1, 1e-3, 1e-3);
    const double k = ms.mr() * ms.mr() * ms.Mr();
    FocalRadius c = focal_radius(1.3, 1.3, 0.7, ms);
    CHECK(c.e == 0);
    CHECK(c.r_prime == doctest::Approx(1.69 / k).epsilon(1e-15));
    CHECK(c.r_prime == c.p);
    FocalRadius q = focal_radius(1.3, 0.8, pi / 2, ms);
    CHECK(q.r_prime == doctest::Approx(q.p).epsilon(1e-15));
    FocalRadius a = focal_radius(1.3, 0.8, 0, ms);
    CHECK(a.r_prime == doctest::Approx(a.p / (1 - a.e)).epsilon(1e-15));
    CHECK_THROWS_AS(focal_radius(1, 1.2, 0, ms), DomainError);
    CHECK_THROWS_AS(focal_radius(1, 0, 0, ms), DomainError);
}

TEST_CASE("focal configurations put x' on the ellipse")
{
    MassModel ms(1, 0, 1e-3);
    const double k = ms.mr() * ms.mr() * ms.Mr();
    double worst_E = 0, worst_geo = 0;
    for (int t = 0; t < 100; ++t) {
        PlanarKCoordinates kc = focal_k(ms);
        CartesianState s = planar_k_to_cartesian(kc, ms);
        EulerParts p = euler_decomposition(s.y, s.x, s.x_prime, ms);
        worst_E = std::max(worst_E, std::abs(p.E0 - k * kc.r_prime));

        // geometric oracle: the ellipse point at true anomaly ±(π − ḡ)
        OrbitalElements el = elements_from_cartesian(s.y, s.x, ms);
        const Vec3 M = angular_momentum(s.y, s.x);
        const Vec3 Q = (1 / norm(M)) * cross(M, el.P);
        const double pp = el.a * (1 - el.e * el.e);
        double best = 1e300;
        for (double nu : {pi - kc.g_peri, kc.g_peri - pi}) {
            const Vec3 x = (pp / (1 + el.e * std::cos(nu))) * (std::cos(nu) * el.P + std::sin(nu) * Q);
            best = std::min(best, norm(x - s.x_prime));
        }
        worst_geo = std::max(worst_geo, best);

        CollisionVerdict v = exclusion_verdict(s, ms);
        CHECK(v.margin < 1e-10);
        CHECK(v.threshold == 0);
        CHECK(std::abs(v.focal_residual) < 1e-8);
    }
    CHECK(worst_E < 1e-10);
    CHECK(worst_geo < 1e-8);
}

TEST_CASE("focal configurations with mu > 0 are never excluded")
{
    MassModel ms(1, 1e-3, 1e-3);
    for (int t = 0; t < 100; ++t) {
        PlanarKCoordinates kc = focal_k(ms);
        CollisionVerdict v = exclusion_verdict(kc, ms);
        CHECK(v.margin <= v.threshold * (1 + 1e-9));
        CHECK_FALSE(v.excluded);
        CHECK_FALSE(exclusion_verdict(kc, ms, 1).excluded);
    }
}

TEST_CASE("predicate follows margin and safety")
{
    MassModel ms(1, 1e-3, 1e-3);
    CartesianState s = planar_ellipse_state(1, 0.3, 0.4, {4, 0, 0}, ms);
    CollisionVerdict v = exclusion_verdict(s, ms);
    const double k = ms.mr() * ms.mr() * ms.Mr();
    CHECK(v.E == euler_integral_cartesian(s.y, s.x, s.x_prime, ms));
    CHECK(v.r_prime == 4);
    CHECK(v.threshold == doctest::Approx(1e-3 * k * 4).epsilon(1e-15));
    CHECK(v.margin == std::abs(v.E - k * 4));
    const double ratio = v.margin / v.threshold;
    REQUIRE(ratio > 10);
    CHECK(exclusion_verdict(s, ms, 10).excluded);
    CHECK(exclusion_verdict(s, ms, 0.999 * ratio).excluded);
    CHECK_FALSE(exclusion_verdict(s, ms, 1.001 * ratio).excluded);
    CHECK_THROWS_AS(exclusion_verdict(s, ms, 0.5), DomainError);
}

TEST_CASE("verdict is constant along a two-centre trajectory")
{
    MassModel ms(1, 1e-3, 1e-3);
    CartesianState s0 = planar_ellipse_state(1, 0.3, 0.4, {4, 0, 0}, ms);
    IntegratorConfig cfg;
    cfg.t_end = 20 * inner_period(1, ms);
    cfg.sample_dt = cfg.t_end / 200;
    Trajectory traj = flow_two_centre(s0, ms, cfg);
    INFO(traj.truncation_reason);
    REQUIRE(!traj.truncated);
    ExclusionSweep sw = sweep_exclusion(traj, ms);
    CHECK_FALSE(sw.entered_band);
    const CollisionVerdict& v0 = sw.samples.front().verdict;
    for (const SweepSample& s : sw.samples) {
        CHECK(s.verdict.excluded == v0.excluded);
        CHECK(s.verdict.r_prime == v0.r_prime);
        CHECK(std::abs(s.verdict.margin - v0.margin) < 1e-9 * v0.margin);
    }
    CHECK(std::abs(sw.max_margin_decay) < 1e-6);
}

TEST_CASE("excluded sweep respects the geometric floor")
{
    MassModel ms(1, 1e-9, 1e-3);
    CartesianState s0 = planar_ellipse_state(1, 0.3, 0.4, {4, 0, 0}, ms);
    IntegratorConfig cfg;
    cfg.t_end = 5 * inner_period(1, ms);
    cfg.sample_dt = cfg.t_end / 100;
    ExclusionSweep sw = sweep_exclusion(flow_two_centre(s0, ms, cfg), ms);
    CHECK_FALSE(sw.entered_band);
    for (const SweepSample& s : sw.samples) {
        CHECK(s.geometric_floor == doctest::Approx(4 - 1.3).epsilon(1e-6));
        CHECK(s.min_separation >= s.geometric_floor * (1 - 1e-6));
    }
    CHECK(sw.min_abs_focal_residual > 2);
}

TEST_CASE("a run through a focal configuration is flagged")
{
    MassModel ms(1, 1e-3, 1e-3);
    PlanarKCoordinates kc;
    kc.G = 0.8;
    kc.Lambda = 1;
    kc.C = 1.5;
    kc.g_peri = 2.0;
    kc.ell = 1.0;
    kc.r_prime = focal_radius(kc.Lambda, kc.G, kc.g_peri, ms).r_prime;
    CartesianState s0 = planar_k_to_cartesian(kc, ms);
    IntegratorConfig cfg;
    cfg.t_end = 0.5;
    cfg.sample_dt = 0.1;
    cfg.floor_factor = 1e-3;
    ExclusionSweep sw = sweep_exclusion(flow_two_centre(s0, ms, cfg), ms);
    CHECK(sw.entered_band);
    CHECK_FALSE(sw.samples.front().verdict.excluded);
}

TEST_CASE("sweep errors and csv")
{
    MassModel ms(1, 1e-3, 1e-3);
    CHECK_THROWS_AS(sweep_exclusion(Trajectory{}, ms), DomainError);
    CartesianState s0 = planar_ellipse_state(1, 0.3, 0.4, {4, 0, 0}, ms);
    IntegratorConfig cfg;
    cfg.t_end = 1;
    cfg.sample_dt = 0.5;
    ExclusionSweep sw = sweep_exclusion(flow_two_centre(s0, ms, cfg), ms);
    std::ostringstream os;
    write_verdict_csv(os, sw);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,E,margin,threshold,excluded,min_separation");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("margin decay along the three-body scaling runs")
{
    for (double eps : {1e-3, 5e-4}) {
        MassModel ms(1, 1e-3, eps);
        CartesianState s0 = planar_ellipse_state(2, 0.3, 1, {1, 0, 0}, ms);
        IntegratorConfig cfg;
        cfg.t_end = 50 * outer_period(1, ms);
        cfg.sample_dt = cfg.t_end / 50;
        Trajectory traj = flow_three_body(s0, ms, cfg);
        REQUIRE(!traj.truncated);
        ExclusionSweep sw = sweep_exclusion(traj, ms);
        MESSAGE("eps " << eps << " change/threshold " << sw.max_margin_change);
        CHECK(sw.samples.front().verdict.excluded);
        CHECK(sw.max_margin_decay < 0.1);
    }
}
