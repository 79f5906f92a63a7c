#include <chrono>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "euler3b/dynamics.hpp"
#include "euler3b/kepler.hpp"
#include "test_util.hpp"

using namespace e3b;
using namespace e3b::testing;

namespace {

CartesianState random_spatial()
{
    CartesianState s;
    s.dim = 3;
    for (int i = 0; i < 3; ++i) {
        s.y_prime[i] = uniform(-1, 1);
        s.y[i] = uniform(-1, 1);
        s.x_prime[i] = uniform(-3, 3);
        s.x[i] = uniform(-1, 1);
    }
    s.x_prime[0] += 4;
    return s;
}

Phase fd_hamilton(const std::function<double(const CartesianState&)>& H, const CartesianState& s)
{
    const double h = 1e-6;
    Phase z = to_phase(s), out{};
    for (int i = 0; i < 12; ++i) {
        Phase zp = z, zm = z;
        zp[i] += h;
        zm[i] -= h;
        double d = (H(from_phase(zp, 3)) - H(from_phase(zm, 3))) / (2 * h);
        // momenta occupy 0..5, positions 6..11
        if (i < 6) out[i + 6] = d; else out[i - 6] = -d;
    }
    return out;
}

double max_rel(const Phase& a, const Phase& b)
{
    double scale = 0, diff = 0;
    for (int i = 0; i < 12; ++i) {
        scale = std::max(scale, std::abs(b[i]));
        diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    return diff / std::max(scale, 1e-300);
}

const MassModel ms_c(1, 1e-3, 1e-3);

}  // namespace

TEST_CASE("vector fields match finite differences of the Hamiltonians")
{
    MassModel ms(1, 0.3, 0.2);
    for (int k = 0; k < 50; ++k) {
        CartesianState s = random_spatial();
        auto J = [&](const CartesianState& c) { return two_centre_energy(c.y, c.x, c.x_prime, ms); };
        Phase a = two_centre_rhs(to_phase(s), ms), b = fd_hamilton(J, s);
        for (int i : {0, 1, 2, 6, 7, 8}) b[i] = 0;  // x′ frozen
        CHECK(max_rel(a, b) < 1e-6);
        auto H = [&](const CartesianState& c) { return full_hamiltonian(c, ms); };
        CHECK(max_rel(three_body_rhs(to_phase(s), ms), fd_hamilton(H, s)) < 1e-6);
        auto Ht = [&](const CartesianState& c) { return truncated_hamiltonian(c, ms); };
        CHECK(max_rel(three_body_rhs(to_phase(s), ms, true), fd_hamilton(Ht, s)) < 1e-6);
    }
}

TEST_CASE("dop853 integrates a harmonic oscillator to tolerance")
{
    auto f = [](const Phase& z) {
        Phase d{};
        d[0] = -z[6];
        d[6] = z[0];
        return d;
    };
    Phase z{};
    z[6] = 1;
    auto st = dop853(f, z, 0, 20, 1e-12, 0, nullptr, 1'000'000);
    CHECK(std::abs(z[6] - std::cos(20.0)) < 1e-10);
    CHECK(std::abs(z[0] + std::sin(20.0)) < 1e-10);
    CHECK(st.steps > 0);
    CHECK_THROWS_AS(dop853(f, z, 0, 1, 0, 0, nullptr, 10), DomainError);
    CHECK_THROWS_AS(dop853(f, z, 0, 100, 1e-12, 0, nullptr, 5), ConvergenceError);
}

TEST_CASE("mu = 0 keeps the Kepler ellipse")
{
    MassModel ms(1, 0, 1e-3);
    auto s0 = planar_ellipse_state(1, 0.4, 0.7, {5, 0, 0}, ms);
    IntegratorConfig cfg;
    double T = inner_period(1, ms);
    cfg.t_end = 100 * T;
    cfg.sample_dt = T;
    auto traj = flow_two_centre(s0, ms, cfg);
    REQUIRE(traj.samples.size() == 101);
    auto el0 = elements_from_cartesian(s0.y, s0.x, ms);
    double worst = 0;
    for (const auto& smp : traj.samples) {
        auto el = elements_from_cartesian(smp.state.y, smp.state.x, ms);
        worst = std::max({worst, std::abs(el.a - el0.a), std::abs(el.e - el0.e), std::abs(el.g_peri - el0.g_peri),
                          std::abs(el.G - el0.G)});
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("two-centre flow conserves J and E")
{
    auto s0 = planar_ellipse_state(1, 0.3, 0.4, {4, 0, 0}, ms_c);
    IntegratorConfig cfg;
    double T = inner_period(1, ms_c);
    cfg.t_end = 200 * T;
    cfg.sample_dt = T;
    auto traj = flow_two_centre(s0, ms_c, cfg);
    auto rep = euler_drift_report(traj, ms_c);
    double E0 = traj.samples.front().integrals.E;
    CHECK(rep.max_drift / std::abs(E0) < 1e-8);
    CHECK(rep.max_J_rel_drift < 1e-8);
    CHECK(rep.max_drift <= 10 * cfg.tol * traj.steps);
    CHECK(rep.drift_at.size() == traj.samples.size());
    for (std::size_t i = 1; i < traj.samples.size(); ++i) CHECK(traj.samples[i].t > traj.samples[i - 1].t);
}

TEST_CASE("splitting integrator conserves J to its order")
{
    auto s0 = planar_ellipse_state(1, 0.2, 0.0, {4, 0, 0}, ms_c);
    IntegratorConfig cfg;
    cfg.method = Method::Splitting;
    double T = inner_period(1, ms_c);
    cfg.step = T / 400;
    cfg.t_end = 20 * T;
    cfg.sample_dt = T;
    auto traj = flow_two_centre(s0, ms_c, cfg);
    auto rep = euler_drift_report(traj, ms_c);
    CHECK(rep.max_J_rel_drift < 1e-6);
    cfg.step = 0;
    CHECK_THROWS_AS(flow_two_centre(s0, ms_c, cfg), DomainError);
}

TEST_CASE("time reversal returns to the start")
{
    auto s0 = planar_ellipse_state(1, 0.5, 1.1, {3, 0.5, 0}, ms_c);
    IntegratorConfig cfg;
    cfg.tol = 1e-13;
    cfg.t_end = 10 * inner_period(1, ms_c);
    cfg.sample_dt = cfg.t_end;
    auto fwd = flow_two_centre(s0, ms_c, cfg);
    CartesianState mid = fwd.samples.back().state;
    mid.y = -1.0 * mid.y;
    auto back = flow_two_centre(mid, ms_c, cfg);
    CartesianState end = back.samples.back().state;
    CHECK(norm(end.x - s0.x) < 1e-8);
    CHECK(norm(end.y + s0.y) < 1e-8);
}

TEST_CASE("truncated three-body flow is the two-centre flow on the slow clock")
{
    MassModel ms(1, 1e-2, 1e-2);
    CartesianState s0 = planar_ellipse_state(1, 0.3, 0.2, {4, 0, 0}, ms);
    s0.y_prime = {0.01, 0.3, 0};
    IntegratorConfig c3;
    double T = inner_period(1, ms);
    c3.t_end = 5 * T / ms.eps();
    c3.sample_dt = c3.t_end;
    auto tb = flow_three_body(s0, ms, c3, true);
    IntegratorConfig c2 = c3;
    c2.t_end = 5 * T;
    c2.sample_dt = c2.t_end;
    auto tc = flow_two_centre(s0, ms, c2);
    const auto& a = tb.samples.back().state;
    const auto& b = tc.samples.back().state;
    CHECK(norm(a.x - b.x) < 1e-8);
    CHECK(norm(a.y - b.y) < 1e-8);
    CHECK(norm(a.x_prime - s0.x_prime) == 0);
    // y′ is the quadrature of the frozen forces
    CHECK(std::abs(a.y_prime[2] - s0.y_prime[2]) < 1e-15);
}

TEST_CASE("three-body Euler drift scales like eps squared")
{
    auto run = [](double eps) {
        MassModel ms(1, 1e-3, eps);
        auto s0 = planar_ellipse_state(2, 0.3, 1, {1, 0, 0}, ms);
        IntegratorConfig cfg;
        cfg.t_end = 50 * outer_period(1, ms);
        cfg.sample_dt = cfg.t_end / 50;
        auto traj = flow_three_body(s0, ms, cfg);
        REQUIRE(!traj.truncated);
        auto rep = euler_drift_report(traj, ms);
        CHECK(rep.max_H_rel_drift < 1e-9);
        return rep.max_drift;
    };
    double ratio = run(1e-3) / run(5e-4);
    CHECK(ratio > 3);
    CHECK(ratio < 5);
}

TEST_CASE("close approach truncates the run")
{
    MassModel ms(1, 1e-3, 1e-3);
    CartesianState s0;
    s0.x_prime = {2, 0, 0};
    s0.x = {1, 0, 0};
    s0.y = {0, 0, 0};
    s0.y_prime = {0, 0, 0};
    IntegratorConfig cfg;
    cfg.floor_factor = 0.05;
    cfg.t_end = 10;
    cfg.sample_dt = 0.5;
    auto traj = flow_two_centre(s0, ms, cfg);
    CHECK(traj.truncated);
    CHECK(traj.truncation_reason == "x");
    CHECK(traj.samples.back().t < 10);
}

TEST_CASE("drift report and csv")
{
    Trajectory traj;
    CHECK_THROWS_AS(euler_drift_report(traj, ms_c), DomainError);
    auto s0 = planar_ellipse_state(1, 0.3, 0.4, {4, 0, 0}, ms_c);
    TrajectorySample smp{0, s0, evaluate_integrals(s0, ms_c), 3};
    traj.samples = {smp, smp, smp};
    traj.samples[1].t = 1;
    traj.samples[2].t = 2;
    auto rep = euler_drift_report(traj, ms_c);
    CHECK(rep.max_drift == 0);
    CHECK(rep.max_drift_normalized == 0);
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    std::string line;
    std::istringstream is(os.str());
    std::getline(is, line);
    CHECK(line == trajectory_csv_header());
    std::getline(is, line);
    CHECK(std::count(line.begin(), line.end(), ',') == 17);
}
