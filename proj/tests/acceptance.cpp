// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "euler3b/action_quadrature.hpp"
#include "euler3b/collision.hpp"
#include "euler3b/coordinate_maps.hpp"
#include "euler3b/dynamics.hpp"
#include "euler3b/experiment.hpp"
#include "euler3b/integrals.hpp"
#include "euler3b/kepler.hpp"
#include "euler3b/normal_form.hpp"
#include "euler3b/phase_portrait.hpp"

using namespace e3b;
using std::numbers::pi;

namespace {

std::mt19937_64 rng(20240917);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int rint(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail)
{
    if (!ok) ++failures;
    std::printf("criterion %2d %s  %s: %s\n", id, ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

/// Runs f, turning an exception into a failed line.
void guarded(int id, const char* name, const std::function<void()>& f)
{
    try {
        f();
    } catch (const std::exception& e) {
        report(id, name, false, std::string("exception: ") + e.what());
    }
}

PlanarKCoordinates random_planar(int sigma)
{
    PlanarKCoordinates k;
    k.G = uniform(0.5, 1.2);
    k.Lambda = k.G / uniform(0.3, 0.98);
    k.C = k.G + uniform(0.1, 1.0);
    k.R_prime = uniform(-1, 1);
    k.zeta = uniform(-pi, pi);
    k.g_node = uniform(-pi, pi);
    k.g_peri = uniform(0.05, 2 * pi - 0.05);
    k.ell = uniform(-pi, pi);
    k.r_prime = uniform(0.5, 3);
    k.sigma = sigma;
    return k;
}

void two_centre_conservation()
{
    MassModel ms(1, 1e-3, 1e-3);
    CartesianState s0 = planar_ellipse_state(1, 0.5, 0, {8, 0, 0}, ms);
    IntegratorConfig cfg;
    cfg.tol = 1e-12;
    const double T = inner_period(1, ms);
    cfg.t_end = 1000 * T;
    cfg.sample_dt = T;
    Trajectory traj = flow_two_centre(s0, ms, cfg);
    DriftReport rep = euler_drift_report(traj, ms);
    const double e_rel = rep.max_drift / std::abs(traj.samples.front().integrals.E);
    const bool ok = !traj.truncated && e_rel < 1e-8 && rep.max_J_rel_drift < 1e-8;
    report(1, "two-centre conservation", ok,
           "rel drift E " + fmt(e_rel) + ", J " + fmt(rep.max_J_rel_drift) + " over 1000 inner periods (< 1e-8)");
}

double three_body_drift(double eps)
{
    MassModel ms(1, 1e-3, eps);
    CartesianState s0 = planar_ellipse_state(2, 0.3, 1, {1, 0, 0}, ms);
    IntegratorConfig cfg;
    cfg.t_end = 50 * outer_period(1, ms);
    cfg.sample_dt = cfg.t_end / 50;
    Trajectory traj = flow_three_body(s0, ms, cfg);
    if (traj.truncated) throw std::runtime_error("run truncated: " + traj.truncation_reason);
    return euler_drift_report(traj, ms).max_drift;
}

void drift_scaling()
{
    const double a = three_body_drift(1e-3), b = three_body_drift(5e-4);
    const double ratio = a / b;
    report(2, "Euler-drift scaling", ratio >= 3 && ratio <= 5,
           "max drift " + fmt(a) + " / " + fmt(b) + " = " + fmt(ratio) + " (in [3, 5])");
}

void portrait_anchors()
{
    double worst = 0;
    bool classes = true, nesting = true;
    std::string areas;
    for (double d : {0.5, 1.0, 1.5}) {
        auto cp = critical_points(d);
        worst = std::max({worst, std::abs(cp[0].value + d), std::abs(cp[1].value - d),
                          std::abs(cp[2].value - (1 + d * d / 4))});
        auto at_d = g_hat_pm(d, d);
        auto at_1 = g_hat_pm(1, d);
        worst = std::max({worst, std::abs(at_d.second - d * (2 - d)), std::abs(at_1.second - 1),
                          std::abs(at_1.first - (1 - d * d))});

        // regime constant between consecutive marks and changing exactly at them
        std::vector<double> marks{-d, d, 1, 1 + d * d / 4};
        std::sort(marks.begin(), marks.end());
        marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
        for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
            const Regime r = classify(std::nextafter(marks[i], 10.0), d).regime;
            for (int k = 1; k < 50; ++k)
                classes = classes && classify(marks[i] + (marks[i + 1] - marks[i]) * k / 50, d).regime == r;
            classes = classes && classify(std::nextafter(marks[i + 1], -10.0), d).regime == r;
            classes = classes && classify(marks[i + 1], d).regime != r;
        }

        const double s0 = sublevel_area(sample_level_curve(d, d, 20000));
        const double s1 = sublevel_area(sample_level_curve(1, d, 20000));
        if (d < 1) nesting = nesting && s0 < s1 - 1e-6;
        if (d == 1) nesting = nesting && std::abs(s0 - s1) < 1e-6;
        if (d > 1) nesting = nesting && s1 < s0 - 1e-6;
        areas += " d=" + fmt(d) + ":" + fmt(s0) + "/" + fmt(s1);
    }
    report(3, "portrait anchors", worst < 1e-12 && classes && nesting,
           "anchor error " + fmt(worst) + " (< 1e-12), regimes " + (classes ? "ok" : "bad") + ", areas S0/S1" + areas);
}

void action_quadrature()
{
    MassModel ms(1, 1e-3, 1e-3);
    double end_err = 0, jump = 0, fd_err = 0, shoe_err = 0;
    for (double L : {0.8, 1.3}) {
        const double J = J_of_L0(L, ms), rp = 0.9;
        const double d = delta_of(J, rp, ms);
        end_err = std::max({end_err, std::abs(G0_action(J, -d * L * L, rp, ms).G0_action),
                            std::abs(G0_action(J, (1 + d * d / 4) * L * L, rp, ms).G0_action - L)});
        for (double s : {d, 1.0}) {
            const double E = s * L * L, h = 1e-6 * L * L;
            jump = std::max(jump, std::abs(G0_action(J, E + h, rp, ms).G0_action - G0_action(J, E - h, rp, ms).G0_action) / L);
        }
    }
    auto interior = [](double d) {
        const double top = 1 + d * d / 4;
        for (;;) {
            const double E = uniform(-d, top);
            if (std::min({std::abs(E - d), std::abs(E + d), std::abs(E - 1), std::abs(E - top)}) > 0.02) return E;
        }
    };
    for (int n = 0; n < 50; ++n) {
        const double d = std::array{0.4, 0.8, 1.2, 1.6}[n % 4];
        const double E = interior(d), h = 1e-5;
        const double fd = (G0_hat(E + h, d) - G0_hat(E - h, d)) / (2 * h);
        const double an = dG0_hat_dE(E, d);
        fd_err = std::max(fd_err, std::abs(fd - an) / an);
    }
    for (double d : {0.5, 1.0, 1.5})
        for (int k = 0; k < 4; ++k) {
            const double E = interior(d);
            const double shoe = sublevel_area(sample_level_curve(E, d, 20000)) / (4 * pi);
            shoe_err = std::max(shoe_err, std::abs(shoe - G0_hat(E, d)) / G0_hat(E, d));
        }
    const bool ok = end_err < 1e-8 && jump < 1e-4 && fd_err < 1e-6 && shoe_err < 1e-6;
    report(4, "action quadrature", ok,
           "endpoints " + fmt(end_err) + " (< 1e-8), jump/L " + fmt(jump) + " (< 1e-4), d/dE vs FD " + fmt(fd_err) +
               " (< 1e-6), vs shoelace " + fmt(shoe_err) + " (< 1e-6)");
}

void symplecticity()
{
    MassModel ms(1, 1e-3, 1e-3);
    double worst_d = 0, worst_k = 0;
    for (int t = 0; t < 50; ++t) {
        const double L = uniform(0.6, 1.5);
        std::vector<double> z{L, L * uniform(0.3, 0.95), uniform(-pi, pi), uniform(-pi, pi)};
        worst_d = std::max(worst_d, symplectic_defect([&](const std::vector<double>& w) { return planar_delaunay_flat(w, ms); }, z));
        const int sigma = t % 2 ? 1 : -1;
        PlanarKCoordinates p = random_planar(sigma);
        std::vector<double> zk{p.C, p.G, p.Lambda, p.R_prime, p.g_node, p.g_peri, p.ell, p.r_prime};
        worst_k = std::max(worst_k, symplectic_defect([&](const std::vector<double>& w) { return planar_k_flat(w, sigma, ms); }, zk));
    }
    report(5, "symplecticity", worst_d < 1e-6 && worst_k < 1e-6,
           "max |J^T Omega J - Omega| Delaunay " + fmt(worst_d) + ", K " + fmt(worst_k) + " (< 1e-6, 50 points each)");
}

void chart_consistency()
{
    MassModel ms(1, 1e-3, 1e-3);
    const double m2 = ms.mr() * ms.mr();
    double worst_E = 0, worst_J = 0, off_lo = 1e300, off_hi = -1e300;
    for (int t = 0; t < 100; ++t) {
        PlanarKCoordinates k = random_planar(t % 2 ? 1 : -1);
        CartesianState s = planar_k_to_cartesian(k, ms);
        const double E = euler_integral_cartesian(s.y, s.x, s.x_prime, ms);
        const double J = two_centre_energy(s.y, s.x, s.x_prime, ms);
        TwoCentreFrame f = two_centre_frame(s.y, s.x, s.x_prime, ms);
        EllipticCoordinates ec = elliptic_from_cartesian(f.u, f.v, f.v0);
        const double h = two_centre_elliptic_energy(ec, f.m_plus, f.m_minus);
        const EllipticEuler ee = elliptic_euler_integral(ec, f.m_plus, f.m_minus, h);
        const double E2 = euler_decomposition(s.y, s.x, s.x_prime, ms).E2;
        const double scale = std::max(1.0, std::abs(E));
        worst_E = std::max({worst_E, std::abs(euler_integral_k(k, ms) - E) / scale,
                            std::abs(m2 * ee.E_bar - E2 - E) / scale});
        worst_J = std::max({worst_J, std::abs(two_centre_energy_k(k, ms) - J) / std::max(1.0, std::abs(J)),
                            std::abs(ms.mr() * h - J) / std::max(1.0, std::abs(J))});
        const double off = ee.E_bar - euler_integral_G1(f.u, f.v, f.v0, f.m_plus, f.m_minus);
        off_lo = std::min(off_lo, off);
        off_hi = std::max(off_hi, off);
    }
    const bool ok = worst_E < 1e-9 && worst_J < 1e-9 && off_hi - off_lo < 1e-10;
    report(6, "chart consistency", ok,
           "E " + fmt(worst_E) + ", J " + fmt(worst_J) + " (< 1e-9); elliptic minus G1 offset in [" + fmt(off_lo) +
               ", " + fmt(off_hi) + "], spread " + fmt(off_hi - off_lo) + " (< 1e-10)");
}

Series random_zero_average(int n, int m, const ChartBox& c, int terms)
{
    Series f(n, m, c);
    while (static_cast<int>(f.size()) < 2 * terms) {
        std::vector<int> k(n), h(m), j(m), a(n + 1);
        for (auto& v : k) v = rint(-3, 3);
        for (auto& v : h) v = rint(0, 1);
        for (auto& v : j) v = rint(0, 1);
        for (auto& v : a) v = rint(0, 3);
        const int b = rint(0, 3);
        const Complex co(uniform(-1, 1), uniform(-1, 1));
        Series t(n, m, c);
        t.add_term(co, k, h, j, a, b);
        if (t.empty() || t.is_average(t.terms().begin()->first)) continue;
        f.add_term(co, k, h, j, a, b);
        for (auto& v : k) v = -v;
        f.add_term(std::conj(co), k, j, h, a, b);
    }
    return f;
}

void normal_form_engine()
{
    ChartBox u{0.5, 0.3, 0.2, 0.2, 0.5, 0.3, 0.3, 0.3, 0.4, 0.5};
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        const int n = rint(1, 2), m = rint(0, 1);
        FrequencyData fd;
        fd.omega_y = uniform(0.5, 100) * (rint(0, 1) ? 1 : -1);
        for (int i = 0; i < n; ++i) fd.omega_I.push_back(uniform(-2, 2));
        for (int i = 0; i < m; ++i) fd.omega_J.push_back(uniform(-1, 1));
        Series f = random_zero_average(n, m, u, 5);
        Series phi = homological_solve(f, fd);
        worst = std::max(worst, series_norm(apply_D(phi, fd) - f) / series_norm(f));
    }

    const auto cst = NormalFormConstants::defaults(1, 0);
    ChartBox c{1, 1, 0.1, 0.02, 0.5, 0.24, 1, 0.6, 0.6, 1};
    DeskCase dc = desk_case(1, 100, 1e-4, c);
    StepResult sr = iterative_step(dc.h0, dc.f.zero(), dc.f, {c.r / 4, c.rho / 6, c.xi / 4, c.s / 9, c.delta / 9, false}, cst);
    const double step_ratio = sr.cert.norm_f_tilde_plus / sr.cert.norm_f_tilde;
    bool margins = true;
    auto carry = [&](const std::vector<Inequality>& qs) {
        for (const Inequality& q : qs) margins = margins && q.ok && !std::isnan(q.margin()) && q.margin() > 1;
    };
    carry(sr.cert.checks);

    DeskCase d3 = desk_case(1, 100, 1e-5, c);
    NormalFormResult three = normal_form_N(d3.h0, d3.f, 3, cst);
    carry(three.assumptions);
    bool halving = three.certified_steps == 3;
    std::string norms;
    for (std::size_t i = 0; i < three.steps.size(); ++i) {
        carry(three.steps[i].checks);
        if (i > 0) halving = halving && three.steps[i].norm_f_plus <= three.steps[i - 1].norm_f_plus / 2;
        norms += " " + fmt(three.steps[i].norm_f_plus);
    }
    const bool ok = worst <= 1e-14 && step_ratio <= 0.5 && halving && margins;
    report(7, "normal-form engine", ok,
           "homological residual " + fmt(worst) + " (<= 1e-14), step |f~+|/|f~| " + fmt(step_ratio) +
               " (<= 0.5), N=3 |f+|" + norms + ", margins " + (margins ? "all > 1" : "missing"));
}

void collision_predicate()
{
    MassModel m0(1, 0, 1e-3);
    const double k = m0.mr() * m0.mr() * m0.Mr();
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        PlanarKCoordinates kc = random_planar(t % 2 ? 1 : -1);
        kc.r_prime = focal_radius(kc.Lambda, kc.G, kc.g_peri, m0).r_prime;
        CartesianState s = planar_k_to_cartesian(kc, m0);
        worst = std::max(worst, std::abs(euler_decomposition(s.y, s.x, s.x_prime, m0).E0 - k * kc.r_prime));
    }
    double decay = 0;
    bool excluded = true;
    for (double eps : {1e-3, 5e-4}) {
        MassModel ms(1, 1e-3, eps);
        CartesianState s0 = planar_ellipse_state(2, 0.3, 1, {1, 0, 0}, ms);
        IntegratorConfig cfg;
        cfg.t_end = 50 * outer_period(1, ms);
        cfg.sample_dt = cfg.t_end / 50;
        ExclusionSweep sw = sweep_exclusion(flow_three_body(s0, ms, cfg), ms);
        excluded = excluded && sw.samples.front().verdict.excluded;
        decay = std::max(decay, sw.max_margin_decay);
    }
    report(8, "collision predicate", worst < 1e-10 && excluded && decay <= 0.1,
           "focal |E0 - m^2 M r'| " + fmt(worst) + " (< 1e-10), margin decay / threshold " + fmt(decay) +
               " (<= 0.1), start excluded " + (excluded ? "yes" : "no"));
}

void mu_level_curves_check()
{
    MassModel ms(1, 1e-4, 1e-3);
    const double L0 = 1, rp = 0.5;
    const double J = -ms.mr() * ms.mr() * ms.mr() * ms.Mr() * ms.Mr() / (2 * L0 * L0);
    double res = 0, ratio = 0;
    for (double E_hat : {0.2, 0.8, 1.05}) {
        const int sigma = E_hat > 1 ? -1 : 1;
        for (double mu : {1e-5, 1e-4}) {
            MuLevelCurves mc = mu_level_curves(J, E_hat, rp, mu, sigma, ms, 48);
            res = std::max(res, mc.max_residual);
            for (std::size_t i = 0; i < mc.c2.components.size(); ++i)
                ratio = std::max(ratio, hausdorff(mc.c2.components[i].polyline(),
                                                  mc.c2_unperturbed.components[i].polyline()) / mu);
            ratio = std::max(ratio, hausdorff(mc.c1.components[0].polyline(),
                                              mc.c1_unperturbed.components[0].polyline()) / mu);
        }
    }
    report(9, "mu > 0 level curves", res < 1e-10 && ratio < 100,
           "max residual " + fmt(res) + " (< 1e-10), Hausdorff / mu " + fmt(ratio) + " (< 100)");
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void determinism()
{
    namespace fs = std::filesystem;
    std::istringstream ini(
        "[experiment]\nscenario = sun-earth-asteroid\nseed = 42\n[integrator]\nt_end = 2\nsamples = 20\n"
        "[portrait]\nlevels = 3\nsamples = 64\n[actions]\npoints = 32\nprobes = 8\n[collision]\nprobes = 16\n");
    const ExperimentConfig cfg = parse_config(ini);
    const fs::path root = fs::temp_directory_path() / "euler3b_acceptance_determinism";
    fs::remove_all(root);
    std::size_t files = 0, same = 0;
    for (const std::string& cmd : command_names()) {
        const CommandResult a = run_command(cmd, cfg, (root / "a").string());
        run_command(cmd, cfg, (root / "b").string());
        for (const std::string& f : a.files) {
            const fs::path name = fs::path(f).filename();
            ++files;
            if (slurp(root / "a" / name) == slurp(root / "b" / name)) ++same;
        }
    }
    report(10, "determinism", files > 0 && same == files,
           std::to_string(same) + " of " + std::to_string(files) + " CSV/text outputs byte-identical across runs");
}

}  // namespace

int main()
{
    guarded(1, "two-centre conservation", two_centre_conservation);
    guarded(2, "Euler-drift scaling", drift_scaling);
    guarded(3, "portrait anchors", portrait_anchors);
    guarded(4, "action quadrature", action_quadrature);
    guarded(5, "symplecticity", symplecticity);
    guarded(6, "chart consistency", chart_consistency);
    guarded(7, "normal-form engine", normal_form_engine);
    guarded(8, "collision predicate", collision_predicate);
    guarded(9, "mu > 0 level curves", mu_level_curves_check);
    guarded(10, "determinism", determinism);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
