#include "euler3b/phase_portrait.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>

#include "euler3b/kepler.hpp"

namespace e3b {

using std::numbers::pi;

namespace {

void check_delta(double delta)
{
    if (!(delta > 0 && delta < 2)) throw DomainError("portrait: delta must lie in (0, 2)");
}

double e_max(double delta) { return 1 + delta * delta / 4; }

void check_level(double E_hat, double delta)
{
    check_delta(delta);
    if (E_hat > e_max(delta)) throw DomainError("portrait: empty level, E_hat above 1 + delta^2/4");
    if (E_hat < -delta) throw DomainError("portrait: empty level, E_hat below -delta");
}

}  // namespace

double e0_hat(double G_hat, double g, double delta)
{
    return G_hat * G_hat + delta * std::sqrt(std::max(0.0, 1 - G_hat * G_hat)) * std::cos(g);
}

std::array<CriticalPoint, 3> critical_points(double delta)
{
    check_delta(delta);
    return {{{pi, 0, -delta, "minimum"},
             {0, 0, delta, "saddle"},
             {0, std::sqrt(1 - delta * delta / 4), e_max(delta), "maximum"}}};
}

std::pair<double, double> g_hat_pm(double E_hat, double delta)
{
    check_delta(delta);
    if (E_hat > e_max(delta)) throw DomainError("g_hat_pm: empty level, E_hat above 1 + delta^2/4");
    const double s = std::sqrt(e_max(delta) - E_hat);
    const double d = delta / 2 - s;
    const double plus = 1 - d * d;
    // product of the roots is Ê² − δ²
    const double minus = plus != 0 ? (E_hat * E_hat - delta * delta) / plus : E_hat - delta * delta / 2 - delta * s;
    return {minus, plus};
}

std::pair<double, double> g_hat_bounds(double E_hat, double delta)
{
    check_level(E_hat, delta);
    auto [m, p] = g_hat_pm(E_hat, delta);
    double gmax = std::sqrt(std::max(0.0, p));
    double gmin = E_hat <= delta ? 0.0 : std::sqrt(std::max(0.0, m));
    return {gmin, gmax};
}

double g_plus(double G_hat, double E_hat, double delta)
{
    const double q = 1 - G_hat * G_hat;
    if (q <= 0) return pi / 2;
    double X = (E_hat - G_hat * G_hat) / (delta * std::sqrt(q));
    return std::acos(std::clamp(X, -1.0, 1.0));
}

std::string regime_name(Regime r)
{
    switch (r) {
    case Regime::LibrationPi: return "libration-pi";
    case Regime::SeparatrixZero: return "separatrix-0";
    case Regime::Rotation: return "rotation";
    case Regime::CurveE1: return "curve-E=1";
    case Regime::LibrationZero: return "libration-0";
    case Regime::MaximumPoint: return "maximum-point";
    }
    return "unknown";
}

PortraitClassification classify(double E_hat, double delta)
{
    check_level(E_hat, delta);
    PortraitClassification c;
    c.critical = critical_points(delta);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::string major = delta < 1 ? "1" : delta == 1 ? "2" : "3";
    auto lib_pi = [&](const char* minor) {
        c.regime = Regime::LibrationPi;
        c.case_label = major + minor;
        double w = std::acos(std::clamp(E_hat / delta, -1.0, 1.0));
        c.elongation = pi - w;
        c.g_range = {w, 2 * pi - w};
    };
    auto lib_zero = [&](const char* minor) {
        c.regime = E_hat == e_max(delta) ? Regime::MaximumPoint : Regime::LibrationZero;
        c.case_label = major + minor;
        double w = std::acos(std::clamp(2 / delta * std::sqrt(E_hat - 1), -1.0, 1.0));
        c.elongation = w;
        c.g_range = {-w, w};
    };
    auto other = [&](Regime r, const char* minor) {
        c.regime = r;
        c.case_label = major + minor;
        c.elongation = nan;
        c.g_range = {-pi, pi};
    };
    if (delta < 1) {
        if (E_hat < delta) lib_pi(".1");
        else if (E_hat == delta) other(Regime::SeparatrixZero, ".2");
        else if (E_hat < 1) other(Regime::Rotation, ".3");
        else if (E_hat == 1) other(Regime::CurveE1, ".4");
        else lib_zero(".5");
    } else if (delta == 1) {
        if (E_hat < 1) lib_pi(".1");
        else if (E_hat == 1) other(Regime::SeparatrixZero, ".2");
        else lib_zero(".3");
    } else {
        if (E_hat < 1) lib_pi(".1");
        else if (E_hat == 1) other(Regime::CurveE1, ".2");
        else if (E_hat < delta) lib_zero(".3");
        else if (E_hat == delta) other(Regime::SeparatrixZero, ".3s");
        else lib_zero(".4");
    }
    return c;
}

std::vector<Point> LevelComponent::polyline() const
{
    std::vector<Point> out;
    for (const auto& b : branches)
        for (const auto& p : b.points) {
            if (!out.empty() && std::abs(out.back()[0] - p[0]) < 1e-15 && std::abs(out.back()[1] - p[1]) < 1e-15)
                continue;
            out.push_back(p);
        }
    return out;
}

bool LevelCurve::closed() const
{
    return std::all_of(components.begin(), components.end(), [](const LevelComponent& c) { return c.closed; });
}

std::size_t LevelCurve::size() const
{
    std::size_t n = 0;
    for (const auto& c : components)
        for (const auto& b : c.branches) n += b.points.size();
    return n;
}

LevelCurve sample_level_curve(double E_hat, double delta, int n_samples)
{
    if (n_samples < 2) throw DomainError("sample_level_curve: need at least 2 samples per branch");
    PortraitClassification cls = classify(E_hat, delta);
    LevelCurve lc;
    lc.E_hat = E_hat;
    lc.delta = delta;
    lc.regime = cls.regime;
    const bool libration = cls.regime == Regime::LibrationPi || cls.regime == Regime::LibrationZero;

    if (E_hat == -delta) {
        lc.components.push_back({true, {{"point", {{pi, 0}}}}});
        return lc;
    }
    if (cls.regime == Regime::MaximumPoint) {
        double G = cls.critical[2].G_hat;
        lc.components.push_back({true, {{"point/D+", {{0, G}}}}});
        lc.components.push_back({true, {{"point/D-", {{0, -G}}}}});
        return lc;
    }

    auto [gmin, gmax] = g_hat_bounds(E_hat, delta);
    std::vector<double> G(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        double th = pi * k / (n_samples - 1);
        G[k] = gmin + (gmax - gmin) * (1 - std::cos(th)) / 2;
    }
    G.front() = gmin;
    G.back() = gmax;
    // sgn_G picks D±, s_g picks g±, ascending orders |Ĝ|, shift adds 2π to g₋ for loops about π
    auto branch = [&](int sgn_G, int s_g, bool ascending, bool shift) {
        LevelBranch b;
        b.label = std::string(s_g > 0 ? "g+" : "g-") + (sgn_G > 0 ? "/D+" : "/D-");
        for (int k = 0; k < n_samples; ++k) {
            double Gk = ascending ? G[k] : G[n_samples - 1 - k];
            double g = g_plus(Gk, E_hat, delta);
            if (s_g < 0) g = shift ? 2 * pi - g : -g;
            b.points.push_back({g, sgn_G * Gk});
        }
        return b;
    };

    if (E_hat <= 1) {
        // region {Ê0 < Ê}: one component with g ∈ [0, 2π]
        LevelComponent c;
        c.closed = libration;
        c.branches = {branch(+1, +1, true, true), branch(+1, -1, false, true), branch(-1, -1, true, true),
                      branch(-1, +1, false, true)};
        lc.components.push_back(c);
        if (E_hat == 1) {
            for (int sgn : {+1, -1}) {
                LevelBranch line;
                line.label = sgn > 0 ? "G=1" : "G=-1";
                for (int k = 0; k < n_samples; ++k) line.points.push_back({-pi + 2 * pi * k / (n_samples - 1), sgn * 1.0});
                lc.components.push_back({false, {line}});
            }
        }
    } else if (gmin > 0) {
        // two loops about the maxima
        lc.components.push_back({libration, {branch(+1, +1, true, false), branch(+1, -1, false, false)}});
        lc.components.push_back({libration, {branch(-1, +1, true, false), branch(-1, -1, false, false)}});
    } else {
        // one loop about both maxima through Ĝ = 0
        lc.components.push_back({libration,
                                 {branch(-1, +1, false, false), branch(+1, +1, true, false), branch(+1, -1, false, false),
                                  branch(-1, -1, true, false)}});
    }
    return lc;
}

double shoelace_area(const std::vector<Point>& pts)
{
    double s = 0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = pts[i];
        const Point& q = pts[(i + 1) % n];
        s += p[0] * q[1] - q[0] * p[1];
    }
    return std::abs(s) / 2;
}

double sublevel_area(const LevelCurve& lc)
{
    if (lc.components.empty()) throw DomainError("sublevel_area: empty level curve");
    if (lc.E_hat <= 1) return shoelace_area(lc.components.front().polyline());
    double super = 0;
    for (const auto& c : lc.components) super += shoelace_area(c.polyline());
    return 4 * std::numbers::pi - super;
}

double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b)
{
    if (a.empty() || b.empty()) throw DomainError("hausdorff: empty point set");
    auto directed = [](const std::vector<Point>& p, const std::vector<Point>& q) {
        double worst = 0;
        for (const auto& x : p) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& y : q) best = std::min(best, std::hypot(x[0] - y[0], x[1] - y[1]));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

std::array<double, 2> graph_curve_residual(double Lambda, double G, double g, double J, double E, double r_prime,
                                           double mu, const MassModel& ms)
{
    const double m = ms.mr(), M = ms.Mr();
    const double a = Lambda * Lambda / (m * m * M);
    const double ecc = std::sqrt(std::max(0.0, 1 - G * G / (Lambda * Lambda)));
    const double q = a * (1 - ecc);
    const double dist = std::sqrt(r_prime * r_prime + 2 * r_prime * q * std::cos(g) + q * q);
    double rj = -m * m * m * M * M / (2 * Lambda * Lambda) - mu * m * M / dist - J;
    double re = G * G + m * m * M * r_prime * ecc * std::cos(g) + mu * m * m * M * r_prime * (r_prime + q * std::cos(g)) / dist - E;
    return {rj, re};
}

std::array<double, 2> graph_curve1_residual(double Lambda, double G, double ell, double J, double E, double r_prime,
                                            double mu, int sigma, const MassModel& ms)
{
    const double m = ms.mr(), M = ms.Mr();
    const double a = Lambda * Lambda / (m * m * M);
    const double ecc = std::sqrt(std::max(0.0, 1 - G * G / (Lambda * Lambda)));
    const double xi = solve_kepler(ecc, ell);
    const double rho = 1 - ecc * std::cos(xi);
    // a ϱ cos ν = a (cos ξ − e)
    const double rc = a * (std::cos(xi) - ecc);
    const double dist = std::sqrt(r_prime * r_prime - 2 * r_prime * sigma * rc + a * a * rho * rho);
    double rj = -m * m * m * M * M / (2 * Lambda * Lambda) - mu * m * M / dist - J;
    double re = G * G - sigma * m * m * M * r_prime * ecc + mu * m * m * M * r_prime * (r_prime - sigma * rc) / dist - E;
    return {rj, re};
}

namespace {

using Res = std::function<std::array<double, 2>(double, double)>;

/// Newton on a 2×2 system with forward-difference Jacobian. Returns false if it stalls.
bool newton2(const Res& F, double& u, double& v, double su, double sv, double tol)
{
    for (int it = 0; it < 60; ++it) {
        auto r = F(u, v);
        if (!std::isfinite(r[0]) || !std::isfinite(r[1])) return false;
        if (std::max(std::abs(r[0]), std::abs(r[1])) < tol) return true;
        const double hu = 1e-7 * su, hv = 1e-7 * sv;
        auto ru = F(u + hu, v), rv = F(u, v + hv);
        double a = (ru[0] - r[0]) / hu, b = (rv[0] - r[0]) / hv, c = (ru[1] - r[1]) / hu, d = (rv[1] - r[1]) / hv;
        double det = a * d - b * c;
        if (det == 0 || !std::isfinite(det)) return false;
        u -= (d * r[0] - b * r[1]) / det;
        v -= (-c * r[0] + a * r[1]) / det;
    }
    auto r = F(u, v);
    return std::max(std::abs(r[0]), std::abs(r[1])) < tol;
}

constexpr int kMuSteps = 10;

std::string point_text(double x, double y)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.17g, %.17g)", x, y);
    return buf;
}

}  // namespace

MuLevelCurves mu_level_curves(double J, double E, double r_prime, double mu, int sigma, const MassModel& ms,
                              int n_samples)
{
    if (!(J < 0)) throw DomainError("mu_level_curves: J must be negative");
    if (!(r_prime > 0) || !(mu >= 0)) throw DomainError("mu_level_curves: need r' > 0 and mu >= 0");
    if (sigma != 1 && sigma != -1) throw DomainError("mu_level_curves: sigma must be +1 or -1");
    const double m = ms.mr(), M = ms.Mr();
    const double L0 = std::sqrt(-m * m * m * M * M / (2 * J));
    const double delta = r_prime * m * m * M / (L0 * L0);
    const double E_hat = E / (L0 * L0);
    const double tol = 1e-12 * std::max({1.0, std::abs(J), std::abs(E)});

    MuLevelCurves out;
    for (double edge : {-delta, delta, 1.0, 1 + delta * delta / 4})
        if (std::abs(E_hat - edge) < 1e-12) throw DomainError("mu_level_curves: level on a separatrix or at an extremum");
    LevelCurve base = sample_level_curve(E_hat, delta, n_samples);

    out.c2_unperturbed = base;
    out.c2_unperturbed.axes = "g,G";
    out.c2 = out.c2_unperturbed;
    out.c2.E_hat = E_hat;
    for (std::size_t ci = 0; ci < base.components.size(); ++ci)
        for (std::size_t bi = 0; bi < base.components[ci].branches.size(); ++bi)
            for (std::size_t pi_ = 0; pi_ < base.components[ci].branches[bi].points.size(); ++pi_) {
                Point p0 = base.components[ci].branches[bi].points[pi_];
                double g = p0[0], G = p0[1] * L0, Lam = L0;
                out.c2_unperturbed.components[ci].branches[bi].points[pi_] = {g, G};
                // keep fixed the coordinate along which Ê0 varies least
                double e = std::sqrt(std::max(0.0, 1 - p0[1] * p0[1]));
                double dG = std::abs(2 * p0[1] - (e > 0 ? delta * p0[1] / e * std::cos(g) : 0.0));
                double dg = std::abs(delta * e * std::sin(g));
                const bool free_G = dG >= dg;
                for (int k = kMuSteps; k >= 0; --k) {
                    double mk = mu / std::ldexp(1.0, k);
                    Res F = free_G ? Res([&](double u, double v) {
                        return graph_curve_residual(u, v, g, J, E, r_prime, mk, ms);
                    })
                                   : Res([&](double u, double v) {
                                         return graph_curve_residual(u, G, v, J, E, r_prime, mk, ms);
                                     });
                    double u = Lam, v = free_G ? G : g;
                    if (!newton2(F, u, v, L0, free_G ? L0 : 1.0, tol))
                        throw ConvergenceError("mu_level_curves: continuation failed; last good point (g, G) = " +
                                               point_text(g, G));
                    Lam = u;
                    (free_G ? G : g) = v;
                }
                auto r = graph_curve_residual(Lam, G, g, J, E, r_prime, mu, ms);
                out.max_residual = std::max({out.max_residual, std::abs(r[0]), std::abs(r[1])});
                out.c2.components[ci].branches[bi].points[pi_] = {g, G};
            }

    // C̄₁: Λ over ℓ ∈ [0, 2π], seeded from the flat circle Λ = L0
    const double c = m * m * M * r_prime;
    const double bq = c * c / (L0 * L0) - 2 * E, cq = E * E - c * c;
    const double disc = bq * bq - 4 * cq;
    if (disc < 0) throw DomainError("mu_level_curves: no G with these (J, E, sigma) on the circle");
    double G1 = -1;
    for (double u : {(-bq + std::sqrt(disc)) / 2, (-bq - std::sqrt(disc)) / 2})
        if (u >= 0 && u <= L0 * L0 && sigma * (u - E) >= -1e-12 * std::max(1.0, std::abs(E)) && G1 < 0) G1 = std::sqrt(u);
    if (G1 < 0) throw DomainError("mu_level_curves: no G with these (J, E, sigma) on the circle");
    LevelBranch b1, b0;
    b1.label = b0.label = sigma > 0 ? "ell/sigma+" : "ell/sigma-";
    for (int k = 0; k < n_samples; ++k) {
        double ell = 2 * pi * k / (n_samples - 1);
        double Lam = L0, G = G1;
        for (int s = kMuSteps; s >= 0; --s) {
            double mk = mu / std::ldexp(1.0, s);
            Res F = [&](double u, double v) { return graph_curve1_residual(u, v, ell, J, E, r_prime, mk, sigma, ms); };
            if (!newton2(F, Lam, G, L0, L0, tol))
                throw ConvergenceError("mu_level_curves: continuation failed; last good point (ell, Lambda) = " +
                                       point_text(ell, Lam));
        }
        auto r = graph_curve1_residual(Lam, G, ell, J, E, r_prime, mu, sigma, ms);
        out.max_residual = std::max({out.max_residual, std::abs(r[0]), std::abs(r[1])});
        b1.points.push_back({ell, Lam});
        b0.points.push_back({ell, L0});
    }
    out.c1.axes = out.c1_unperturbed.axes = "ell,Lambda";
    out.c1.E_hat = out.c1_unperturbed.E_hat = E_hat;
    out.c1.delta = out.c1_unperturbed.delta = delta;
    out.c1.components = {{false, {b1}}};
    out.c1_unperturbed.components = {{false, {b0}}};
    return out;
}

}  // namespace e3b
