#include "euler3b/action_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "euler3b/phase_portrait.hpp"

namespace e3b {

using std::numbers::pi;

namespace {

constexpr double kQuadTol = 1e-13;
constexpr unsigned kMaxDepth = 12;

template <class F>
double gk(F f, double a, double b)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, kMaxDepth, kQuadTol);
}

/// Level data in the θ parameterization Ĝ = Ĝ_min + Δ sin²(θ/2).
struct Level {
    double E, delta, gmin, gmax, minus_sq, plus;

    Level(double E_hat, double d) : E(E_hat), delta(d)
    {
        auto b = g_hat_bounds(E_hat, d);
        gmin = b.first;
        gmax = b.second;
        minus_sq = g_hat_pm(E_hat, d).first;
        plus = gmax;
    }
    double span() const { return gmax - gmin; }
    double G_of(double th) const
    {
        double s = std::sin(th / 2);
        return gmin + span() * s * s;
    }
    double theta_of(double G) const
    {
        if (span() <= 0) return 0;
        double u = std::clamp((std::abs(G) - gmin) / span(), 0.0, 1.0);
        return 2 * std::asin(std::sqrt(u));
    }
    /// dĜ/√((Ĝ² − Ĝ₋²)(Ĝ₊² − Ĝ²)) written per dθ with the endpoint factors cancelled.
    double period_integrand(double th) const
    {
        double G = G_of(th);
        if (gmin > 0) return 1 / std::sqrt((G + gmin) * (plus + G));
        return std::sqrt(span()) * std::sin(th / 2) / std::sqrt((G * G - minus_sq) * (plus + G));
    }
    double tau(double th) const
    {
        if (th <= 0) return 0;
        return gk([this](double t) { return period_integrand(t); }, 0, th);
    }
};

bool on_singular_level(double E_hat, double delta)
{
    const double top = 1 + delta * delta / 4;
    return std::abs(E_hat - delta) < 1e-14 || std::abs(E_hat + delta) < 1e-14 || std::abs(E_hat - top) < 1e-14;
}

}  // namespace

double L0_of_J(double J, const MassModel& ms)
{
    if (!(J < 0)) throw DomainError("L0_of_J: J must be negative");
    const double m = ms.mr(), M = ms.Mr();
    return std::sqrt(-m * m * m * M * M / (2 * J));
}

double J_of_L0(double Lambda, const MassModel& ms)
{
    if (!(Lambda > 0)) throw DomainError("J_of_L0: Lambda must be positive");
    const double m = ms.mr(), M = ms.Mr();
    return -m * m * m * M * M / (2 * Lambda * Lambda);
}

double delta_of(double J, double r_prime, const MassModel& ms)
{
    if (!(J < 0)) throw DomainError("delta_of: J must be negative");
    return -2 * r_prime * J / (ms.mr() * ms.Mr());
}

double G0_hat(double E_hat, double delta)
{
    const double top = 1 + delta * delta / 4;
    if (!(delta > 0 && delta < 2)) throw DomainError("G0_hat: delta must lie in (0, 2)");
    if (E_hat < -delta || E_hat > top) throw DomainError("G0_hat: E_hat outside the leaf");
    if (E_hat == -delta) return 0;
    if (E_hat == top) return 1;
    Level L(E_hat, delta);
    const double half = L.span() / 2;
    double I = gk(
        [&](double th) {
            double G = L.G_of(th);
            return g_plus(G, E_hat, delta) * half * std::sin(th);
        },
        0, pi);
    return (E_hat <= 1 ? L.gmax : 1.0) - I / pi;
}

double dG0_hat_dE(double E_hat, double delta)
{
    if (!(delta > 0 && delta < 2)) throw DomainError("dG0_hat_dE: delta must lie in (0, 2)");
    if (on_singular_level(E_hat, delta)) throw DomainError("dG0_hat_dE: derivative diverges on this level");
    Level L(E_hat, delta);
    return L.tau(pi) / pi;
}

ActionPair G0_action(double J, double E, double r_prime, const MassModel& ms)
{
    ActionPair a;
    a.L0 = L0_of_J(J, ms);
    const double d = delta_of(J, r_prime, ms);
    const double Eh = E / (a.L0 * a.L0);
    a.G0_action = a.L0 * G0_hat(Eh, d);
    a.region = region_of(J, E, r_prime, ms).region;
    if (Eh <= 1) {
        a.in = a.G0_action;
        a.ext = a.L0 - a.in;
    } else {
        a.ext = a.G0_action;
        a.in = a.L0 - a.ext;
    }
    return a;
}

double dG0_dE(double J, double E, double r_prime, const MassModel& ms)
{
    const double L = L0_of_J(J, ms);
    return dG0_hat_dE(E / (L * L), delta_of(J, r_prime, ms)) / L;
}

double arnold_angle(double Lambda, double G, double g_peri, double r_prime, const MassModel& ms)
{
    if (!(Lambda > 0) || std::abs(G) > Lambda) throw DomainError("arnold_angle: need Lambda > 0 and |G| <= Lambda");
    const double m = ms.mr(), M = ms.Mr();
    const double delta = r_prime * m * m * M / (Lambda * Lambda);
    const double Gh = G / Lambda;
    const double Eh = e0_hat(Gh, g_peri, delta);
    if (on_singular_level(Eh, delta) || std::abs(Eh - 1) < 1e-14)
        throw DomainError("arnold_angle: point on a separatrix or an extremum");
    Level L(Eh, delta);
    const double th = std::sin(g_peri);
    const bool right = th > 0 || (th == 0 && std::abs(Gh) >= L.gmax);
    const double tau_h = L.tau(pi), tau_g = L.tau(L.theta_of(Gh));
    double t, T;
    if (L.gmin == 0) {
        // one loop crossing Ĝ = 0; reference at the top, first leg down the left side
        T = 4 * tau_h;
        if (!right) t = Gh >= 0 ? tau_h - tau_g : tau_h + tau_g;
        else t = Gh < 0 ? 3 * tau_h - tau_g : 3 * tau_h + tau_g;
    } else {
        // loop or rotation in D±; reference at (0, ±Ĝ_min); D₋ runs the other way
        T = 2 * tau_h;
        const bool first = Gh >= 0 ? right : !right;
        t = first ? tau_g : 2 * tau_h - tau_g;
    }
    double gam = 2 * pi * t / T;
    gam = std::fmod(gam, 2 * pi);
    if (gam < 0) gam += 2 * pi;
    return gam;
}

RegionInfo region_of(double J, double E, double r_prime, const MassModel& ms)
{
    const double L = L0_of_J(J, ms);
    const double d = delta_of(J, r_prime, ms);
    const double m = ms.mr(), M = ms.Mr();
    const double Eh = E / (L * L);
    const double top = 1 + d * d / 4;
    if (!(d > 0 && d < 2)) throw DomainError("region_of: delta must lie in (0, 2)");
    if (Eh < -d || Eh > top) throw DomainError("region_of: E outside the leaf");
    RegionInfo r;
    r.dist_sigma0 = E - m * m * M * r_prime;
    r.dist_sigma1 = E + m * m * m * M * M / (2 * J);
    const double lo = std::min(d, 1.0), hi = std::max(d, 1.0);
    if (Eh == -d || Eh == lo || Eh == hi || Eh == top) {
        r.region = 0;
        r.tag = "boundary";
    } else if (Eh < lo) {
        r.region = 1;
        r.tag = "region-1";
    } else if (Eh < hi) {
        r.region = 2;
        r.tag = "region-2";
    } else {
        r.region = 3;
        r.tag = "region-3";
    }
    return r;
}

}  // namespace e3b
