#include "euler3b/kepler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "euler3b/coordinate_maps.hpp"

namespace e3b {

namespace {
constexpr double kPi = std::numbers::pi;
}

double solve_kepler(double e, double ell, double tol)
{
    if (!(e >= 0 && e < 1)) throw DomainError("solve_kepler: eccentricity must lie in [0,1)");
    double lr = std::remainder(ell, 2 * kPi);
    double shift = ell - lr;
    if (e == 0) return ell;
    auto f = [&](double xi) { return xi - e * std::sin(xi) - lr; };
    double lo = lr - e, hi = lr + e;
    double xi = lr + e * std::sin(lr);
    for (int it = 0; it < 60; ++it) {
        double r = f(xi);
        if (std::abs(r) < tol) return xi + shift;
        if (r > 0) hi = std::min(hi, xi); else lo = std::max(lo, xi);
        double step = r / (1 - e * std::cos(xi));
        double nx = xi - step;
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (nx == xi) break;
        xi = nx;
    }
    // bisection on whatever bracket is left
    for (int it = 0; it < 200 && std::abs(f(xi)) >= tol; ++it) {
        xi = 0.5 * (lo + hi);
        if (f(xi) > 0) hi = xi; else lo = xi;
    }
    return xi + shift;
}

OrbitalElements anomalies_from_mean(double Lambda, double G, double ell, const MassModel& ms)
{
    if (!(G > 0) || !(Lambda > 0)) throw DomainError("anomalies_from_mean: Lambda and G must be positive");
    if (G > Lambda) throw DomainError("anomalies_from_mean: G > Lambda");
    OrbitalElements el;
    el.Lambda = Lambda;
    el.G = G;
    el.e = std::sqrt(std::max(0.0, 1 - (G / Lambda) * (G / Lambda)));
    el.a = Lambda * Lambda / (ms.mr() * ms.mr() * ms.Mr());
    el.ell = ell;
    el.xi = solve_kepler(el.e, ell);
    el.varrho = 1 - el.e * std::cos(el.xi);
    el.nu = std::atan2((G / Lambda) * std::sin(el.xi), std::cos(el.xi) - el.e) +
            (el.xi - std::remainder(el.xi, 2 * kPi));
    el.circular = el.e < kNearCircular;
    return el;
}

Mat3 orbit_frame(const Vec3& y, const Vec3& x)
{
    Vec3 M = cross(x, y);
    double Mn = norm(M);
    if (Mn == 0) throw DomainError("orbit_frame: zero angular momentum");
    double inc = std::acos(std::clamp(M[2] / Mn, -1.0, 1.0));
    double node = std::hypot(M[0], M[1]) > 1e-14 * Mn ? std::atan2(M[0], -M[1]) : 0.0;
    return rot3(node) * rot1(inc);
}

OrbitalElements elements_from_cartesian(const Vec3& y, const Vec3& x, const MassModel& ms, bool circular_safe)
{
    const double mm = ms.mr(), MM = ms.Mr();
    double r = norm(x);
    if (r == 0) throw SingularityError("x", "elements_from_cartesian: x = 0");
    double J0 = dot(y, y) / (2 * mm) - mm * MM / r;
    if (J0 >= 0) throw DomainError("elements_from_cartesian: hyperbolic or parabolic orbit (J0 >= 0)");
    OrbitalElements el;
    el.a = -mm * MM / (2 * J0);
    el.Lambda = mm * std::sqrt(MM * el.a);
    Vec3 M = cross(x, y);
    el.G = norm(M);
    Vec3 L = cross(y, M) - (mm * mm * MM / r) * x;
    el.e = norm(L) / (mm * mm * MM);
    el.circular = el.e < kNearCircular;
    if (el.circular && !circular_safe)
        throw DomainError("elements_from_cartesian: perihelion direction undefined (e = 0)");
    double ecx = 1 - r / el.a;
    double esx = dot(x, y) / (mm * std::sqrt(MM * el.a));
    el.xi = std::atan2(esx, ecx);
    el.ell = el.xi - esx;
    el.varrho = r / el.a;
    double s = std::sqrt(std::max(0.0, 1 - el.e * el.e));
    el.nu = std::atan2(s * std::sin(el.xi), std::cos(el.xi) - el.e);
    if (el.circular) {
        // g = 0 convention: P̄ = (0,-1,0); anomalies measured from there
        el.g_peri = 0;
        el.P = orbit_frame(y, x) * Vec3{0, -1, 0};
        Vec3 xb = transpose(orbit_frame(y, x)) * x;
        el.xi = std::atan2(xb[0], -xb[1]);
        el.ell = el.xi;
        el.nu = el.xi;
        el.e = 0;
        el.varrho = 1;
        el.a = r;
        return el;
    }
    el.P = L / norm(L);
    Vec3 Pb = transpose(orbit_frame(y, x)) * el.P;
    el.g_peri = std::atan2(Pb[0], -Pb[1]);
    return el;
}

Vec3 xbar(double Lambda, double G, double g, double xi, const MassModel& ms)
{
    double e = std::sqrt(std::max(0.0, 1 - (G / Lambda) * (G / Lambda)));
    double a = Lambda * Lambda / (ms.mr() * ms.mr() * ms.Mr());
    return rot3(g - kPi / 2) * Vec3{a * (std::cos(xi) - e), a * (G / Lambda) * std::sin(xi), 0};
}

Vec3 ybar(double Lambda, double G, double g, double xi, const MassModel& ms)
{
    double e = std::sqrt(std::max(0.0, 1 - (G / Lambda) * (G / Lambda)));
    double c = ms.mr() * ms.mr() * ms.Mr() / Lambda / (1 - e * std::cos(xi));
    return rot3(g - kPi / 2) * Vec3{-c * std::sin(xi), c * (G / Lambda) * std::cos(xi), 0};
}

std::pair<Vec3, Vec3> state_from_elements(const OrbitalElements& el, const Mat3& frame, const MassModel& ms)
{
    if (!(el.G > 0 && el.G <= el.Lambda)) throw DomainError("state_from_elements: need 0 < G <= Lambda");
    return {frame * ybar(el.Lambda, el.G, el.g_peri, el.xi, ms), frame * xbar(el.Lambda, el.G, el.g_peri, el.xi, ms)};
}

}  // namespace e3b
