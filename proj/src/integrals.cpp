#include "euler3b/integrals.hpp"

#include <cmath>

#include "euler3b/kepler.hpp"

namespace e3b {

namespace {

double checked_norm(const Vec3& v, const char* which)
{
    double n = norm(v);
    if (n == 0) throw SingularityError(which, std::string("integrals: zero separation ") + which);
    return n;
}

}  // namespace

double kepler_energy(const Vec3& y, const Vec3& x, const MassModel& ms)
{
    double r = checked_norm(x, "x");
    return dot(y, y) / (2 * ms.mr()) - ms.mr() * ms.Mr() / r;
}

double two_centre_energy(const Vec3& y, const Vec3& x, const Vec3& xp, const MassModel& ms)
{
    double d = checked_norm(x - xp, "x-x_prime");
    return kepler_energy(y, x, ms) - ms.mu() * ms.mr() * ms.Mr() / d;
}

Vec3 angular_momentum(const Vec3& y, const Vec3& x) { return cross(x, y); }

Vec3 eccentricity_vector(const Vec3& y, const Vec3& x, const MassModel& ms)
{
    double r = checked_norm(x, "x");
    return cross(y, cross(x, y)) - (ms.mr() * ms.mr() * ms.Mr() / r) * x;
}

EulerParts euler_decomposition(const Vec3& y, const Vec3& x, const Vec3& xp, const MassModel& ms)
{
    Vec3 M = angular_momentum(y, x);
    Vec3 L = eccentricity_vector(y, x, ms);
    Vec3 d = xp - x;
    double dn = checked_norm(d, "x-x_prime");
    EulerParts p;
    p.E0 = dot(M, M) - dot(xp, L);
    p.E1 = ms.mr() * ms.mr() * ms.Mr() * dot(d, xp) / dn;
    p.E2 = ms.mr() * dot(xp, xp) / 2 * two_centre_energy(y, x, xp, ms);
    return p;
}

double euler_integral_cartesian(const Vec3& y, const Vec3& x, const Vec3& xp, const MassModel& ms)
{
    EulerParts p = euler_decomposition(y, x, xp, ms);
    return p.E0 + ms.mu() * p.E1;
}

double euler_chain(const Vec3& y, const Vec3& x, const Vec3& xp, const MassModel& ms)
{
    const double mm = ms.mr(), MM = ms.Mr();
    Vec3 w = x - 0.5 * xp;
    Vec3 c = cross(w, y);
    double r = checked_norm(x, "x");
    double d = checked_norm(xp - x, "x-x_prime");
    double xy = dot(xp, y);
    return dot(c, c) + xy * xy / 4 + mm * mm * dot(xp, w) * (MM / r - ms.mu() * MM / d);
}

namespace {

struct KGeometry {
    double a, e, varrho, nu, s, D;
};

KGeometry k_geometry(double Lambda, double G, double Theta, double ell, double g, double rp, const MassModel& ms)
{
    OrbitalElements el = anomalies_from_mean(Lambda, G, ell, ms);
    if (std::abs(Theta) > G) throw DomainError("K chart: |Theta| > G");
    KGeometry k;
    k.a = el.a;
    k.e = el.e;
    k.varrho = el.varrho;
    k.nu = el.nu;
    k.s = std::sqrt(1 - (Theta / G) * (Theta / G));
    double D2 = rp * rp + 2 * rp * k.a * k.varrho * k.s * std::cos(g + k.nu) + k.a * k.a * k.varrho * k.varrho;
    k.D = std::sqrt(D2);
    if (k.D == 0) throw SingularityError("x-x_prime", "K chart: x = x'");
    return k;
}

double euler_k_impl(double Lambda, double G, double Theta, double ell, double g, double rp, const MassModel& ms)
{
    KGeometry k = k_geometry(Lambda, G, Theta, ell, g, rp, ms);
    double c = ms.mr() * ms.mr() * ms.Mr();
    return G * G + c * rp * k.s * k.e * std::cos(g) +
           ms.mu() * c * rp * (rp + k.a * k.varrho * k.s * std::cos(g + k.nu)) / k.D;
}

double j_k_impl(double Lambda, double G, double Theta, double ell, double g, double rp, const MassModel& ms)
{
    KGeometry k = k_geometry(Lambda, G, Theta, ell, g, rp, ms);
    const double mm = ms.mr(), MM = ms.Mr();
    return -mm * mm * mm * MM * MM / (2 * Lambda * Lambda) - ms.mu() * mm * MM / k.D;
}

}  // namespace

double euler_integral_k(const KCoordinates& k, const MassModel& ms)
{
    return euler_k_impl(k.Lambda, k.G, k.Theta, k.ell, k.g_peri, k.r_prime, ms);
}

double euler_integral_k(const PlanarKCoordinates& k, const MassModel& ms)
{
    return euler_k_impl(k.Lambda, k.G, 0, k.ell, k.g_peri, k.r_prime, ms);
}

double two_centre_energy_k(const KCoordinates& k, const MassModel& ms)
{
    return j_k_impl(k.Lambda, k.G, k.Theta, k.ell, k.g_peri, k.r_prime, ms);
}

double two_centre_energy_k(const PlanarKCoordinates& k, const MassModel& ms)
{
    return j_k_impl(k.Lambda, k.G, 0, k.ell, k.g_peri, k.r_prime, ms);
}

double full_hamiltonian_k(const PlanarKCoordinates& k, const MassModel& ms)
{
    const double eps = ms.eps(), mp = ms.mr_prime();
    OrbitalElements el = anomalies_from_mean(k.Lambda, k.G, k.ell, ms);
    Vec3 yb = ybar(k.Lambda, k.G, k.g_peri, el.xi, ms);
    // ϑ = π flips both in-frame components, ϑ = 0 only the second
    Vec3 yt = k.sigma == 1 ? Vec3{-yb[0], -yb[1], 0} : Vec3{yb[0], -yb[1], 0};
    double w = k.C - k.sigma * k.G;
    double eps2 = k.R_prime * k.R_prime / (2 * mp) + w * w / (2 * mp * k.r_prime * k.r_prime) +
                  ms.mu() / ms.m0() * (-k.R_prime * yt[1] + w / k.r_prime * yt[0]);
    return -mp * ms.Mr_prime() / k.r_prime + eps * two_centre_energy_k(k, ms) + eps * eps * eps2;
}

double truncated_hamiltonian(const CartesianState& s, const MassModel& ms)
{
    double rp = checked_norm(s.x_prime, "x_prime");
    return -ms.mr_prime() * ms.Mr_prime() / rp + ms.eps() * two_centre_energy(s.y, s.x, s.x_prime, ms);
}

double full_hamiltonian(const CartesianState& s, const MassModel& ms)
{
    double e2 = dot(s.y_prime, s.y_prime) / (2 * ms.mr_prime()) + ms.mu() / ms.m0() * dot(s.y_prime, s.y);
    return truncated_hamiltonian(s, ms) + ms.eps() * ms.eps() * e2;
}

IntegralValues evaluate_integrals(const CartesianState& s, const MassModel& ms)
{
    IntegralValues v;
    v.J0 = kepler_energy(s.y, s.x, ms);
    v.J = two_centre_energy(s.y, s.x, s.x_prime, ms);
    EulerParts p = euler_decomposition(s.y, s.x, s.x_prime, ms);
    v.E0 = p.E0;
    v.E1 = p.E1;
    v.E2 = p.E2;
    v.E = p.E0 + ms.mu() * p.E1;
    v.H0 = truncated_hamiltonian(s, ms);
    v.H = full_hamiltonian(s, ms);
    return v;
}

TwoCentreFrame two_centre_frame(const Vec3& y, const Vec3& x, const Vec3& xp, const MassModel& ms)
{
    TwoCentreFrame f;
    f.v0 = 0.5 * xp;
    f.v = x - f.v0;
    f.u = y / ms.mr();
    f.m_plus = ms.Mr();
    f.m_minus = ms.mu() * ms.Mr();
    return f;
}

double euler_integral_G1(const Vec3& u, const Vec3& v, const Vec3& v0, double mp, double mm)
{
    Vec3 c = cross(v, u);
    double rp = checked_norm(v + v0, "v+v0"), rm = checked_norm(v - v0, "v-v0");
    double w = dot(v0, u);
    return dot(c, c) + w * w + 2 * dot(v, v0) * (mp / rp - mm / rm);
}

double two_centre_unit_energy(const Vec3& u, const Vec3& v, const Vec3& v0, double mp, double mm)
{
    double rp = checked_norm(v + v0, "v+v0"), rm = checked_norm(v - v0, "v-v0");
    return dot(u, u) / 2 - mp / rp - mm / rm;
}

double two_centre_elliptic_energy(const EllipticCoordinates& ec, double mp, double mm)
{
    const double l = ec.lambda, b = ec.beta, r0 = ec.r0;
    const double L2 = l * l - 1, B2 = 1 - b * b;
    if (!(L2 > 0) || !(B2 > 0)) throw SingularityError("elliptic", "two_centre_elliptic_energy: coordinate degeneracy");
    double kin = (ec.p_lambda * ec.p_lambda * L2 + ec.p_beta * ec.p_beta * B2 +
                  ec.p_omega * ec.p_omega * (1 / B2 + 1 / L2)) / (2 * r0 * r0);
    double pot = (-(mp + mm) * l + (mp - mm) * b) / r0;
    return (kin + pot) / (l * l - b * b);
}

EllipticEuler elliptic_euler_integral(const EllipticCoordinates& ec, double mp, double mm, double h)
{
    const double l = ec.lambda, b = ec.beta, r0 = ec.r0;
    const double L2 = l * l - 1, B2 = 1 - b * b;
    if (!(L2 > 0) || !(B2 > 0)) throw SingularityError("elliptic", "elliptic_euler_integral: coordinate degeneracy");
    const double pw2 = ec.p_omega * ec.p_omega;
    EllipticEuler r;
    r.F_lambda = ec.p_lambda * ec.p_lambda * L2 + pw2 / L2 - 2 * r0 * (mp + mm) * l - 2 * r0 * r0 * l * l * h;
    r.F_beta = ec.p_beta * ec.p_beta * B2 + pw2 / B2 + 2 * r0 * (mp - mm) * b + 2 * r0 * r0 * b * b * h;
    r.E_bar = 0.5 * (r.F_beta - r.F_lambda);
    return r;
}

}  // namespace e3b
