#include "euler3b/coordinate_maps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "euler3b/kepler.hpp"

namespace e3b {

namespace {
constexpr double kPi = std::numbers::pi;

double checked_acos(double c, const char* what)
{
    if (!(std::abs(c) <= 1)) throw DomainError(std::string("k_to_cartesian: |") + what + "| > 1");
    return std::acos(c);
}
}  // namespace

Mat3 rot1(double a)
{
    double c = std::cos(a), s = std::sin(a);
    return {Vec3{1, 0, 0}, Vec3{0, c, -s}, Vec3{0, s, c}};
}

Mat3 rot3(double a)
{
    double c = std::cos(a), s = std::sin(a);
    return {Vec3{c, -s, 0}, Vec3{s, c, 0}, Vec3{0, 0, 1}};
}

KCoordinates to_general(const PlanarKCoordinates& p)
{
    if (p.sigma != 1 && p.sigma != -1) throw DomainError("PlanarKCoordinates: sigma must be +1 or -1");
    KCoordinates k;
    k.Z = p.C;
    k.C = p.C;
    k.Theta = 0;
    k.G = p.G;
    k.Lambda = p.Lambda;
    k.R_prime = p.R_prime;
    k.zeta = p.zeta;
    k.g_node = p.g_node;
    k.theta_angle = p.sigma == 1 ? kPi : 0.0;
    k.g_peri = p.g_peri;
    k.ell = p.ell;
    k.r_prime = p.r_prime;
    return k;
}

CartesianState k_to_cartesian(const KCoordinates& k, const MassModel& ms)
{
    if (!(k.C > 0) || !(k.G > 0)) throw DomainError("k_to_cartesian: C and G must be positive");
    if (!(k.r_prime > 0)) throw DomainError("k_to_cartesian: r' must be positive");
    double i = checked_acos(k.Z / k.C, "Z/C");
    double i1 = checked_acos(k.Theta / k.C, "Theta/C");
    double i2 = checked_acos(k.Theta / k.G, "Theta/G");
    OrbitalElements el = anomalies_from_mean(k.Lambda, k.G, k.ell, ms);

    Mat3 Rc = rot3(k.zeta) * rot1(i);
    Mat3 Rp = Rc * rot3(k.g_node) * rot1(i1);
    Mat3 Ri = Rp * rot3(k.theta_angle) * rot1(i2);
    const Vec3 kk{0, 0, 1};

    CartesianState s;
    s.x = Ri * xbar(k.Lambda, k.G, k.g_peri, el.xi, ms);
    s.y = Ri * ybar(k.Lambda, k.G, k.g_peri, el.xi, ms);
    s.x_prime = k.r_prime * (Rp * kk);
    Vec3 Cv = k.C * (Rc * kk);
    Vec3 Mv = k.G * (Ri * kk);
    Vec3 Mp = Cv - Mv;
    s.y_prime = (k.R_prime / k.r_prime) * s.x_prime + cross(Mp, s.x_prime) / (k.r_prime * k.r_prime);
    bool planar = std::abs(s.x[2]) + std::abs(s.y[2]) + std::abs(s.x_prime[2]) + std::abs(s.y_prime[2]) < 1e-14 * (1 + norm(s.x) + norm(s.y));
    s.dim = planar ? 2 : 3;
    if (planar) s.x[2] = s.y[2] = s.x_prime[2] = s.y_prime[2] = 0;
    return s;
}

CartesianState planar_k_to_cartesian(const PlanarKCoordinates& k, const MassModel& ms)
{
    CartesianState s = k_to_cartesian(to_general(k), ms);
    s.dim = 2;
    s.x[2] = s.y[2] = s.x_prime[2] = s.y_prime[2] = 0;
    return s;
}

Vec3 planar_perihelion(const PlanarKCoordinates& k)
{
    Mat3 R = rot3(k.zeta) * rot3(k.g_node);
    // ϑ = π flips both in-plane components, ϑ = 0 only the second
    Vec3 Pb{std::sin(k.g_peri), -std::cos(k.g_peri), 0};
    Vec3 P = k.sigma == 1 ? Vec3{-Pb[0], -Pb[1], 0} : Vec3{Pb[0], -Pb[1], 0};
    return R * P;
}

PlanarPolar planar_delaunay(double Lambda, double G, double ell, double g_peri, const MassModel& ms)
{
    OrbitalElements el = anomalies_from_mean(Lambda, G, ell, ms);
    PlanarPolar p;
    double k = ms.mr() * ms.mr() * ms.Mr();
    p.R = k / Lambda * el.e * std::sin(el.xi) / (1 - el.e * std::cos(el.xi));
    p.Phi = G;
    p.r = el.a * (1 - el.e * std::cos(el.xi));
    p.phi = el.nu + g_peri - kPi / 2;
    return p;
}

std::array<Vec3, 3> v0_frame(const Vec3& v0)
{
    double r0 = norm(v0);
    if (r0 == 0) throw DomainError("v0_frame: v0 = 0");
    Vec3 k = v0 / r0;
    Vec3 i;
    if (std::abs(k[2]) > 1 - 1e-15 && k[2] > 0) {
        i = {1, 0, 0};
    } else {
        Vec3 e = std::abs(k[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        i = e - dot(e, k) * k;
        i = i / norm(i);
    }
    return {i, cross(k, i), k};
}

namespace {

struct EllipticTangent {
    Vec3 dl, db, dw;
};

EllipticTangent elliptic_tangent(double l, double b, double w, double r0)
{
    double A = (l * l - 1) * (1 - b * b);
    double sq = std::sqrt(A);
    double rho = r0 * sq;
    double drl = r0 * l * (1 - b * b) / sq;
    double drb = -r0 * b * (l * l - 1) / sq;
    EllipticTangent t;
    t.dl = {drl * std::sin(w), -drl * std::cos(w), r0 * b};
    t.db = {drb * std::sin(w), -drb * std::cos(w), r0 * l};
    t.dw = {rho * std::cos(w), rho * std::sin(w), 0};
    return t;
}

Vec3 to_frame(const std::array<Vec3, 3>& F, const Vec3& v) { return {dot(F[0], v), dot(F[1], v), dot(F[2], v)}; }

}  // namespace

EllipticCoordinates elliptic_from_positions(const Vec3& v, const Vec3& v0)
{
    double r0 = norm(v0);
    if (r0 == 0) throw DomainError("elliptic_from_positions: v0 = 0");
    double rp = norm(v + v0), rm = norm(v - v0);
    if (rp < 1e-14 * r0 || rm < 1e-14 * r0) throw SingularityError("v=±v0", "elliptic_from_positions: v = ±v0");
    auto F = v0_frame(v0);
    Vec3 vf = to_frame(F, v);
    EllipticCoordinates ec;
    ec.r0 = r0;
    ec.lambda = std::max(1.0, 0.5 * (rp + rm) / r0);
    ec.beta = std::clamp(0.5 * (rp - rm) / r0, -1.0, 1.0);
    ec.omega = std::atan2(vf[0], -vf[1]);
    return ec;
}

EllipticCoordinates elliptic_from_cartesian(const Vec3& u, const Vec3& v, const Vec3& v0)
{
    EllipticCoordinates ec = elliptic_from_positions(v, v0);
    if (!(ec.lambda > 1) || !(std::abs(ec.beta) < 1))
        throw SingularityError("axis", "elliptic_from_cartesian: v on the axis of v0");
    auto F = v0_frame(v0);
    Vec3 uf = to_frame(F, u);
    EllipticTangent t = elliptic_tangent(ec.lambda, ec.beta, ec.omega, ec.r0);
    ec.p_lambda = dot(uf, t.dl);
    ec.p_beta = dot(uf, t.db);
    ec.p_omega = dot(uf, t.dw);
    return ec;
}

Vec3 elliptic_position(const EllipticCoordinates& ec)
{
    double rho = ec.r0 * std::sqrt(std::max(0.0, (ec.lambda * ec.lambda - 1) * (1 - ec.beta * ec.beta)));
    return {rho * std::sin(ec.omega), -rho * std::cos(ec.omega), ec.r0 * ec.lambda * ec.beta};
}

DelaunayV0 delaunay_v0(const Vec3& u, const Vec3& v, const Vec3& v0)
{
    Vec3 M = cross(v, u);
    double Mn = norm(M);
    if (Mn == 0) throw DomainError("delaunay_v0: M = 0");
    Vec3 n0 = cross(v0, M);
    if (norm(n0) < 1e-8 * Mn * norm(v0)) throw DomainError("delaunay_v0: degenerate node (M parallel to v0)");
    auto F = v0_frame(v0);
    DelaunayV0 d;
    d.Theta = dot(M, v0) / norm(v0);
    d.M_norm = Mn;
    d.r = norm(v);
    d.R = dot(u, v) / d.r;
    d.theta_angle = oriented_angle(v0, F[0], n0);
    d.m_angle = oriented_angle(M, n0, v);
    return d;
}

std::pair<double, double> elliptic_momenta_from_R_M(double R, double Mn, double Theta, double l, double b,
                                                    double r0)
{
    double q = l * l + b * b - 1;
    double disc = (1 - b * b) * (l * l - 1) * Mn * Mn - q * Theta * Theta;
    if (disc < 0) throw DomainError("elliptic_momenta_from_R_M: inconsistent (M, Theta) at this point");
    double s = std::sqrt(disc);
    double pl = r0 * l * R / std::sqrt(q) - b * s / (q * (l * l - 1));
    double pb = r0 * b * R / std::sqrt(q) + l * s / (q * (1 - b * b));
    return {pl, pb};
}

std::pair<double, double> elliptic_momenta_to_R_Msq(double pl, double pb, double Theta, double l, double b,
                                                    double r0)
{
    if (!(l > 1) || !(std::abs(b) < 1)) throw SingularityError("elliptic", "elliptic_momenta_to_R_Msq: lambda = 1 or |beta| = 1");
    double q = l * l + b * b - 1;
    if (!(q > 0)) throw SingularityError("elliptic", "elliptic_momenta_to_R_Msq: lambda^2 + beta^2 <= 1");
    double R = (l * (l * l - 1) * pl + b * (1 - b * b) * pb) / (r0 * (l * l - b * b) * std::sqrt(q));
    double w = l * pb - b * pl;
    double Msq = w * w * (l * l - 1) * (1 - b * b) / ((l * l - b * b) * (l * l - b * b)) + q / ((1 - b * b) * (l * l - 1)) * Theta * Theta;
    return {R, Msq};
}

double symplectic_defect(const FlatMap& f, const std::vector<double>& z, double h)
{
    const std::size_t n2 = z.size();
    if (n2 % 2 != 0) throw DomainError("symplectic_defect: odd dimension");
    const std::size_t n = n2 / 2;
    std::vector<std::vector<double>> J(n2, std::vector<double>(n2));
    for (std::size_t c = 0; c < n2; ++c) {
        auto zp = z, zm = z;
        zp[c] += h;
        zm[c] -= h;
        auto fp = f(zp), fm = f(zm);
        if (fp.size() != n2) throw DomainError("symplectic_defect: map changes dimension");
        for (std::size_t r = 0; r < n2; ++r) J[r][c] = (fp[r] - fm[r]) / (2 * h);
    }
    // (Jᵀ Ω J)_{ab} = Σ_k J_{k,a} J_{k+n,b} − J_{k+n,a} J_{k,b}
    double worst = 0;
    for (std::size_t a = 0; a < n2; ++a)
        for (std::size_t b = 0; b < n2; ++b) {
            double v = 0;
            for (std::size_t k = 0; k < n; ++k) v += J[k][a] * J[k + n][b] - J[k + n][a] * J[k][b];
            double om = (a < n && b == a + n) ? 1.0 : (a >= n && a == b + n) ? -1.0 : 0.0;
            worst = std::max(worst, std::abs(v - om));
        }
    return worst;
}

std::vector<double> planar_delaunay_flat(const std::vector<double>& z, const MassModel& ms)
{
    PlanarPolar p = planar_delaunay(z[0], z[1], z[2], z[3], ms);
    return {p.R, p.Phi, p.r, p.phi};
}

std::vector<double> planar_k_flat(const std::vector<double>& z, int sigma, const MassModel& ms)
{
    PlanarKCoordinates k;
    k.C = z[0];
    k.G = z[1];
    k.Lambda = z[2];
    k.R_prime = z[3];
    k.g_node = z[4];
    k.g_peri = z[5];
    k.ell = z[6];
    k.r_prime = z[7];
    k.sigma = sigma;
    CartesianState s = planar_k_to_cartesian(k, ms);
    return {s.y_prime[0], s.y_prime[1], s.y[0], s.y[1], s.x_prime[0], s.x_prime[1], s.x[0], s.x[1]};
}

}  // namespace e3b
