#pragma once

#include <array>
#include <functional>
#include <vector>

#include "euler3b/core_model.hpp"
#include "euler3b/vec.hpp"

namespace e3b {

Mat3 rot1(double alpha);
Mat3 rot3(double alpha);

/// (Z, C, Θ, G, Λ, R′ | ζ, g, ϑ, ḡ, ℓ, r′)
struct KCoordinates {
    double Z = 0, C = 0, Theta = 0, G = 0, Lambda = 0, R_prime = 0;
    double zeta = 0, g_node = 0, theta_angle = 0, g_peri = 0, ell = 0, r_prime = 1;
};

/// Planar chart. sigma = +1 selects ϑ = π (M parallel to C when C > G),
/// sigma = -1 selects ϑ = 0 (M antiparallel to C). Z is taken equal to C.
struct PlanarKCoordinates {
    double C = 0, G = 0, Lambda = 0, R_prime = 0;
    double zeta = 0, g_node = 0, g_peri = 0, ell = 0, r_prime = 1;
    int sigma = 1;
};

KCoordinates to_general(const PlanarKCoordinates& k);

CartesianState k_to_cartesian(const KCoordinates& k, const MassModel& ms);
CartesianState planar_k_to_cartesian(const PlanarKCoordinates& k, const MassModel& ms);

/// Perihelion direction of the planar chart.
Vec3 planar_perihelion(const PlanarKCoordinates& k);

struct PlanarPolar {
    double R = 0, Phi = 0, r = 0, phi = 0;
};

/// (Λ, G, ℓ, ḡ) to (R, Φ, r, φ).
PlanarPolar planar_delaunay(double Lambda, double G, double ell, double g_peri, const MassModel& ms);

struct EllipticCoordinates {
    double lambda = 1, beta = 0, omega = 0;
    double p_lambda = 0, p_beta = 0, p_omega = 0;
    double r0 = 1;
};

/// Orthonormal frame (i, j, k) with k along v0. Fixed choice: i = normalize(e ×  k) for the
/// first standard axis e not parallel to v0, rotated so that v0 along e3 gives the identity.
std::array<Vec3, 3> v0_frame(const Vec3& v0);

EllipticCoordinates elliptic_from_positions(const Vec3& v, const Vec3& v0);

/// Positions plus momenta by the cotangent lift p_q = u · ∂v/∂q.
EllipticCoordinates elliptic_from_cartesian(const Vec3& u, const Vec3& v, const Vec3& v0);

/// Inverse of the position part, in the v0 frame (third axis along v0).
Vec3 elliptic_position(const EllipticCoordinates& ec);

struct DelaunayV0 {
    double Theta = 0, M_norm = 0, R = 0, theta_angle = 0, m_angle = 0, r = 0;
};

DelaunayV0 delaunay_v0(const Vec3& u, const Vec3& v, const Vec3& v0);

/// Forward impulses p̄_λ, p̄_β from (R, 𝖬, Θ).
std::pair<double, double> elliptic_momenta_from_R_M(double R, double M_norm, double Theta, double lambda,
                                                     double beta, double r0);

/// Inverse: (R, 𝖬²).
std::pair<double, double> elliptic_momenta_to_R_Msq(double p_lambda, double p_beta, double Theta, double lambda,
                                                    double beta, double r0);

using FlatMap = std::function<std::vector<double>(const std::vector<double>&)>;

/// max |Jᵀ Ω J − Ω| for a map written in (momenta | coordinates) order, Ω = [[0, I], [−I, 0]];
/// J by central differences with step h.
double symplectic_defect(const FlatMap& f, const std::vector<double>& z, double h = 1e-6);

/// (Λ, G | ℓ, ḡ) to (R, Φ | r, φ).
std::vector<double> planar_delaunay_flat(const std::vector<double>& z, const MassModel& ms);

/// (C, G, Λ, R′ | g, ḡ, ℓ, r′) to (y′₁, y′₂, y₁, y₂ | x′₁, x′₂, x₁, x₂) with ζ = 0 and Z = C.
std::vector<double> planar_k_flat(const std::vector<double>& z, int sigma, const MassModel& ms);

}  // namespace e3b
