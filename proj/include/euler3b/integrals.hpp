#pragma once

#include "euler3b/coordinate_maps.hpp"
#include "euler3b/core_model.hpp"
#include "euler3b/vec.hpp"

namespace e3b {

struct IntegralValues {
    double J0 = 0, J = 0, E = 0, E0 = 0, E1 = 0, E2 = 0, H = 0, H0 = 0;
};

double kepler_energy(const Vec3& y, const Vec3& x, const MassModel& ms);
double two_centre_energy(const Vec3& y, const Vec3& x, const Vec3& x_prime, const MassModel& ms);

/// M = x × y
Vec3 angular_momentum(const Vec3& y, const Vec3& x);
/// L = y × M − 𝗆²ℳ x/‖x‖
Vec3 eccentricity_vector(const Vec3& y, const Vec3& x, const MassModel& ms);

/// E = E0 + μ E1 (E2 dropped).
double euler_integral_cartesian(const Vec3& y, const Vec3& x, const Vec3& x_prime, const MassModel& ms);

struct EulerParts {
    double E0 = 0, E1 = 0, E2 = 0;
};

EulerParts euler_decomposition(const Vec3& y, const Vec3& x, const Vec3& x_prime, const MassModel& ms);

/// E0 + μE1 + E2 through the midpoint frame: |(x − x′/2) × y|² + (x′·y)²/4 + 𝗆² x′·(x − x′/2)(ℳ/‖x‖ − μℳ/‖x′−x‖).
double euler_chain(const Vec3& y, const Vec3& x, const Vec3& x_prime, const MassModel& ms);

double euler_integral_k(const KCoordinates& k, const MassModel& ms);
double euler_integral_k(const PlanarKCoordinates& k, const MassModel& ms);
double two_centre_energy_k(const KCoordinates& k, const MassModel& ms);
double two_centre_energy_k(const PlanarKCoordinates& k, const MassModel& ms);
/// Three-body H in the planar chart, with y components read in the rotated frame.
double full_hamiltonian_k(const PlanarKCoordinates& k, const MassModel& ms);

double full_hamiltonian(const CartesianState& s, const MassModel& ms);
/// H without the ε² group.
double truncated_hamiltonian(const CartesianState& s, const MassModel& ms);

IntegralValues evaluate_integrals(const CartesianState& s, const MassModel& ms);

/// Two-centre problem with unit-mass particle: v0 = x′/2, v = x − x′/2, u = y/𝗆, m₊ = ℳ, m₋ = μℳ.
struct TwoCentreFrame {
    Vec3 u{}, v{}, v0{};
    double m_plus = 0, m_minus = 0;
};

TwoCentreFrame two_centre_frame(const Vec3& y, const Vec3& x, const Vec3& x_prime, const MassModel& ms);

/// ‖v × u‖² + (v0·u)² + 2 v·v0 (m₊/‖v+v0‖ − m₋/‖v−v0‖)
double euler_integral_G1(const Vec3& u, const Vec3& v, const Vec3& v0, double m_plus, double m_minus);

/// ‖u‖²/2 − m₊/‖v+v0‖ − m₋/‖v−v0‖
double two_centre_unit_energy(const Vec3& u, const Vec3& v, const Vec3& v0, double m_plus, double m_minus);

/// Two-centre Hamiltonian in elliptic coordinates.
double two_centre_elliptic_energy(const EllipticCoordinates& ec, double m_plus, double m_minus);

struct EllipticEuler {
    double E_bar = 0, F_lambda = 0, F_beta = 0;
};

EllipticEuler elliptic_euler_integral(const EllipticCoordinates& ec, double m_plus, double m_minus, double h);

}  // namespace e3b
