#pragma once

#include <utility>

#include "euler3b/core_model.hpp"
#include "euler3b/vec.hpp"

namespace e3b {

/// Instantaneous ellipse. g_peri and P are filled by elements_from_cartesian;
/// anomalies_from_mean leaves them at their defaults.
struct OrbitalElements {
    double a = 0, e = 0, Lambda = 0, G = 0;
    double ell = 0, xi = 0, nu = 0, varrho = 1;
    double g_peri = 0;
    Vec3 P{};
    /// e below the near-circular floor; g_peri forced to 0.
    bool circular = false;
};

constexpr double kNearCircular = 1e-8;

/// Eccentric anomaly from mean anomaly. Newton from ℓ + e sin ℓ, bisection fallback on [ℓ−e, ℓ+e].
double solve_kepler(double e, double ell, double tol = 1e-13);

OrbitalElements anomalies_from_mean(double Lambda, double G, double ell, const MassModel& ms);

/// Frame R3(node) R1(incl) taking the reference plane to the orbital plane of x×y.
Mat3 orbit_frame(const Vec3& y, const Vec3& x);

/// Throws DomainError when J0 >= 0. With circular_safe == false an orbit with e < kNearCircular also throws.
OrbitalElements elements_from_cartesian(const Vec3& y, const Vec3& x, const MassModel& ms,
                                        bool circular_safe = true);

/// (y, x) on the ellipse; frame applied after the in-plane R3(g - π/2).
std::pair<Vec3, Vec3> state_from_elements(const OrbitalElements& el, const Mat3& frame, const MassModel& ms);

/// In-plane x̄, ȳ before any frame rotation.
Vec3 xbar(double Lambda, double G, double g, double xi, const MassModel& ms);
Vec3 ybar(double Lambda, double G, double g, double xi, const MassModel& ms);

}  // namespace e3b
