#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "euler3b/core_model.hpp"
#include "euler3b/integrals.hpp"

namespace e3b {

/// Flat phase vector (y′, y, x′, x), 12 components.
using Phase = std::array<double, 12>;

Phase to_phase(const CartesianState& s);
CartesianState from_phase(const Phase& z, int dim);

enum class Method { RK87, Splitting };

struct IntegratorConfig {
    Method method = Method::RK87;
    /// Local tolerance (absolute and relative) for RK87.
    double tol = 1e-12;
    /// Fixed step for Splitting; initial step hint for RK87 (0 picks one).
    double step = 0;
    double t_end = 1;
    /// Spacing of emitted samples; samples land exactly on multiples of it.
    double sample_dt = 0.1;
    /// Close-approach floor as a fraction of the initial ‖x′‖.
    double floor_factor = 1e-6;
    long max_steps = 50'000'000;
};

struct TrajectorySample {
    double t = 0;
    CartesianState state;
    IntegralValues integrals;
    /// Smallest ‖x − x′‖ seen at accepted steps since the previous sample.
    double min_separation = 0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    bool truncated = false;
    std::string truncation_reason;
    long steps = 0, rejected = 0;
};

/// Two-centre vector field with x′ frozen: derivative of (y′, y, x′, x), primed block zero.
Phase two_centre_rhs(const Phase& z, const MassModel& ms);

/// Three-body vector field; drop_eps2 removes the ε² group (truncated model).
Phase three_body_rhs(const Phase& z, const MassModel& ms, bool drop_eps2 = false);

Trajectory flow_two_centre(const CartesianState& s0, const MassModel& ms, const IntegratorConfig& cfg);
Trajectory flow_three_body(const CartesianState& s0, const MassModel& ms, const IntegratorConfig& cfg,
                           bool drop_eps2 = false);

struct DriftReport {
    double max_drift = 0;
    /// max_drift / (𝗆²ℳ ‖x′(0)‖)
    double max_drift_normalized = 0;
    double max_H_rel_drift = 0;
    double max_J_rel_drift = 0;
    std::vector<std::pair<double, double>> drift_at;
};

DriftReport euler_drift_report(const Trajectory& traj, const MassModel& ms);

/// Planar start: inner body at the perihelion of an ellipse (a, e) with perihelion argument measured
/// as in planar_perihelion, outer body at rest at x_prime.
CartesianState planar_ellipse_state(double a, double e, double g, const Vec3& x_prime, const MassModel& ms);

/// Kepler period 2π√(a³/ℳ) of the inner ellipse under the two-centre clock.
double inner_period(double a, const MassModel& ms);
/// Period 2π√(r′³/ℳ′) of the O(1) outer potential at radius r′.
double outer_period(double r_prime, const MassModel& ms);

/// Column order of the trajectory CSV.
std::string trajectory_csv_header();
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Single DOP853 step driver used by the flows; exposed for tests.
struct Dop853Stats {
    long steps = 0, rejected = 0;
};

/// Integrates z' = f(z) from t0 to t1. The observer sees every accepted step and may stop the run by returning false.
Dop853Stats dop853(const std::function<Phase(const Phase&)>& f, Phase& z, double t0, double t1, double tol, double h0,
                   const std::function<bool(double, const Phase&)>& observer, long max_steps);

}  // namespace e3b
