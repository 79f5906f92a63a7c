#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "euler3b/coordinate_maps.hpp"
#include "euler3b/core_model.hpp"
#include "euler3b/dynamics.hpp"

namespace e3b {

/// Malformed, unknown or out-of-range configuration entry.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class InitialMode { Ellipse, Cartesian, K };
enum class FlowModel { ThreeBody, Truncated, TwoCentre };
enum class TimeUnit { Time, InnerPeriods, OuterPeriods };

/// Sectioned key-value configuration. Every key is optional; scenario presets are applied before the file's keys.
struct ExperimentConfig {
    // [experiment]
    std::string scenario = "custom";
    std::uint64_t seed = 1;
    std::string out = "out";

    // [masses]
    double m0 = 1, mu = 1e-3, eps = 1e-3;

    // [initial]
    InitialMode initial = InitialMode::Ellipse;
    /// ellipse mode: inner body at perihelion of (a, e, g), outer body at rest at x_prime
    double a = 1, e = 0.3, g = 0.4;
    Vec3 x_prime{4, 0, 0};
    CartesianState cartesian;
    PlanarKCoordinates k;

    // [integrator]
    FlowModel model = FlowModel::ThreeBody;
    Method method = Method::RK87;
    double tol = 1e-12, step = 0, t_end = 10;
    TimeUnit unit = TimeUnit::OuterPeriods;
    int samples = 100;
    double floor_factor = 1e-6;
    long max_steps = 50'000'000;

    // [portrait]
    std::vector<double> portrait_deltas{0.5, 1, 1.5};
    int portrait_levels = 9, portrait_samples = 400;

    // [actions]
    std::vector<double> action_deltas{0.5, 1.5};
    int action_points = 64, action_probes = 16;

    // [normalform]
    double nf_omega = 1, nf_omega0 = 100, nf_eps = 1e-5;
    int nf_steps = 3;
    ChartBox nf_chart{1, 1, 0.1, 0.02, 0.5, 0.24, 1, 0.6, 0.6, 1};

    // [collision]
    double safety = 2;
    int collision_probes = 32;

    // [budget]
    double b_eps = 1e-6, b_mu = 1e-3, b_eta = 0.004, b_kappa = 2e-3, b_rho_minus = 0.5, b_rho_plus = 2;
    double b_eps0 = 0.1, b_alpha = 0.25;
};

/// Names accepted by the `scenario` key.
std::vector<std::string> scenario_names();

/// Resets cfg to the named preset. Throws ConfigError for an unknown name.
void apply_scenario(ExperimentConfig& cfg, const std::string& name);

/// Parses INI text. Unknown sections or keys, unparsable values and domain violations throw ConfigError.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

CartesianState initial_state(const ExperimentConfig& cfg, const MassModel& ms);
IntegratorConfig integrator_config(const ExperimentConfig& cfg, const MassModel& ms);
Trajectory run_flow(const ExperimentConfig& cfg);

struct CommandResult {
    std::vector<std::string> files;
    std::string summary;
};

std::vector<std::string> command_names();

/// Trajectory CSV, drift CSV, summary.
CommandResult cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir);
/// Critical points, sampled level curves and separatrix areas per δ.
CommandResult cmd_portrait(const ExperimentConfig& cfg, const std::string& out_dir);
/// 𝒢̂₀ and ∂𝒢̂₀/∂Ê over an Ê grid per δ, plus seeded finite-difference probes.
CommandResult cmd_actions(const ExperimentConfig& cfg, const std::string& out_dir);
/// Desk-case normal form: per-step certificate CSV and the final g, f series.
CommandResult cmd_normalform(const ExperimentConfig& cfg, const std::string& out_dir);
/// Verdict CSV along the configured run and seeded focal-configuration probes.
CommandResult cmd_collision(const ExperimentConfig& cfg, const std::string& out_dir);
/// Budget record as key,value CSV.
CommandResult cmd_budget(const ExperimentConfig& cfg, const std::string& out_dir);

/// Dispatch by command name. Throws ConfigError for an unknown command.
CommandResult run_command(const std::string& name, const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace e3b
