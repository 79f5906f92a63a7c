#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "euler3b/core_model.hpp"

namespace e3b {

/// Scaled portrait of E0 in the (g, Ĝ) plane: Ê0 = Ĝ² + δ√(1−Ĝ²) cos g.
double e0_hat(double G_hat, double g, double delta);

struct CriticalPoint {
    double g = 0, G_hat = 0, value = 0;
    std::string kind;
};

/// Minimum P₋ = (π, 0), saddle P₀ = (0, 0), maximum P₊ = (0, √(1−δ²/4)), in that order.
std::array<CriticalPoint, 3> critical_points(double delta);

/// (Ĝ₋², Ĝ₊²). Throws DomainError above the maximum value 1 + δ²/4.
std::pair<double, double> g_hat_pm(double E_hat, double delta);

/// (Ĝ_min, Ĝ_max) of the level set on the half Ĝ ≥ 0.
std::pair<double, double> g_hat_bounds(double E_hat, double delta);

/// g₊(Ĝ) = arccos((Ê − Ĝ²)/(δ√(1−Ĝ²))), argument clamped to [−1, 1]; Ĝ = ±1 gives π/2.
double g_plus(double G_hat, double E_hat, double delta);

enum class Regime { LibrationPi, SeparatrixZero, Rotation, CurveE1, LibrationZero, MaximumPoint };

std::string regime_name(Regime r);

struct PortraitClassification {
    Regime regime = Regime::LibrationPi;
    /// Case number in the portrait case list, e.g. "1.3".
    std::string case_label;
    /// Half width of the libration in g about its centre (π or 0); NaN when g rotates or on separatrices.
    double elongation = 0;
    /// g-interval swept by a libration: [arccos(Ê/δ), 2π − arccos(Ê/δ)] about π, [−w, w] about 0.
    std::pair<double, double> g_range{0, 0};
    std::array<CriticalPoint, 3> critical{};
};

/// Tags follow the case list exactly; the boundaries −δ ≤ Ê ≤ 1 + δ²/4 are inclusive.
PortraitClassification classify(double E_hat, double delta);

using Point = std::array<double, 2>;

struct LevelBranch {
    /// "g+/D+", "g-/D-", "G=1", "G=-1", "point"...
    std::string label;
    std::vector<Point> points;
};

struct LevelComponent {
    bool closed = false;
    std::vector<LevelBranch> branches;
    /// Branch points concatenated in order; consecutive duplicate joints are dropped.
    std::vector<Point> polyline() const;
};

struct LevelCurve {
    double E_hat = 0, delta = 0;
    Regime regime = Regime::LibrationPi;
    /// Coordinate names of the points, "g,G_hat" for the μ = 0 portrait.
    std::string axes = "g,G_hat";
    std::vector<LevelComponent> components;
    bool closed() const;
    std::size_t size() const;
};

/// Samples every branch with n_samples points, clustered as 1 − cos at both ends of [Ĝ_min, Ĝ_max].
/// Libration loops about π use g ∈ [0, 2π]; everything else uses g ∈ [−π, π].
LevelCurve sample_level_curve(double E_hat, double delta, int n_samples);

/// Absolute polygon area of a closed point list.
double shoelace_area(const std::vector<Point>& pts);

/// Area of {Ê0 < Ê} in [0, 2π] × [−1, 1] from a sampled level curve.
double sublevel_area(const LevelCurve& lc);

/// Discrete symmetric Hausdorff distance between two point sets.
double hausdorff(const std::vector<Point>& a, const std::vector<Point>& b);

/// Projected μ > 0 level curves: c1 in the (ℓ, Λ) plane, c2 in the (g, G) plane.
struct MuLevelCurves {
    LevelCurve c1, c2;
    /// Matching μ = 0 points, same order and layout.
    LevelCurve c1_unperturbed, c2_unperturbed;
    double max_residual = 0;
};

/// Residuals (J-equation, E-equation) of the C̄₂ system at (Λ, G, g).
std::array<double, 2> graph_curve_residual(double Lambda, double G, double g, double J, double E, double r_prime,
                                           double mu, const MassModel& ms);
/// Residuals of the C̄₁ system at (Λ, G, ℓ).
std::array<double, 2> graph_curve1_residual(double Lambda, double G, double ell, double J, double E, double r_prime,
                                            double mu, int sigma, const MassModel& ms);

/// Newton continuation from μ = 0 in steps of factor 2. Throws ConvergenceError naming the last good point.
MuLevelCurves mu_level_curves(double J, double E, double r_prime, double mu, int sigma, const MassModel& ms,
                              int n_samples = 64);

}  // namespace e3b
