#pragma once

#include <string>

#include "euler3b/core_model.hpp"

namespace e3b {

/// Λ = √(−𝗆³ℳ²/(2J)). Throws DomainError for J ≥ 0.
double L0_of_J(double J, const MassModel& ms);
double J_of_L0(double Lambda, const MassModel& ms);
/// δ = −2r′J/(𝗆ℳ) = r′/a.
double delta_of(double J, double r_prime, const MassModel& ms);

/// Scaled action 𝒢̂₀(Ê; δ) ∈ [0, 1]: In-area of the level for Ê ≤ 1, Ext-area above, both over 2π.
double G0_hat(double E_hat, double delta);
/// ∂𝒢̂₀/∂Ê = (1/π) ∫ dĜ / √((Ĝ² − Ĝ₋²)(Ĝ₊² − Ĝ²)) over [Ĝ_min, Ĝ_max].
double dG0_hat_dE(double E_hat, double delta);

struct ActionPair {
    double L0 = 0;
    double G0_action = 0;
    /// 1, 2 or 3; 0 on a separatrix value.
    int region = 0;
    /// In and Ext areas over 2π, unscaled; In + Ext = L0.
    double in = 0, ext = 0;
};

/// 𝒢₀ = Λ 𝒢̂₀(E/Λ²; δ). Throws DomainError outside the closed leaf −δ ≤ Ê ≤ 1 + δ²/4.
ActionPair G0_action(double J, double E, double r_prime, const MassModel& ms);

/// ∂𝒢₀/∂E at fixed (J, r′). Throws DomainError on Ê ∈ {−δ, δ, 1 + δ²/4}, where it diverges.
double dG0_dE(double J, double E, double r_prime, const MassModel& ms);

/// Arnold angle 2π t/T of the point (G, g) on its E0 level, in [0, 2π). The reference point is on g ∈ {0, π}:
/// the top (Ĝ_max) of loops that cross Ĝ = 0, the bottom (±Ĝ_min) of the others.
double arnold_angle(double Lambda, double G, double g_peri, double r_prime, const MassModel& ms);

struct RegionInfo {
    int region = 0;
    std::string tag;
    /// Signed distances E − 𝗆²ℳr′ and E + 𝗆³ℳ²/(2J).
    double dist_sigma0 = 0, dist_sigma1 = 0;
};

/// Region j of the leaf: (−δ, min{δ,1}), (min, max), (max{δ,1}, 1 + δ²/4) in Ê.
RegionInfo region_of(double J, double E, double r_prime, const MassModel& ms);

}  // namespace e3b
