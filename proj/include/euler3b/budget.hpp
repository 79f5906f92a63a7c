#pragma once

#include <array>

namespace e3b {

struct BudgetInputs {
    double a = 0, M0 = 0, M1 = 0, M = 0, M0_prime = 0, E = 0;
    double rho = 0, s = 0, delta = 0, Delta = 0, eps0 = 0;
    /// ≤ 0: smallest value consistent with the chart count [2π/θ₀] + 1, θ₀ = atan(c/(2Δ))
    double p_star = 0;
    /// ≤ 0: 81 · 162 · 2^{n+1}
    double c_n = 0;
    int n = 2;
};

/// Constant table of the confinement estimate for h(I) + ω₀(I)(x² + y²)/2 + f.
struct StabilityBudget {
    BudgetInputs in;
    double p_star = 0, c_n = 0;
    /// c = 4ρs/δ
    double c = 0;
    /// the three branches of the max in ε, without the 32 p★ prefactor
    std::array<double, 3> eps_branches{};
    double eps = 0, eps_prime = 0;
    /// floor(1/ε); +inf when ε = 0
    double N = 0;
    double T1 = 0;
    /// T ≤ a s / (2 E M₀′), the companion time of the a-priori estimate
    double T0_companion = 0;
    /// a-priori time T₀ and its side condition 16E/(aδ²) ≤ ε₀
    double T0 = 0;
    bool T0_valid = false;
    /// log₂(T₁ 2^N)
    double log2_horizon = 0;

    bool assump3 = false, simplify1 = false, simplify2 = false, eps_ok = false, eps_prime_ok = false;
    bool a_le_M0 = false;
    bool verdict() const { return assump3 && simplify1 && simplify2 && eps_ok && eps_prime_ok; }
};

/// Throws DomainError unless every input is positive (E ≥ 0 allowed).
StabilityBudget stability_budget(const BudgetInputs& in);

struct Theorem5Options {
    /// δ = α η s₀/(2√ε), Δ = (1 − α) η s₀/(2√ε), 0 < α < 1/2
    double alpha = 0.25;
    double p_star = 0, c_n = 0;
};

struct Theorem5Budget {
    double eps = 0, mu = 0, eta = 0, kappa = 0, rho_minus = 0, rho_plus = 0, eps0 = 0;
    double E = 0, s0 = 0;
    /// max{ε/η², η³/ε, η, κ, μ, ε} and its six branches
    double eps_scaling = 0;
    std::array<double, 6> scaling_branches{};
    /// ε of the constant table over eps_scaling
    double eps_star = 0;
    StabilityBudget budget;
    bool verdict() const { return budget.verdict(); }
};

/// Constants a = ε/ρ₊³, M₀ = M = ε/ρ₋³, M₁ = ε(ρ₋ + η²)/ρ₋⁴, M₀′ = ε²/ρ₋⁴, E from the remainder bounds,
/// ρ = ρ₋ and s chosen so that c = √(ρ₊ε)/η; then stability_budget.
Theorem5Budget theorem5_budget(double eps, double mu, double eta, double kappa, double rho_minus, double rho_plus,
                               double eps0, const Theorem5Options& opt = {});

}  // namespace e3b
