#include "euler3b/budget.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "euler3b/core_model.hpp"

namespace e3b {

using std::numbers::pi;

StabilityBudget stability_budget(const BudgetInputs& in)
{
    for (double v : {in.a, in.M0, in.M1, in.M, in.M0_prime, in.rho, in.s, in.delta, in.Delta, in.eps0})
        if (!(v > 0)) throw DomainError("stability_budget: inputs must be positive");
    if (!(in.E >= 0)) throw DomainError("stability_budget: E must be non-negative");
    StabilityBudget b;
    b.in = in;
    const double a = in.a, rho = in.rho, s = in.s, d = in.delta, D = in.Delta, E = in.E;
    b.c = 4 * rho * s / d;
    if (in.p_star > 0) {
        b.p_star = in.p_star;
    } else {
        const double theta0 = std::atan(b.c / (2 * D));
        b.p_star = (std::floor(2 * pi / theta0) + 1) * b.c / D;
    }
    b.c_n = in.c_n > 0 ? in.c_n : 81 * 162 * std::ldexp(1.0, in.n + 1);
    const double p = b.p_star;

    b.eps_branches = {16 * rho * s * in.M0 / (a * d * d) * D / d, 2 * E / (a * rho * s) * D / d,
                      2 * rho * in.M1 / (p * a) / (d * d)};
    b.eps = 32 * p * *std::max_element(b.eps_branches.begin(), b.eps_branches.end());
    const double K = 4 * in.M / (a * d * d) + 2 * in.M0_prime / a * D * D / (d * d);
    b.eps_prime = K * b.eps * rho + 8 * E / (a * d * d);
    b.N = b.eps > 0 ? std::floor(1 / b.eps) : std::numeric_limits<double>::infinity();
    b.T1 = s * in.eps0 / 2 * std::min(rho, 1 / K) / (in.M0 / 2 * b.c * b.c + E);
    b.log2_horizon = std::log2(b.T1) + b.N;

    const double inf = std::numeric_limits<double>::infinity();
    b.T0_companion = E > 0 ? a * s / (2 * E * in.M0_prime) : inf;
    const double K0 = in.M / (a * d * d) + in.M0_prime * D * D / (2 * a * d * d);
    b.T0 = E > 0 ? s * std::min({rho * in.eps0 / E, in.eps0 / (8 * E) / K0, a / (2 * E * in.M0_prime)}) : inf;
    b.T0_valid = 16 * E / (a * d * d) <= in.eps0;

    b.assump3 = 2 * in.M0_prime / a * in.eps0 * rho <= 1;
    b.simplify1 = 4 * rho * s / (d * (D + d)) <= 1;
    b.simplify2 = b.c_n * rho * s / (2 * p * D * d) <= 1;
    b.eps_ok = b.eps <= in.eps0 / 2;
    b.eps_prime_ok = b.eps_prime <= in.eps0 / 2;
    b.a_le_M0 = a <= in.M0;
    return b;
}

Theorem5Budget theorem5_budget(double eps, double mu, double eta, double kappa, double rho_minus, double rho_plus,
                               double eps0, const Theorem5Options& opt)
{
    if (!(eps > 0 && eta > 0 && rho_minus > 0 && rho_plus > 0 && eps0 > 0) || mu < 0 || kappa < 0)
        throw DomainError("theorem5_budget: inputs must be positive");
    if (!(opt.alpha > 0 && opt.alpha < 0.5)) throw DomainError("theorem5_budget: alpha must lie in (0, 1/2)");
    Theorem5Budget t;
    t.eps = eps;
    t.mu = mu;
    t.eta = eta;
    t.kappa = kappa;
    t.rho_minus = rho_minus;
    t.rho_plus = rho_plus;
    t.eps0 = eps0;
    const double rm = rho_minus, rp = rho_plus;
    t.E = std::max({eps * eta, eps * kappa, eps * mu, eps * eps, eta * eta * eta}) / (rm * rm);
    t.s0 = std::min(std::pow(rm, 1.5) / rp, rm * rm / std::pow(rp, 1.5));

    BudgetInputs in;
    in.a = eps / (rp * rp * rp);
    in.M0 = eps / (rm * rm * rm);
    in.M1 = eps * (rm + eta * eta) / std::pow(rm, 4);
    in.M = eps / (rm * rm * rm);
    in.M0_prime = eps * eps / std::pow(rm, 4);
    in.E = t.E;
    in.delta = opt.alpha * eta / (2 * std::sqrt(eps)) * t.s0;
    in.Delta = (1 - opt.alpha) * eta / (2 * std::sqrt(eps)) * t.s0;
    in.rho = rm;
    const double c = std::sqrt(rp * eps) / eta;
    in.s = c * in.delta / (4 * in.rho);
    in.eps0 = eps0;
    in.p_star = opt.p_star;
    in.c_n = opt.c_n;
    in.n = 2;
    t.budget = stability_budget(in);

    t.scaling_branches = {eps / (eta * eta), eta * eta * eta / eps, eta, kappa, mu, eps};
    t.eps_scaling = *std::max_element(t.scaling_branches.begin(), t.scaling_branches.end());
    t.eps_star = t.budget.eps / t.eps_scaling;
    return t;
}

}  // namespace e3b
