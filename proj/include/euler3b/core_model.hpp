#pragma once

#include <stdexcept>
#include <string>

#include "euler3b/vec.hpp"

namespace e3b {

/// Input outside the domain of a formula.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Collision-type singularity; `which` names the exclusion that failed.
struct SingularityError : std::runtime_error {
    SingularityError(const std::string& which_, const std::string& msg)
        : std::runtime_error(msg), which(which_) {}
    std::string which;
};

/// Iterative method that did not converge.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bare masses and the reduced quantities built from them.
class MassModel {
public:
    MassModel(double m0, double mu, double eps);

    double m0() const { return m0_; }
    double mu() const { return mu_; }
    double eps() const { return eps_; }
    double m_prime() const { return mu_ * m0_; }
    double m() const { return eps_ * mu_ * m0_; }
    /// 𝗆′
    double mr_prime() const { return m0_ / (1.0 + mu_); }
    /// 𝗆
    double mr() const { return m0_ / (1.0 + eps_ * mu_); }
    /// ℳ′
    double Mr_prime() const { return m0_ * (1.0 + mu_); }
    /// ℳ
    double Mr() const { return m0_ * (1.0 + eps_ * mu_); }

private:
    double m0_, mu_, eps_;
};

MassModel derive_reduced_masses(double m0, double mu, double eps);

/// Heliocentric phase point (y', y, x', x); planar states have dim == 2 and zero third components.
struct CartesianState {
    Vec3 y_prime{}, y{}, x_prime{}, x{};
    int dim = 2;
};

/// Chart centre, half-widths and analyticity widths.
struct ChartBox {
    double I0 = 0, y0 = 0;
    double half_I = 0, half_y = 0, half_x = 0;
    double r = 1, rho = 1, xi = 1, s = 1, delta = 1;
};

void validate_chart(const ChartBox& c);

/// Throws SingularityError naming "x", "x_prime" or "x-x_prime" when a separation falls below min_sep.
void validate_state(const CartesianState& s, double min_sep = 1e-12);

}  // namespace e3b
