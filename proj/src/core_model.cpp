#include "euler3b/core_model.hpp"

#include <cmath>

namespace e3b {

MassModel::MassModel(double m0, double mu, double eps) : m0_(m0), mu_(mu), eps_(eps)
{
    if (!(m0 > 0)) throw DomainError("MassModel: m0 must be positive");
    if (!(mu >= 0) || !(eps >= 0)) throw DomainError("MassModel: mu and eps must be nonnegative");
}

MassModel derive_reduced_masses(double m0, double mu, double eps) { return MassModel(m0, mu, eps); }

void validate_chart(const ChartBox& c)
{
    if (!(c.r > 0 && c.rho > 0 && c.xi > 0 && c.s > 0 && c.delta > 0))
        throw DomainError("ChartBox: widths must be positive");
    if (c.half_I < 0 || c.half_y < 0 || c.half_x < 0) throw DomainError("ChartBox: negative half-width");
}

void validate_state(const CartesianState& s, double min_sep)
{
    if (s.dim != 2 && s.dim != 3) throw DomainError("CartesianState: dim must be 2 or 3");
    if (s.dim == 2 && (s.x[2] != 0 || s.x_prime[2] != 0 || s.y[2] != 0 || s.y_prime[2] != 0))
        throw DomainError("CartesianState: planar state with nonzero third component");
    if (norm(s.x) <= min_sep) throw SingularityError("x", "validate_state: x = 0");
    if (norm(s.x_prime) <= min_sep) throw SingularityError("x_prime", "validate_state: x' = 0");
    if (norm(s.x - s.x_prime) <= min_sep) throw SingularityError("x-x_prime", "validate_state: x = x'");
}

}  // namespace e3b
