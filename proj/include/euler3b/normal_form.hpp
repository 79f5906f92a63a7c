#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "euler3b/core_model.hpp"

namespace e3b {

using Complex = std::complex<double>;

/// A hypothesis of an iterative or normal-form step failed; `inequality` names it.
struct HypothesisError : DomainError {
    HypothesisError(const std::string& ineq, const std::string& msg) : DomainError(msg), inequality(ineq) {}
    std::string inequality;
};

/// Monomial e^{ik·φ} q^h p^j (I−I₀)^a (y−y₀)^{a_y} x^b e^{νx}.
/// `ints` packs k (n), h (m), j (m), a (n + 1, y last) and b.
struct TermKey {
    std::vector<int> ints;
    Complex nu{0, 0};
};

struct TermKeyLess {
    bool operator()(const TermKey& l, const TermKey& r) const;
};

struct Truncation {
    int k_max = 8;
    /// total degree in (I−I₀, y−y₀)
    int deg_poly = 6;
    int deg_x = 24;
    /// total degree in (q, p)
    int deg_pq = 6;
    /// terms whose norm weight falls below this are dropped and counted as discarded
    double prune = 1e-16;
};

/// Truncated Taylor–Fourier series in n angle pairs (I, φ), one pair (y, x) and m pairs (q, p).
/// The centre I₀ is chart.I0 in every component. Coefficients are complex; real functions carry conjugate
/// pairs of modes.
class Series {
public:
    using Map = std::map<TermKey, Complex, TermKeyLess>;

    Series(int n, int m, const ChartBox& chart, Truncation tr = {});

    int n() const { return n_; }
    int m() const { return m_; }
    const ChartBox& chart() const { return chart_; }
    const Truncation& truncation() const { return tr_; }
    const Map& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    /// Norm mass dropped by truncation in the operations that produced this series.
    double discarded() const { return discarded_; }

    Series with_chart(const ChartBox& c) const;
    Series zero() const { return Series(n_, m_, chart_, tr_); }

    /// Adds c to the coefficient of `key`; keys beyond the truncation orders are dropped and counted.
    void add(const TermKey& key, Complex c);
    /// Convenience term builder; empty vectors mean zeros.
    void add_term(Complex c, std::vector<int> k, std::vector<int> h = {}, std::vector<int> j = {},
                  std::vector<int> a = {}, int b = 0, Complex nu = 0);

    int k(const TermKey& t, int i) const { return t.ints[i]; }
    int h(const TermKey& t, int i) const { return t.ints[n_ + i]; }
    int j(const TermKey& t, int i) const { return t.ints[n_ + m_ + i]; }
    int a(const TermKey& t, int i) const { return t.ints[n_ + 2 * m_ + i]; }
    int b(const TermKey& t) const { return t.ints.back(); }
    /// (k, h − j) = (0, 0)
    bool is_average(const TermKey& t) const;

    /// Majorant weight of one term on the current chart.
    double weight(const TermKey& t, Complex c) const;
    double weight(const TermKey& t, Complex c, const ChartBox& widths) const;

    Complex evaluate(const std::vector<double>& I, const std::vector<double>& phi, double y, double x,
                     const std::vector<double>& q = {}, const std::vector<double>& p = {}) const;

    Series d_I(int i) const;
    Series d_phi(int i) const;
    Series d_y() const;
    Series d_x() const;
    Series d_q(int i) const;
    Series d_p(int i) const;

    Series operator+(const Series& o) const;
    Series operator-(const Series& o) const;
    Series operator*(const Series& o) const;
    Series operator*(Complex c) const;
    Series& operator+=(const Series& o);

private:
    void check_compatible(const Series& o) const;

    int n_, m_;
    ChartBox chart_;
    Truncation tr_;
    Map terms_;
    double discarded_ = 0;
};

/// sup |x| over the complexified x-interval [−half_x, half_x] widened by ξ.
double x_sup(const ChartBox& c);

/// Σ_{k,h,j} ‖f_{khj}‖ e^{s|k|} δ^{h+j}, with ‖f_{khj}‖ bounded by the sum of its term majorants.
double series_norm(const Series& f);
double series_norm(const Series& f, const ChartBox& widths);

struct AverageSplit {
    Series average, off_average;
};
AverageSplit average_and_offaverage(const Series& f);

/// {f, g} = Σ ∂_P f ∂_Q g − ∂_P g ∂_Q f over the pairs (P, Q) = (I_i, φ_i), (y, x), (q_i, p_i).
/// With this convention {I₁, φ₁} = +1 and d g/dt = {H, g} along the flow of H.
Series poisson_bracket(const Series& f, const Series& g);

struct LieOptions {
    int j_max = 60;
    double rel_tol = 1e-16;
    /// d = min{ρ′s′, r′ξ′, δ′²}; when positive the a-priori ratio c̄‖φ‖/d < 1 is enforced
    double d = 0;
    double c_bar = 0;
};

/// Φ_h g = Σ_{j≥h} L_φ^j g / j! with L_φ = {φ, ·}. Throws ConvergenceError when the terms stop shrinking.
Series lie_queue(const Series& phi, const Series& g, int h_index, const LieOptions& opt = {});

/// Chart-frozen frequencies ω_y, ω_I, ω_J at the chart centre and their sup bounds over the chart.
struct FrequencyData {
    double omega_y = 0;
    std::vector<double> omega_I, omega_J;
    /// ‖1/ω_y‖, ‖ω_I/ω_y‖, ‖ω_J/ω_y‖ over the chart
    double inv_omega_y_sup = 0, ratio_I_sup = 0, ratio_J_sup = 0;

    Complex lambda(const std::vector<int>& k, const std::vector<int>& h, const std::vector<int>& j) const;
};

/// Freezes ∂h0 at the centre; the sup bounds use |ω_y| ≥ |ω_y(centre)| − ‖ω_y − ω_y(centre)‖.
/// h0 must be in the normal class and x-free. Throws DomainError when ω_y may vanish on the chart.
FrequencyData freeze_frequencies(const Series& h0);
FrequencyData freeze_frequencies(const Series& h0, const ChartBox& widths);

/// φ with ω_y ∂_x φ + λ φ = f̃ mode by mode, φ(x = 0) = 0. Terms with |α|𝒳 ≤ 1 (α = ν + λ/ω_y) use the
/// Taylor series of the integral, the others its closed form on the x^b e^{νx} basis.
Series homological_solve(const Series& f_tilde, const FrequencyData& freq);
/// D_ω φ = ω_y ∂_x φ + λ φ with the frozen frequencies.
Series apply_D(const Series& phi, const FrequencyData& freq);

/// One checked inequality lhs < rhs; margin = rhs / lhs.
struct Inequality {
    std::string name;
    double lhs = 0, rhs = 0;
    bool ok = false;
    /// false for post-conditions that are reported but not enforced
    bool hypothesis = true;
    double margin() const;
};

struct NormalFormConstants {
    double c_bar = 0, c_tilde = 0, c_nm = 0;
    /// c̄ = 2^{n+2m+1}, c̃ = 162 c̄, c_{n,m} = 81 c̃
    static NormalFormConstants defaults(int n, int m);
};

/// Step widths r′, ρ′, ξ′, s′, δ′. `stronger` selects 3s′ < s, 3δ′ < δ, 𝒳‖ω_I/ω_y‖ < s′, 𝒳‖ω_J/ω_y‖ < δ′/δ
/// with s₊ = s − 3s′, δ₊ = δ − 3δ′.
struct StepWidths {
    double r = 0, rho = 0, xi = 0, s = 0, delta = 0;
    bool stronger = false;
};

struct StepCertificate {
    std::vector<Inequality> checks;
    NormalFormConstants constants;
    ChartBox widths_in, widths_out;
    double norm_f = 0, norm_f_tilde = 0, norm_phi = 0;
    double norm_f_plus = 0, norm_f_tilde_plus = 0;
    /// ‖ω_y∂_xφ + λφ − f̃‖ on the ring
    double homological_residual = 0;
    /// ‖f̃ + {φ, h0}‖: the part left by freezing the frequencies
    double frozen_residual = 0;
    double discarded = 0;
    bool all_ok() const;
};

struct StepResult {
    Series g_plus, f_plus, phi;
    StepCertificate cert;
};

/// g₊ = g + f̄ and f₊ = f̃ + {φ, h0} + Φ₂(h0) + Φ₁(g) + Φ₁(f), with f₊ on the shrunk chart.
/// Throws HypothesisError naming the first failing inequality.
StepResult iterative_step(const Series& h0, const Series& g, const Series& f, const StepWidths& w,
                          const NormalFormConstants& c);

struct NormalFormResult {
    Series g, f;
    std::vector<StepCertificate> steps;
    std::vector<Inequality> assumptions;
    int certified_steps = 0;
    /// empty when all N steps were certified
    std::string failure;
};

/// N iterative steps with the widths 2r′ = r/3, 3s′ = s/3, 3δ′ = δ/3 for the first and r/(6N), s/(9N), δ/(9N)
/// after it. Failing assumptions throw HypothesisError; a failing step returns the certified prefix.
NormalFormResult normal_form_N(const Series& h0, const Series& f, int N, const NormalFormConstants& c);

/// h0 = ω I + ω₀ y²/2 and f = ε cos(φ) x with n = 1, m = 0.
struct DeskCase {
    Series h0, f;
};
DeskCase desk_case(double omega, double omega0, double eps, const ChartBox& chart, Truncation tr = {});

/// Line-per-term text: `k | h | j | powers | exponent | coefficient`, headed by `# series n m` and the chart.
void write_series(std::ostream& os, const Series& f);
Series read_series(std::istream& is);

/// Time-one map of the flow of φ on (I, φ, y, x, q, p), from the Lie series of each coordinate.
struct PhasePoint {
    std::vector<double> I, phi;
    double y = 0, x = 0;
    std::vector<double> q, p;
};
PhasePoint lie_transform(const Series& phi, const PhasePoint& z);
/// Solves lie_transform(phi, w) = z for w by Newton iteration.
PhasePoint lie_transform_inverse(const Series& phi, const PhasePoint& z, double tol = 1e-14);

}  // namespace e3b
