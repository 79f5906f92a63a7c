#include "euler3b/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace e3b {

namespace {

constexpr Complex I_unit{0, 1};

int sum_range(const std::vector<int>& v, int from, int count)
{
    int s = 0;
    for (int i = from; i < from + count; ++i) s += std::abs(v[i]);
    return s;
}

Complex ipow(Complex z, int e)
{
    Complex r = 1;
    for (int i = 0; i < e; ++i) r *= z;
    return r;
}

double dpow(double z, int e)
{
    double r = 1;
    for (int i = 0; i < e; ++i) r *= z;
    return r;
}

bool same_centre(const ChartBox& a, const ChartBox& b)
{
    return a.I0 == b.I0 && a.y0 == b.y0 && a.half_I == b.half_I && a.half_y == b.half_y && a.half_x == b.half_x;
}

}  // namespace

bool TermKeyLess::operator()(const TermKey& l, const TermKey& r) const
{
    if (l.ints != r.ints) return l.ints < r.ints;
    if (l.nu.real() != r.nu.real()) return l.nu.real() < r.nu.real();
    return l.nu.imag() < r.nu.imag();
}

Series::Series(int n, int m, const ChartBox& chart, Truncation tr) : n_(n), m_(m), chart_(chart), tr_(tr)
{
    if (n < 0 || m < 0) throw DomainError("Series: negative dimension");
    validate_chart(chart);
}

Series Series::with_chart(const ChartBox& c) const
{
    validate_chart(c);
    Series out = *this;
    out.chart_ = c;
    return out;
}

bool Series::is_average(const TermKey& t) const
{
    for (int i = 0; i < n_; ++i)
        if (k(t, i) != 0) return false;
    for (int i = 0; i < m_; ++i)
        if (h(t, i) != j(t, i)) return false;
    return true;
}

double x_sup(const ChartBox& c) { return std::hypot(c.half_x + c.xi, c.xi); }

double Series::weight(const TermKey& t, Complex c) const { return weight(t, c, chart_); }

double Series::weight(const TermKey& t, Complex c, const ChartBox& w) const
{
    double v = std::abs(c);
    v *= std::exp(w.s * sum_range(t.ints, 0, n_));
    v *= dpow(w.delta, sum_range(t.ints, n_, 2 * m_));
    v *= dpow(w.half_I + w.rho, sum_range(t.ints, n_ + 2 * m_, n_));
    v *= dpow(w.half_y + w.r, a(t, n_));
    v *= dpow(x_sup(w), b(t));
    v *= std::exp(std::abs(t.nu.real()) * (w.half_x + w.xi) + std::abs(t.nu.imag()) * w.xi);
    return v;
}

void Series::add(const TermKey& key, Complex c)
{
    if (c == Complex(0, 0)) return;
    const bool beyond = sum_range(key.ints, 0, n_) > tr_.k_max ||
                        sum_range(key.ints, n_ + 2 * m_, n_ + 1) > tr_.deg_poly || b(key) > tr_.deg_x ||
                        sum_range(key.ints, n_, 2 * m_) > tr_.deg_pq;
    if (beyond) {
        discarded_ += weight(key, c);
        return;
    }
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(key, c);
        return;
    }
    it->second += c;
    if (it->second == Complex(0, 0)) terms_.erase(it);
}

void Series::add_term(Complex c, std::vector<int> kk, std::vector<int> hh, std::vector<int> jj,
                      std::vector<int> aa, int bb, Complex nu)
{
    kk.resize(n_, 0);
    hh.resize(m_, 0);
    jj.resize(m_, 0);
    aa.resize(n_ + 1, 0);
    TermKey key;
    key.ints.reserve(2 * n_ + 2 * m_ + 2);
    for (auto* v : {&kk, &hh, &jj, &aa}) key.ints.insert(key.ints.end(), v->begin(), v->end());
    key.ints.push_back(bb);
    key.nu = nu;
    add(key, c);
}

void Series::check_compatible(const Series& o) const
{
    if (n_ != o.n_ || m_ != o.m_) throw DomainError("Series: dimensions differ");
    if (!same_centre(chart_, o.chart_)) throw DomainError("Series: incompatible charts");
}

Complex Series::evaluate(const std::vector<double>& I, const std::vector<double>& phi, double y, double x,
                         const std::vector<double>& q, const std::vector<double>& p) const
{
    if ((int)I.size() != n_ || (int)phi.size() != n_ || (int)q.size() != m_ || (int)p.size() != m_)
        throw DomainError("Series::evaluate: wrong point dimension");
    Complex sum = 0;
    for (const auto& [t, c] : terms_) {
        double ang = 0, mono = 1;
        for (int i = 0; i < n_; ++i) {
            ang += k(t, i) * phi[i];
            mono *= dpow(I[i] - chart_.I0, a(t, i));
        }
        for (int i = 0; i < m_; ++i) mono *= dpow(q[i], h(t, i)) * dpow(p[i], j(t, i));
        mono *= dpow(y - chart_.y0, a(t, n_)) * dpow(x, b(t));
        sum += c * mono * std::exp(I_unit * ang + t.nu * x);
    }
    return sum;
}

namespace {

/// Derivative with respect to the polynomial slot `slot` of ints (multiplies by the power and lowers it).
Series d_power(const Series& f, int slot)
{
    Series out = f.zero();
    for (const auto& [t, c] : f.terms()) {
        int e = t.ints[slot];
        if (e == 0) continue;
        TermKey u = t;
        --u.ints[slot];
        out.add(u, c * double(e));
    }
    return out;
}

}  // namespace

Series Series::d_I(int i) const { return d_power(*this, n_ + 2 * m_ + i); }
Series Series::d_y() const { return d_power(*this, n_ + 2 * m_ + n_); }
Series Series::d_q(int i) const { return d_power(*this, n_ + i); }
Series Series::d_p(int i) const { return d_power(*this, n_ + m_ + i); }

Series Series::d_phi(int i) const
{
    Series out = zero();
    for (const auto& [t, c] : terms_)
        if (k(t, i) != 0) out.add(t, c * I_unit * double(k(t, i)));
    return out;
}

Series Series::d_x() const
{
    Series out = d_power(*this, (int)(2 * n_ + 2 * m_ + 1));
    for (const auto& [t, c] : terms_)
        if (t.nu != Complex(0, 0)) out.add(t, c * t.nu);
    return out;
}

Series Series::operator+(const Series& o) const
{
    Series out = *this;
    out += o;
    return out;
}

Series& Series::operator+=(const Series& o)
{
    check_compatible(o);
    for (const auto& [t, c] : o.terms_) add(t, c);
    discarded_ += o.discarded_;
    return *this;
}

Series Series::operator-(const Series& o) const { return *this + o * Complex(-1, 0); }

Series Series::operator*(Complex c) const
{
    Series out = zero();
    out.discarded_ = discarded_ * std::abs(c);
    for (const auto& [t, v] : terms_) out.add(t, v * c);
    return out;
}

Series Series::operator*(const Series& o) const
{
    check_compatible(o);
    Series out = zero();
    out.discarded_ = discarded_ * series_norm(o) + o.discarded_ * series_norm(*this);
    TermKey u;
    for (const auto& [t1, c1] : terms_)
        for (const auto& [t2, c2] : o.terms_) {
            u.ints.resize(t1.ints.size());
            for (std::size_t i = 0; i < t1.ints.size(); ++i) u.ints[i] = t1.ints[i] + t2.ints[i];
            u.nu = t1.nu + t2.nu;
            Complex c = c1 * c2;
            if (out.weight(u, c) < tr_.prune) {
                out.discarded_ += out.weight(u, c);
                continue;
            }
            out.add(u, c);
        }
    return out;
}

double series_norm(const Series& f) { return series_norm(f, f.chart()); }

double series_norm(const Series& f, const ChartBox& w)
{
    double s = 0;
    for (const auto& [t, c] : f.terms()) s += f.weight(t, c, w);
    return s;
}

AverageSplit average_and_offaverage(const Series& f)
{
    AverageSplit r{f.zero(), f.zero()};
    for (const auto& [t, c] : f.terms()) (f.is_average(t) ? r.average : r.off_average).add(t, c);
    return r;
}

Series poisson_bracket(const Series& f, const Series& g)
{
    if (f.n() != g.n() || f.m() != g.m()) throw DomainError("poisson_bracket: dimensions differ");
    if (!same_centre(f.chart(), g.chart())) throw DomainError("poisson_bracket: incompatible charts");
    Series out = f.zero();
    for (int i = 0; i < f.n(); ++i) {
        out += f.d_I(i) * g.d_phi(i);
        out += g.d_I(i) * f.d_phi(i) * Complex(-1, 0);
    }
    out += f.d_y() * g.d_x();
    out += g.d_y() * f.d_x() * Complex(-1, 0);
    for (int i = 0; i < f.m(); ++i) {
        out += f.d_q(i) * g.d_p(i);
        out += g.d_q(i) * f.d_p(i) * Complex(-1, 0);
    }
    return out;
}

Series lie_queue(const Series& phi, const Series& g, int h_index, const LieOptions& opt)
{
    if (h_index < 0) throw DomainError("lie_queue: negative index");
    const double nphi = series_norm(phi);
    if (opt.d > 0 && opt.c_bar * nphi / opt.d >= 1)
        throw ConvergenceError("lie_queue: c_bar |phi| / d >= 1, the series may diverge");
    Series sum = g.zero();
    Series term = g;
    const double scale = std::max(series_norm(g), std::numeric_limits<double>::min());
    if (h_index == 0) sum += term;
    double prev = scale;
    for (int j = 1; j <= opt.j_max; ++j) {
        term = poisson_bracket(phi, term) * Complex(1.0 / j, 0);
        const double tn = series_norm(term);
        if (j >= h_index) sum += term;
        if (tn <= opt.rel_tol * scale || term.empty()) return sum;
        if (j > 4 && tn > prev) throw ConvergenceError("lie_queue: terms grow, the series diverges");
        prev = tn;
    }
    throw ConvergenceError("lie_queue: no convergence within j_max terms");
}

Complex FrequencyData::lambda(const std::vector<int>& k, const std::vector<int>& h, const std::vector<int>& j) const
{
    Complex l = 0;
    for (std::size_t i = 0; i < omega_I.size(); ++i) l += I_unit * double(k[i]) * omega_I[i];
    for (std::size_t i = 0; i < omega_J.size(); ++i) l += double(h[i] - j[i]) * omega_J[i];
    return l;
}

namespace {

/// ∂h0/∂J_i for h0 in the normal class: (qp)^h → h_i (qp)^{h − e_i}.
Series d_J(const Series& h0, int i)
{
    const int n = h0.n(), m = h0.m();
    Series out = h0.zero();
    for (const auto& [t, c] : h0.terms()) {
        const int e = t.ints[n + i];
        if (e == 0) continue;
        TermKey u = t;
        --u.ints[n + i];
        --u.ints[n + m + i];
        out.add(u, c * double(e));
    }
    return out;
}

/// Constant term (all powers zero, ν = 0) of an x-free, angle-free series.
double centre_value(const Series& s)
{
    double v = 0;
    for (const auto& [t, c] : s.terms()) {
        bool zero = t.nu == Complex(0, 0);
        for (int x : t.ints) zero = zero && x == 0;
        if (zero) v += c.real();
    }
    return v;
}

Series drop_constant(const Series& s)
{
    Series out = s.zero();
    for (const auto& [t, c] : s.terms()) {
        bool zero = t.nu == Complex(0, 0);
        for (int x : t.ints) zero = zero && x == 0;
        if (!zero) out.add(t, c);
    }
    return out;
}

}  // namespace

FrequencyData freeze_frequencies(const Series& h0) { return freeze_frequencies(h0, h0.chart()); }

FrequencyData freeze_frequencies(const Series& h0, const ChartBox& w)
{
    for (const auto& [t, c] : h0.terms()) {
        if (!h0.is_average(t) || h0.b(t) != 0 || t.nu != Complex(0, 0))
            throw DomainError("freeze_frequencies: h0 must be x-free and in the normal class");
        for (int i = 0; i < h0.n(); ++i)
            if (h0.k(t, i) != 0) throw DomainError("freeze_frequencies: h0 depends on the angles");
    }
    FrequencyData fd;
    Series wy = h0.d_y();
    fd.omega_y = centre_value(wy);
    const double spread = series_norm(drop_constant(wy), w);
    const double inf_wy = std::abs(fd.omega_y) - spread;
    if (!(inf_wy > 0)) throw DomainError("freeze_frequencies: omega_y may vanish on the chart");
    fd.inv_omega_y_sup = 1 / inf_wy;
    for (int i = 0; i < h0.n(); ++i) {
        Series wi = h0.d_I(i);
        fd.omega_I.push_back(centre_value(wi));
        fd.ratio_I_sup = std::max(fd.ratio_I_sup, series_norm(wi, w) * fd.inv_omega_y_sup);
    }
    for (int i = 0; i < h0.m(); ++i) {
        Series wj = d_J(h0, i);
        fd.omega_J.push_back(centre_value(wj));
        fd.ratio_J_sup = std::max(fd.ratio_J_sup, series_norm(wj, w) * fd.inv_omega_y_sup);
    }
    return fd;
}

namespace {

std::vector<int> slice(const TermKey& t, int from, int count)
{
    return std::vector<int>(t.ints.begin() + from, t.ints.begin() + from + count);
}

Complex lambda_of(const Series& s, const FrequencyData& fd, const TermKey& t)
{
    const int n = s.n(), m = s.m();
    return fd.lambda(slice(t, 0, n), slice(t, n, m), slice(t, n + m, m));
}

}  // namespace

Series homological_solve(const Series& f_tilde, const FrequencyData& freq)
{
    if (freq.omega_y == 0) throw DomainError("homological_solve: omega_y = 0");
    const double X = x_sup(f_tilde.chart());
    Series phi = f_tilde.zero();
    const int xslot = (int)(2 * f_tilde.n() + 2 * f_tilde.m() + 1);
    for (const auto& [t, c] : f_tilde.terms()) {
        if (f_tilde.is_average(t)) throw DomainError("homological_solve: input has an average part");
        const Complex kappa = lambda_of(f_tilde, freq, t) / freq.omega_y;
        const Complex alpha = t.nu + kappa;
        const int b = f_tilde.b(t);
        const Complex scale = c / freq.omega_y;
        TermKey u = t;
        if (std::abs(alpha) * X <= 1) {
            // e^{νx} Σ_n (−α)^n b!/(b+n+1)! x^{b+n+1}
            Complex coef = 1.0 / (b + 1);
            const double first = std::abs(coef) * std::pow(X, b + 1);
            for (int nn = 0; nn < 400; ++nn) {
                u.ints[xslot] = b + nn + 1;
                phi.add(u, scale * coef);
                if (std::abs(coef) * std::pow(X, b + nn + 1) < 1e-18 * first) break;
                coef *= -alpha / double(b + nn + 2);
            }
        } else {
            // e^{νx} P(x) − P(0) e^{−κx}, P(x) = Σ_i (−1)^i b!/(b−i)! x^{b−i} / α^{i+1}
            Complex fall = 1;
            for (int i = 0; i <= b; ++i) {
                u.ints[xslot] = b - i;
                u.nu = t.nu;
                Complex pc = (i % 2 ? -1.0 : 1.0) * fall / ipow(alpha, i + 1);
                phi.add(u, scale * pc);
                if (i == b) {
                    u.ints[xslot] = 0;
                    u.nu = -kappa;
                    phi.add(u, -scale * pc);
                }
                fall *= double(b - i);
            }
        }
    }
    return phi;
}

Series apply_D(const Series& phi, const FrequencyData& freq)
{
    Series out = phi.d_x() * Complex(freq.omega_y, 0);
    for (const auto& [t, c] : phi.terms()) out.add(t, lambda_of(phi, freq, t) * c);
    return out;
}

double Inequality::margin() const
{
    if (lhs <= 0) return std::numeric_limits<double>::infinity();
    return rhs / lhs;
}

NormalFormConstants NormalFormConstants::defaults(int n, int m)
{
    NormalFormConstants c;
    c.c_bar = std::ldexp(1.0, n + 2 * m + 1);
    c.c_tilde = 162 * c.c_bar;
    c.c_nm = 81 * c.c_tilde;
    return c;
}

bool StepCertificate::all_ok() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Inequality& q) { return q.ok; });
}

namespace {

Inequality hyp(const std::string& name, double lhs, double rhs) { return {name, lhs, rhs, lhs < rhs, true}; }
Inequality post(const std::string& name, double lhs, double rhs) { return {name, lhs, rhs, lhs <= rhs, false}; }

void enforce(const std::vector<Inequality>& checks)
{
    for (const auto& q : checks)
        if (q.hypothesis && !q.ok) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "hypothesis %s fails: %.6g >= %.6g", q.name.c_str(), q.lhs, q.rhs);
            throw HypothesisError(q.name, buf);
        }
}

}  // namespace

StepResult iterative_step(const Series& h0, const Series& g, const Series& f, const StepWidths& w,
                          const NormalFormConstants& cst)
{
    const ChartBox in = f.chart();
    const FrequencyData fd = freeze_frequencies(h0, in);
    const double X = x_sup(in);
    StepCertificate cert;
    cert.constants = cst;
    cert.widths_in = in;

    auto& ch = cert.checks;
    ch.push_back(hyp("2r'<r", 2 * w.r, in.r));
    ch.push_back(hyp("2rho'<rho", 2 * w.rho, in.rho));
    ch.push_back(hyp("2xi'<xi", 2 * w.xi, in.xi));
    const double xI = X * fd.ratio_I_sup, xJ = X * fd.ratio_J_sup;
    ChartBox mid = in, out = in;
    if (w.stronger) {
        ch.push_back(hyp("3s'<s", 3 * w.s, in.s));
        ch.push_back(hyp("3delta'<delta", 3 * w.delta, in.delta));
        ch.push_back(hyp("X|wI/wy|<s'", xI, w.s));
        ch.push_back(hyp("X|wJ/wy|<delta'/delta", xJ, w.delta / in.delta));
        mid.s = in.s - w.s;
        mid.delta = in.delta - w.delta;
        out.s = in.s - 3 * w.s;
        out.delta = in.delta - 3 * w.delta;
    } else {
        ch.push_back(hyp("2s'<s", 2 * w.s, in.s));
        ch.push_back(hyp("2delta'<delta", 2 * w.delta, in.delta));
        ch.push_back(hyp("X|wI/wy|<s-2s'", xI, in.s - 2 * w.s));
        ch.push_back(hyp("X|wJ/wy|<log(delta/2delta')", xJ, std::log(in.delta / (2 * w.delta))));
        mid.s = in.s - xI;
        mid.delta = in.delta * std::exp(-xJ);
        out.s = in.s - 2 * w.s - xI;
        out.delta = in.delta * std::exp(-xJ) - 2 * w.delta;
    }
    out.r = in.r - 2 * w.r;
    out.rho = in.rho - 2 * w.rho;
    out.xi = in.xi - 2 * w.xi;
    const double d = std::min({w.rho * w.s, w.r * w.xi, w.delta * w.delta});

    auto split = average_and_offaverage(f);
    cert.norm_f = series_norm(f);
    cert.norm_f_tilde = series_norm(split.off_average);
    const double ft_wy = cert.norm_f_tilde * fd.inv_omega_y_sup;
    ch.push_back(hyp("smallness", cst.c_tilde * X / d * ft_wy, 1));
    enforce(ch);

    Series phi = homological_solve(split.off_average, fd);
    cert.homological_residual = series_norm(apply_D(phi, fd) - split.off_average);
    Series phi_mid = phi.with_chart(mid);
    cert.norm_phi = series_norm(phi_mid);

    LieOptions lo;
    lo.d = d;
    lo.c_bar = cst.c_bar;
    const Series H = h0 + g + f;
    Series frozen = split.off_average + poisson_bracket(phi, h0);
    cert.frozen_residual = series_norm(frozen);
    Series f_plus = (split.off_average + lie_queue(phi_mid, H.with_chart(mid), 1, lo)).with_chart(out);
    Series g_plus = (g + split.average).with_chart(out);

    cert.widths_out = out;
    cert.norm_f_plus = series_norm(f_plus);
    cert.norm_f_tilde_plus = series_norm(average_and_offaverage(f_plus).off_average);
    cert.discarded = f_plus.discarded();
    const double bracket_g = series_norm(poisson_bracket(phi_mid, g.with_chart(mid)), out);
    // the printed bound assumes an exact homological solve; freezing adds ‖f̃ + {φ, h0}‖
    ch.push_back(post("bound", cert.norm_f_plus,
                      cst.c_tilde * X / d * ft_wy * cert.norm_f + bracket_g + series_norm(frozen, out)));
    ch.push_back(post("bound on phi", cert.norm_phi, X / d * ft_wy));
    ch.push_back(post("halving (off-average)", cert.norm_f_tilde_plus, cert.norm_f_tilde / 2));
    return {g_plus, f_plus, phi, cert};
}

NormalFormResult normal_form_N(const Series& h0, const Series& f, int N, const NormalFormConstants& cst)
{
    if (N < 1) throw DomainError("normal_form_N: N must be positive");
    const ChartBox c0 = f.chart();
    const FrequencyData fd = freeze_frequencies(h0, c0);
    const double X = x_sup(c0);
    const double dd = std::min({c0.rho * c0.s, c0.r * c0.xi, c0.delta * c0.delta});
    NormalFormResult res{f.zero(), f, {}, {}, 0, {}};
    res.assumptions.push_back(hyp("4NX|wI/wy|<s", 4 * N * X * fd.ratio_I_sup, c0.s));
    res.assumptions.push_back(hyp("4NX|wJ/wy|<1", 4 * N * X * fd.ratio_J_sup, 1));
    res.assumptions.push_back(
        hyp("c_nm N X/d |1/wy| |f0|<1", cst.c_nm * N * X / dd * fd.inv_omega_y_sup * series_norm(f), 1));
    enforce(res.assumptions);

    Series g = f.zero(), fj = f, h = h0;
    for (int step = 1; step <= N; ++step) {
        StepWidths w;
        w.stronger = true;
        if (step == 1) {
            w = {c0.r / 6, c0.rho / 6, c0.xi / 6, c0.s / 9, c0.delta / 9, true};
        } else {
            w = {c0.r / (6 * N), c0.rho / (6 * N), c0.xi / (6 * N), c0.s / (9 * N), c0.delta / (9 * N), true};
        }
        try {
            StepResult sr = iterative_step(h, g, fj, w, cst);
            if (!res.steps.empty())
                sr.cert.checks.push_back(post("halving", sr.cert.norm_f_plus, res.steps.back().norm_f_plus / 2));
            res.steps.push_back(sr.cert);
            g = sr.g_plus;
            fj = sr.f_plus;
            h = h.with_chart(fj.chart());
            res.g = g;
            res.f = fj;
            res.certified_steps = step;
        } catch (const HypothesisError& e) {
            res.failure = "step " + std::to_string(step) + ": " + e.inequality;
            break;
        }
    }
    return res;
}

DeskCase desk_case(double omega, double omega0, double eps, const ChartBox& chart, Truncation tr)
{
    DeskCase dc{Series(1, 0, chart, tr), Series(1, 0, chart, tr)};
    const double I0 = chart.I0, y0 = chart.y0;
    dc.h0.add_term(omega * I0 + omega0 * y0 * y0 / 2, {0});
    dc.h0.add_term(omega, {0}, {}, {}, {1, 0});
    dc.h0.add_term(omega0 * y0, {0}, {}, {}, {0, 1});
    dc.h0.add_term(omega0 / 2, {0}, {}, {}, {0, 2});
    dc.f.add_term(eps / 2, {1}, {}, {}, {}, 1);
    dc.f.add_term(eps / 2, {-1}, {}, {}, {}, 1);
    return dc;
}

void write_series(std::ostream& os, const Series& f)
{
    const ChartBox& c = f.chart();
    const Truncation& t = f.truncation();
    char buf[512];
    os << "# series " << f.n() << ' ' << f.m() << '\n';
    std::snprintf(buf, sizeof buf, "# chart %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", c.I0, c.y0,
                  c.half_I, c.half_y, c.half_x, c.r, c.rho, c.xi, c.s, c.delta);
    os << buf;
    std::snprintf(buf, sizeof buf, "# truncation %d %d %d %d %.17g\n", t.k_max, t.deg_poly, t.deg_x, t.deg_pq,
                  t.prune);
    os << buf;
    const int n = f.n(), m = f.m();
    for (const auto& [key, v] : f.terms()) {
        std::ostringstream line;
        auto put = [&](int from, int count) {
            for (int i = from; i < from + count; ++i) line << key.ints[i] << ' ';
            line << "| ";
        };
        put(0, n);
        put(n, m);
        put(n + m, m);
        put(n + 2 * m, n + 2);
        std::snprintf(buf, sizeof buf, "%.17g %.17g | %.17g %.17g", key.nu.real(), key.nu.imag(), v.real(),
                      v.imag());
        line << buf;
        os << line.str() << '\n';
    }
}

Series read_series(std::istream& is)
{
    std::string line;
    int n = -1, m = -1;
    ChartBox c;
    Truncation t;
    auto bad = [](const std::string& what) { return DomainError("read_series: " + what); };
    std::vector<std::string> body;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tag;
            ss >> tag;
            if (tag == "series") ss >> n >> m;
            else if (tag == "chart") ss >> c.I0 >> c.y0 >> c.half_I >> c.half_y >> c.half_x >> c.r >> c.rho >> c.xi >> c.s >> c.delta;
            else if (tag == "truncation") ss >> t.k_max >> t.deg_poly >> t.deg_x >> t.deg_pq >> t.prune;
            if (ss.fail()) throw bad("malformed header '" + line + "'");
            continue;
        }
        body.push_back(line);
    }
    if (n < 0 || m < 0) throw bad("missing '# series' header");
    Series f(n, m, c, t);
    for (const auto& l : body) {
        std::istringstream ss(l);
        TermKey key;
        const int counts[] = {n, m, m, n + 2};
        for (int g : counts) {
            for (int i = 0; i < g; ++i) {
                int v;
                if (!(ss >> v)) throw bad("malformed term '" + l + "'");
                key.ints.push_back(v);
            }
            std::string bar;
            if (!(ss >> bar) || bar != "|") throw bad("expected '|' in '" + l + "'");
        }
        double nr, ni, cr, ci;
        std::string bar;
        if (!(ss >> nr >> ni >> bar >> cr >> ci) || bar != "|") throw bad("malformed term '" + l + "'");
        key.nu = {nr, ni};
        f.add(key, {cr, ci});
    }
    return f;
}

namespace {

std::vector<double> flatten(const PhasePoint& z)
{
    std::vector<double> v = z.I;
    v.insert(v.end(), z.phi.begin(), z.phi.end());
    v.push_back(z.y);
    v.push_back(z.x);
    v.insert(v.end(), z.q.begin(), z.q.end());
    v.insert(v.end(), z.p.begin(), z.p.end());
    return v;
}

PhasePoint unflatten(const std::vector<double>& v, int n, int m)
{
    PhasePoint z;
    z.I.assign(v.begin(), v.begin() + n);
    z.phi.assign(v.begin() + n, v.begin() + 2 * n);
    z.y = v[2 * n];
    z.x = v[2 * n + 1];
    z.q.assign(v.begin() + 2 * n + 2, v.begin() + 2 * n + 2 + m);
    z.p.assign(v.begin() + 2 * n + 2 + m, v.end());
    return z;
}

/// c + Σ_{j≥1} L^{j−1}(L c)/j! at z, given the series L c.
double coordinate_shift(const Series& phi, Series Lc, const PhasePoint& z)
{
    double sum = 0;
    for (int j = 1; j <= 60; ++j) {
        const double v = Lc.evaluate(z.I, z.phi, z.y, z.x, z.q, z.p).real();
        sum += v;
        if (Lc.empty() || series_norm(Lc) < 1e-18) break;
        Lc = poisson_bracket(phi, Lc) * Complex(1.0 / (j + 1), 0);
    }
    return sum;
}

}  // namespace

PhasePoint lie_transform(const Series& phi, const PhasePoint& z)
{
    const int n = phi.n(), m = phi.m();
    PhasePoint w = z;
    for (int i = 0; i < n; ++i) {
        w.I[i] += coordinate_shift(phi, phi.d_phi(i) * Complex(-1, 0), z);
        w.phi[i] += coordinate_shift(phi, phi.d_I(i), z);
    }
    w.y += coordinate_shift(phi, phi.d_x() * Complex(-1, 0), z);
    w.x += coordinate_shift(phi, phi.d_y(), z);
    for (int i = 0; i < m; ++i) {
        w.q[i] += coordinate_shift(phi, phi.d_p(i) * Complex(-1, 0), z);
        w.p[i] += coordinate_shift(phi, phi.d_q(i), z);
    }
    return w;
}

PhasePoint lie_transform_inverse(const Series& phi, const PhasePoint& z, double tol)
{
    const int n = phi.n(), m = phi.m();
    const std::vector<double> target = flatten(z);
    const std::size_t dim = target.size();
    std::vector<double> w = flatten(lie_transform(phi * Complex(-1, 0), z));
    for (int it = 0; it < 50; ++it) {
        std::vector<double> F = flatten(lie_transform(phi, unflatten(w, n, m)));
        double err = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            F[i] -= target[i];
            err = std::max(err, std::abs(F[i]));
        }
        if (err < tol) return unflatten(w, n, m);
        // forward-difference Jacobian, Gaussian elimination with partial pivoting
        std::vector<std::vector<double>> A(dim, std::vector<double>(dim + 1));
        for (std::size_t c = 0; c < dim; ++c) {
            const double hstep = 1e-7 * std::max(1.0, std::abs(w[c]));
            std::vector<double> wp = w;
            wp[c] += hstep;
            std::vector<double> Fp = flatten(lie_transform(phi, unflatten(wp, n, m)));
            for (std::size_t r = 0; r < dim; ++r) A[r][c] = (Fp[r] - target[r] - F[r]) / hstep;
        }
        for (std::size_t r = 0; r < dim; ++r) A[r][dim] = -F[r];
        for (std::size_t c = 0; c < dim; ++c) {
            std::size_t piv = c;
            for (std::size_t r = c + 1; r < dim; ++r)
                if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
            std::swap(A[c], A[piv]);
            if (A[c][c] == 0) throw ConvergenceError("lie_transform_inverse: singular Jacobian");
            for (std::size_t r = c + 1; r < dim; ++r) {
                const double fct = A[r][c] / A[c][c];
                for (std::size_t k = c; k <= dim; ++k) A[r][k] -= fct * A[c][k];
            }
        }
        std::vector<double> dx(dim);
        for (std::size_t r = dim; r-- > 0;) {
            double s = A[r][dim];
            for (std::size_t k = r + 1; k < dim; ++k) s -= A[r][k] * dx[k];
            dx[r] = s / A[r][r];
        }
        for (std::size_t i = 0; i < dim; ++i) w[i] += dx[i];
    }
    throw ConvergenceError("lie_transform_inverse: Newton did not converge");
}

}  // namespace e3b
