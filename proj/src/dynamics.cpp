#include "euler3b/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

namespace e3b {

Phase to_phase(const CartesianState& s)
{
    Phase z{};
    for (int i = 0; i < 3; ++i) {
        z[i] = s.y_prime[i];
        z[3 + i] = s.y[i];
        z[6 + i] = s.x_prime[i];
        z[9 + i] = s.x[i];
    }
    return z;
}

CartesianState from_phase(const Phase& z, int dim)
{
    CartesianState s;
    s.dim = dim;
    for (int i = 0; i < 3; ++i) {
        s.y_prime[i] = z[i];
        s.y[i] = z[3 + i];
        s.x_prime[i] = z[6 + i];
        s.x[i] = z[9 + i];
    }
    return s;
}

namespace {

Vec3 block(const Phase& z, int k) { return {z[3 * k], z[3 * k + 1], z[3 * k + 2]}; }
void put(Phase& z, int k, const Vec3& v)
{
    z[3 * k] = v[0];
    z[3 * k + 1] = v[1];
    z[3 * k + 2] = v[2];
}

double cube(double r) { return r * r * r; }

}  // namespace

Phase two_centre_rhs(const Phase& z, const MassModel& ms)
{
    const double mm = ms.mr(), MM = ms.Mr(), mu = ms.mu();
    Vec3 y = block(z, 1), xp = block(z, 2), x = block(z, 3);
    Vec3 d = x - xp;
    Phase out{};
    put(out, 3, y / mm);
    put(out, 1, -(mm * MM / cube(norm(x))) * x - (mu * mm * MM / cube(norm(d))) * d);
    return out;
}

Phase three_body_rhs(const Phase& z, const MassModel& ms, bool drop_eps2)
{
    const double mm = ms.mr(), MM = ms.Mr(), mmp = ms.mr_prime(), MMp = ms.Mr_prime();
    const double mu = ms.mu(), eps = ms.eps(), e2 = drop_eps2 ? 0.0 : eps * eps, c = mu / ms.m0();
    Vec3 yp = block(z, 0), y = block(z, 1), xp = block(z, 2), x = block(z, 3);
    Vec3 d = x - xp;
    double d3 = cube(norm(d));
    Phase out{};
    put(out, 2, e2 * (yp / mmp + c * y));
    put(out, 3, eps * y / mm + e2 * c * yp);
    put(out, 0, -(mmp * MMp / cube(norm(xp))) * xp + (eps * mu * mm * MM / d3) * d);
    put(out, 1, -eps * ((mm * MM / cube(norm(x))) * x + (mu * mm * MM / d3) * d));
    return out;
}

namespace {

// DOP853 tableau (Hairer, Nørsett & Wanner)
constexpr double c2 = 0.526001519587677318785587544488e-01, c3 = 0.789002279381515978178381316732e-01,
                 c4 = 0.118350341907227396726757197510e+00, c5 = 0.281649658092772603273242802490e+00,
                 c6 = 0.333333333333333333333333333333e+00, c7 = 0.25e+00, c8 = 0.307692307692307692307692307692e+00,
                 c9 = 0.651282051282051282051282051282e+00, c10 = 0.6e+00, c11 = 0.857142857142857142857142857142e+00;
constexpr double a21 = 5.26001519587677318785587544488e-2, a31 = 1.97250569845378994544595329183e-2,
                 a32 = 5.91751709536136983633785987549e-2, a41 = 2.95875854768068491816892993775e-2,
                 a43 = 8.87627564304205475450678981324e-2, a51 = 2.41365134159266685502369798665e-1,
                 a53 = -8.84549479328286085344864962717e-1, a54 = 9.24834003261792003115737966543e-1,
                 a61 = 3.7037037037037037037037037037e-2, a64 = 1.70828608729473871279604482173e-1,
                 a65 = 1.25467687566822425016691814123e-1, a71 = 3.7109375e-2,
                 a74 = 1.70252211019544039314978060272e-1, a75 = 6.02165389804559606850219397283e-2,
                 a76 = -1.7578125e-2, a81 = 3.70920001185047927108779319836e-2,
                 a84 = 1.70383925712239993810214054705e-1, a85 = 1.07262030446373284651809199168e-1,
                 a86 = -1.53194377486244017527936158236e-2, a87 = 8.27378916381402288758473766002e-3,
                 a91 = 6.24110958716075717114429577812e-1, a94 = -3.36089262944694129406857109825e0,
                 a95 = -8.68219346841726006818189891453e-1, a96 = 2.75920996994467083049415600797e1,
                 a97 = 2.01540675504778934086186788979e1, a98 = -4.34898841810699588477366255144e1,
                 a101 = 4.77662536438264365890433908527e-1, a104 = -2.48811461997166764192642586468e0,
                 a105 = -5.90290826836842996371446475743e-1, a106 = 2.12300514481811942347288949897e1,
                 a107 = 1.52792336328824235832596922938e1, a108 = -3.32882109689848629194453265587e1,
                 a109 = -2.03312017085086261358222928593e-2, a111 = -9.3714243008598732571704021658e-1,
                 a114 = 5.18637242884406370830023853209e0, a115 = 1.09143734899672957818500254654e0,
                 a116 = -8.14978701074692612513997267357e0, a117 = -1.85200656599969598641566180701e1,
                 a118 = 2.27394870993505042818970056734e1, a119 = 2.49360555267965238987089396762e0,
                 a1110 = -3.0467644718982195003823669022e0, a121 = 2.27331014751653820792359768449e0,
                 a124 = -1.05344954667372501984066689879e1, a125 = -2.00087205822486249909675718444e0,
                 a126 = -1.79589318631187989172765950534e1, a127 = 2.79488845294199600508499808837e1,
                 a128 = -2.85899827713502369474065508674e0, a129 = -8.87285693353062954433549289258e0,
                 a1210 = 1.23605671757943030647266201528e1, a1211 = 6.43392746015763530355970484046e-1;
constexpr double b1 = 5.42937341165687622380535766363e-2, b6 = 4.45031289275240888144113950566e0,
                 b7 = 1.89151789931450038304281599044e0, b8 = -5.8012039600105847814672114227e0,
                 b9 = 3.1116436695781989440891606237e-1, b10 = -1.52160949662516078556178806805e-1,
                 b11 = 2.01365400804030348374776537501e-1, b12 = 4.47106157277725905176885569043e-2;
constexpr double bhh1 = 0.244094488188976377952755905512e+00, bhh2 = 0.733846688281611857341361741547e+00,
                 bhh3 = 0.220588235294117647058823529412e-01;
constexpr double er1 = 0.1312004499419488073250102996e-01, er6 = -0.1225156446376204440720569753e+01,
                 er7 = -0.4957589496572501915214079952e+00, er8 = 0.1664377182454986536961530415e+01,
                 er9 = -0.3503288487499736816886487290e+00, er10 = 0.3341791187130174790297318841e+00,
                 er11 = 0.8192320648511571246570742613e-01, er12 = -0.2235530786388629525884427845e-01;

constexpr std::size_t N = 12;

}  // namespace

Dop853Stats dop853(const std::function<Phase(const Phase&)>& f, Phase& z, double t0, double t1, double tol,
                   double h0, const std::function<bool(double, const Phase&)>& observer, long max_steps)
{
    if (!(tol > 0)) throw DomainError("dop853: tolerance must be positive");
    Dop853Stats st;
    if (t1 == t0) return st;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double safe = 0.9, fac1 = 0.333, fac2 = 6.0, beta = 0.0, expo1 = 1.0 / 8.0 - beta * 0.2;
    double facold = 1e-4;
    Phase k1 = f(z), k2, k3, k4, k5, k6, k7, k8, k9, k10, yt, y1;
    double h = h0;
    if (h <= 0) {
        double dnf = 0, dny = 0;
        for (std::size_t i = 0; i < N; ++i) {
            double sk = tol + tol * std::abs(z[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (z[i] / sk) * (z[i] / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, std::abs(t1 - t0));
    }
    h = dir * std::abs(h);
    double t = t0;
    bool last = false, reject = false;
    const double hmax = std::abs(t1 - t0);
    while (!last) {
        if (st.steps + st.rejected >= max_steps) throw ConvergenceError("dop853: step budget exhausted");
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) throw ConvergenceError("dop853: step size underflow");
        if ((t + 1.01 * h - t1) * dir >= 0) {
            h = t1 - t;
            last = true;
        }
        for (std::size_t i = 0; i < N; ++i) yt[i] = z[i] + h * a21 * k1[i];
        k2 = f(yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = z[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = z[i] + h * (a41 * k1[i] + a43 * k3[i]);
        k4 = f(yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = z[i] + h * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = z[i] + h * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = f(yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = z[i] + h * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = f(yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = z[i] + h * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
        k8 = f(yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = z[i] + h * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] + a98 * k8[i]);
        k9 = f(yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = z[i] + h * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] +
                                a108 * k8[i] + a109 * k9[i]);
        k10 = f(yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = z[i] + h * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] +
                                a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
        k2 = f(yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = z[i] + h * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] +
                                a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] + a1211 * k2[i]);
        k3 = f(yt);
        double err = 0, err2 = 0;
        for (std::size_t i = 0; i < N; ++i) {
            k4[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] + b11 * k2[i] +
                    b12 * k3[i];
            y1[i] = z[i] + h * k4[i];
            double sk = tol + tol * std::max(std::abs(z[i]), std::abs(y1[i]));
            double e2 = k4[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k3[i];
            err2 += (e2 / sk) * (e2 / sk);
            double e1 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] + er10 * k10[i] +
                        er11 * k2[i] + er12 * k3[i];
            err += (e1 / sk) * (e1 / sk);
        }
        double deno = err + 0.01 * err2;
        if (deno <= 0) deno = 1;
        err = std::abs(h) * err * std::sqrt(1.0 / (N * deno));
        double fac11 = std::pow(err, expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac / safe));
        double hnew = h / fac;
        if (err <= 1.0) {
            facold = std::max(err, 1e-4);
            ++st.steps;
            Phase kn = f(y1);
            z = y1;
            k1 = kn;
            t += h;
            if (observer && !observer(t, z)) return st;
            if (std::abs(hnew) > hmax) hnew = dir * hmax;
            if (reject) hnew = dir * std::min(std::abs(hnew), std::abs(h));
            reject = false;
            h = hnew;
        } else {
            hnew = h / std::min(1.0 / fac1, fac11 / safe);
            reject = true;
            last = false;
            ++st.rejected;
            h = hnew;
        }
    }
    return st;
}

namespace {

using Rhs = std::function<Phase(const Phase&)>;

/// Kinetic / potential split for the separable Hamiltonians: positions advance with the momentum-only
/// part of the field, momenta with the position-only part.
void yoshida4(const Rhs& f, Phase& z, double h)
{
    static const double w1 = 1.0 / (2.0 - std::cbrt(2.0)), w0 = -std::cbrt(2.0) * w1;
    const double cs[4] = {w1 / 2, (w0 + w1) / 2, (w0 + w1) / 2, w1 / 2};
    const double ds[3] = {w1, w0, w1};
    auto drift = [&](double c) {
        Phase d = f(z);
        for (int i = 6; i < 12; ++i) z[i] += c * h * d[i];
    };
    auto kick = [&](double c) {
        Phase d = f(z);
        for (int i = 0; i < 6; ++i) z[i] += c * h * d[i];
    };
    for (int s = 0; s < 3; ++s) {
        drift(cs[s]);
        kick(ds[s]);
    }
    drift(cs[3]);
}

Trajectory run_flow(const Rhs& f, const CartesianState& s0, const MassModel& ms, const IntegratorConfig& cfg)
{
    validate_state(s0);
    if (!(cfg.sample_dt > 0) || !(cfg.t_end >= 0)) throw DomainError("IntegratorConfig: need sample_dt > 0 and t_end >= 0");
    if (cfg.method == Method::Splitting && !(cfg.step > 0)) throw DomainError("IntegratorConfig: splitting needs step > 0");
    const double floor = cfg.floor_factor * norm(s0.x_prime);
    Trajectory traj;
    Phase z = to_phase(s0);
    double min_sep = norm(s0.x - s0.x_prime);
    auto emit = [&](double t) {
        TrajectorySample smp;
        smp.t = t;
        smp.state = from_phase(z, s0.dim);
        smp.integrals = evaluate_integrals(smp.state, ms);
        smp.min_separation = min_sep;
        traj.samples.push_back(smp);
        min_sep = std::numeric_limits<double>::infinity();
    };
    auto check = [&](const Phase& w) {
        CartesianState s = from_phase(w, s0.dim);
        double d = norm(s.x - s.x_prime);
        min_sep = std::min(min_sep, d);
        if (d < floor || norm(s.x) < floor || norm(s.x_prime) < floor) {
            traj.truncated = true;
            traj.truncation_reason = d < floor ? "x-x_prime" : norm(s.x) < floor ? "x" : "x_prime";
            return false;
        }
        return true;
    };
    emit(0);
    long nsamp = static_cast<long>(std::floor(cfg.t_end / cfg.sample_dt + 1e-9));
    double t = 0, h_hint = cfg.step;
    for (long k = 1; k <= nsamp + 1 && !traj.truncated; ++k) {
        double tk = std::min(k * cfg.sample_dt, cfg.t_end);
        if (tk - t <= 1e-12 * std::max(1.0, std::abs(tk))) break;
        if (cfg.method == Method::RK87) {
            try {
                Dop853Stats st = dop853(f, z, t, tk, cfg.tol, h_hint,
                                        [&](double, const Phase& w) { return check(w); }, cfg.max_steps - traj.steps);
                traj.steps += st.steps;
                traj.rejected += st.rejected;
            } catch (const ConvergenceError& e) {
                traj.truncated = true;
                traj.truncation_reason = e.what();
            }
        } else {
            long n = std::max(1L, static_cast<long>(std::ceil((tk - t) / cfg.step - 1e-9)));
            double h = (tk - t) / n;
            for (long i = 0; i < n; ++i) {
                yoshida4(f, z, h);
                ++traj.steps;
                if (!check(z)) break;
            }
        }
        t = tk;
        if (traj.truncated) break;
        emit(t);
    }
    return traj;
}

}  // namespace

Trajectory flow_two_centre(const CartesianState& s0, const MassModel& ms, const IntegratorConfig& cfg)
{
    return run_flow([&](const Phase& z) { return two_centre_rhs(z, ms); }, s0, ms, cfg);
}

Trajectory flow_three_body(const CartesianState& s0, const MassModel& ms, const IntegratorConfig& cfg, bool drop_eps2)
{
    return run_flow([&, drop_eps2](const Phase& z) { return three_body_rhs(z, ms, drop_eps2); }, s0, ms, cfg);
}

DriftReport euler_drift_report(const Trajectory& traj, const MassModel& ms)
{
    if (traj.samples.empty()) throw DomainError("euler_drift_report: empty trajectory");
    DriftReport r;
    const auto& s0 = traj.samples.front();
    const double E0 = s0.integrals.E, H0 = s0.integrals.H, J0 = s0.integrals.J;
    const double scale = ms.mr() * ms.mr() * ms.Mr() * norm(s0.state.x_prime);
    for (const auto& s : traj.samples) {
        double d = std::abs(s.integrals.E - E0);
        r.drift_at.emplace_back(s.t, d);
        r.max_drift = std::max(r.max_drift, d);
        r.max_H_rel_drift = std::max(r.max_H_rel_drift, std::abs(s.integrals.H - H0) / std::abs(H0));
        r.max_J_rel_drift = std::max(r.max_J_rel_drift, std::abs(s.integrals.J - J0) / std::abs(J0));
    }
    r.max_drift_normalized = r.max_drift / scale;
    return r;
}

std::string trajectory_csv_header()
{
    return "t,yp1,yp2,yp3,y1,y2,y3,xp1,xp2,xp3,x1,x2,x3,J0,J,E,H,min_separation";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    os << trajectory_csv_header() << '\n';
    char buf[64];
    auto put_num = [&](double v, bool last) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << (last ? '\n' : ',');
    };
    for (const auto& s : traj.samples) {
        put_num(s.t, false);
        for (const Vec3* v : {&s.state.y_prime, &s.state.y, &s.state.x_prime, &s.state.x})
            for (double c : *v) put_num(c, false);
        put_num(s.integrals.J0, false);
        put_num(s.integrals.J, false);
        put_num(s.integrals.E, false);
        put_num(s.integrals.H, false);
        put_num(s.min_separation, true);
    }
}

CartesianState planar_ellipse_state(double a, double e, double g, const Vec3& x_prime, const MassModel& ms)
{
    if (!(a > 0) || !(e >= 0 && e < 1)) throw DomainError("planar_ellipse_state: need a > 0 and 0 <= e < 1");
    const double th = std::numbers::pi - g;
    Vec3 P{std::cos(th), std::sin(th), 0}, Q{-std::sin(th), std::cos(th), 0};
    CartesianState s;
    s.x_prime = x_prime;
    s.x = a * (1 - e) * P;
    s.y = ms.mr() * std::sqrt(ms.Mr() / a * (1 + e) / (1 - e)) * Q;
    s.y_prime = {0, 0, 0};
    s.dim = 2;
    validate_state(s);
    return s;
}

double inner_period(double a, const MassModel& ms) { return 2 * std::numbers::pi * std::sqrt(a * a * a / ms.Mr()); }

double outer_period(double r_prime, const MassModel& ms)
{
    return 2 * std::numbers::pi * std::sqrt(r_prime * r_prime * r_prime / ms.Mr_prime());
}

}  // namespace e3b
