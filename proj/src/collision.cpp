#include "euler3b/collision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "euler3b/integrals.hpp"
#include "euler3b/kepler.hpp"

namespace e3b {

FocalRadius focal_radius(double Lambda, double G, double g_peri, const MassModel& ms)
{
    if (!(G > 0 && G <= Lambda)) throw DomainError("focal_radius: need 0 < G <= Lambda");
    const double k = ms.mr() * ms.mr() * ms.Mr();
    FocalRadius f;
    f.e = std::sqrt(std::max(0.0, 1 - (G / Lambda) * (G / Lambda)));
    f.p = G * G / k;
    const double den = 1 - f.e * std::cos(g_peri);
    if (!(den > 0)) throw DomainError("focal_radius: no intersection with the ellipse");
    f.r_prime = f.p / den;
    return f;
}

namespace {

double focal_residual(const CartesianState& s, const MassModel& ms)
{
    OrbitalElements el;
    try {
        el = elements_from_cartesian(s.y, s.x, ms);
    } catch (const DomainError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double rp = norm(s.x_prime);
    const double p = el.a * (1 - el.e * el.e);
    const double c = rp > 0 ? dot(el.P, s.x_prime) / rp : 1;
    return rp - p / (1 + el.e * c);
}

}  // namespace

CollisionVerdict exclusion_verdict(const CartesianState& s, const MassModel& ms, double safety)
{
    if (!(safety >= 1)) throw DomainError("exclusion_verdict: safety must be >= 1");
    CollisionVerdict v;
    const double k = ms.mr() * ms.mr() * ms.Mr();
    v.E = euler_integral_cartesian(s.y, s.x, s.x_prime, ms);
    v.r_prime = norm(s.x_prime);
    v.margin = std::abs(v.E - k * v.r_prime);
    v.threshold = ms.mu() * k * v.r_prime;
    v.excluded = v.margin > safety * v.threshold;
    v.focal_residual = focal_residual(s, ms);
    return v;
}

CollisionVerdict exclusion_verdict(const PlanarKCoordinates& k, const MassModel& ms, double safety)
{
    return exclusion_verdict(planar_k_to_cartesian(k, ms), ms, safety);
}

ExclusionSweep sweep_exclusion(const Trajectory& traj, const MassModel& ms, double safety)
{
    if (traj.samples.empty()) throw DomainError("sweep_exclusion: empty trajectory");
    ExclusionSweep sw;
    sw.min_abs_focal_residual = std::numeric_limits<double>::infinity();
    sw.min_separation = std::numeric_limits<double>::infinity();
    for (const TrajectorySample& ts : traj.samples) {
        SweepSample s;
        s.t = ts.t;
        s.verdict = exclusion_verdict(ts.state, ms, safety);
        s.min_separation = ts.min_separation;
        try {
            OrbitalElements el = elements_from_cartesian(ts.state.y, ts.state.x, ms);
            const double rp = s.verdict.r_prime;
            s.geometric_floor = std::max({0.0, el.a * (1 - el.e) - rp, rp - el.a * (1 + el.e)});
        } catch (const DomainError&) {
            s.geometric_floor = 0;
        }
        if (!s.verdict.excluded) sw.entered_band = true;
        if (std::isfinite(s.verdict.focal_residual))
            sw.min_abs_focal_residual = std::min(sw.min_abs_focal_residual, std::abs(s.verdict.focal_residual));
        sw.min_separation = std::min(sw.min_separation, s.min_separation);
        sw.samples.push_back(s);
    }
    const CollisionVerdict& v0 = sw.samples.front().verdict;
    for (const SweepSample& s : sw.samples) {
        const double scale = v0.threshold > 0 ? v0.threshold : 1;
        const double decay = v0.margin - s.verdict.margin;
        sw.max_margin_decay = std::max(sw.max_margin_decay, decay / scale);
        sw.max_margin_change = std::max(sw.max_margin_change, std::abs(decay) / scale);
    }
    return sw;
}

void write_verdict_csv(std::ostream& os, const ExclusionSweep& sw)
{
    os << "t,E,margin,threshold,excluded,min_separation\n";
    char buf[256];
    for (const SweepSample& s : sw.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d,%.17g\n", s.t, s.verdict.E, s.verdict.margin,
                      s.verdict.threshold, s.verdict.excluded ? 1 : 0, s.min_separation);
        os << buf;
    }
}

}  // namespace e3b
