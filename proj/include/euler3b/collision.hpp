#pragma once

#include <iosfwd>
#include <vector>

#include "euler3b/core_model.hpp"
#include "euler3b/coordinate_maps.hpp"
#include "euler3b/dynamics.hpp"

namespace e3b {

struct FocalRadius {
    /// r′ = G²/(𝗆²ℳ(1 − e cos ḡ))
    double r_prime = 0;
    /// p = G²/(𝗆²ℳ)
    double p = 0;
    double e = 0;
};

/// Throws DomainError when G ∉ (0, Λ] or the ellipse never reaches the direction π − ḡ.
FocalRadius focal_radius(double Lambda, double G, double g_peri, const MassModel& ms);

struct CollisionVerdict {
    double E = 0, r_prime = 0;
    /// |E − 𝗆²ℳr′|
    double margin = 0;
    /// μ𝗆²ℳr′
    double threshold = 0;
    bool excluded = false;
    /// r′ minus the radius of the instantaneous ellipse along x′; NaN off the elliptic domain
    double focal_residual = 0;
};

/// excluded = margin > safety · threshold. Throws DomainError for safety < 1.
CollisionVerdict exclusion_verdict(const CartesianState& s, const MassModel& ms, double safety = 2);
CollisionVerdict exclusion_verdict(const PlanarKCoordinates& k, const MassModel& ms, double safety = 2);

struct SweepSample {
    double t = 0;
    CollisionVerdict verdict;
    double min_separation = 0;
    /// max(0, a(1−e) − r′, r′ − a(1+e)) from the instantaneous ellipse
    double geometric_floor = 0;
};

struct ExclusionSweep {
    std::vector<SweepSample> samples;
    /// some sample had margin ≤ safety · threshold
    bool entered_band = false;
    double min_abs_focal_residual = 0;
    double min_separation = 0;
    /// max over samples of margin(0) − margin(t), over threshold(0)
    double max_margin_decay = 0;
    /// max over samples of |margin(t) − margin(0)|, over threshold(0)
    double max_margin_change = 0;
};

/// Throws DomainError on an empty trajectory.
ExclusionSweep sweep_exclusion(const Trajectory& traj, const MassModel& ms, double safety = 2);

/// Columns t,E,margin,threshold,excluded,min_separation.
void write_verdict_csv(std::ostream& os, const ExclusionSweep& sw);

}  // namespace e3b
