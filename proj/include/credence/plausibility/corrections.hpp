#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "credence/core/types.hpp"
#include "credence/plausibility/factors.hpp"

namespace credence {

/// Additive mass correction produced by a collaborative model-based check.
/// The components sum to zero, so corrections conserve total mass.
struct MassDelta {
    double d_exists = 0.0;
    double d_not_exists = 0.0;
    double d_unknown = 0.0;
};

/// Observation-history check: an increase of existence belief across two
/// subsequent steps is implausible while the system object is coasting; the
/// increment is transferred to the ignorance hypothesis.
inline MassDelta history_correction(const BeliefMass& now, double prev_m_exists,
                                    bool coasting) {
    if (!coasting) return {};
    const double rise = now.m_exists - prev_m_exists;
    if (rise <= 0.0) return {};
    return {-rise, 0.0, rise};
}

/// Dimension-velocity check: an object both small (VRU-sized in width and
/// length) and fast is implausible, and full ignorance is assumed for its
/// existence belief.
inline MassDelta dim_vel_correction(const BeliefMass& m, const Dimensions& dims, double speed,
                                    const ValueLimits& limits) {
    const bool small = dims.width < limits.vru_extent && dims.length < limits.vru_extent;
    if (small && speed > limits.vru_speed) return {-m.m_exists, 0.0, m.m_exists};
    return {};
}

/// Applies the summed corrections and re-establishes a valid mass triple:
/// if any component leaves [0, 1], all components are shifted up by the most
/// negative excess, then renormalized to unit sum.
inline BeliefMass apply_corrections(const BeliefMass& m, std::span<const MassDelta> deltas) {
    double e = m.m_exists, n = m.m_not_exists, u = m.m_unknown;
    for (const MassDelta& d : deltas) {
        e += d.d_exists;
        n += d.d_not_exists;
        u += d.d_unknown;
    }
    const double low = std::min({e, n, u, 0.0});
    if (low < 0.0) {
        e -= low;
        n -= low;
        u -= low;
    }
    const double sum = e + n + u;
    if (sum <= 0.0) return BeliefMass::vacuous();
    return {e / sum, n / sum, u / sum};
}

}  // namespace credence
