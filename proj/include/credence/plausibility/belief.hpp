#pragma once

#include <cmath>
#include <stdexcept>

#include "credence/core/types.hpp"

namespace credence {

/// The six per-sensor plausibility factors feeding the basic belief
/// assignment. trust/fov/occ support ignorance when reduced; ex/dm/val
/// shift weight towards non-existence.
struct BbaFactors {
    double p_trust = 1.0;
    double p_fov = 1.0;
    double p_occ = 1.0;
    double p_ex = 1.0;
    double p_dm = 1.0;
    double p_val = 1.0;
};

/// Basic belief assignment from the factor product:
///   m(E)  = trust * fov * occ * ex * dm * val
///   m(!E) = trust * fov * occ * (1 - ex * dm * val)
///   m(U)  = 1 - m(E) - m(!E)
inline BeliefMass compute_bba(const BbaFactors& f) {
    for (double v : {f.p_trust, f.p_fov, f.p_occ, f.p_ex, f.p_dm, f.p_val})
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("BBA factor outside [0, 1]");
    const double support = f.p_trust * f.p_fov * f.p_occ;
    const double evidence = f.p_ex * f.p_dm * f.p_val;
    BeliefMass m;
    m.m_exists = support * evidence;
    m.m_not_exists = support * (1.0 - evidence);
    m.m_unknown = 1.0 - m.m_exists - m.m_not_exists;
    return m;
}

struct TotalConflictError : std::runtime_error {
    TotalConflictError() : std::runtime_error("total conflict in DS combination") {}
};

/// Dempster's rule of combination on the frame {E, !E, U}. Throws
/// TotalConflictError when the conflict mass reaches one.
inline BeliefMass ds_combine(const BeliefMass& a, const BeliefMass& b) {
    const double conflict = a.m_exists * b.m_not_exists + a.m_not_exists * b.m_exists;
    const double z = 1.0 - conflict;
    if (z <= 1e-12) throw TotalConflictError();
    BeliefMass m;
    m.m_exists =
        (a.m_exists * b.m_exists + a.m_exists * b.m_unknown + a.m_unknown * b.m_exists) / z;
    m.m_not_exists = (a.m_not_exists * b.m_not_exists + a.m_not_exists * b.m_unknown +
                      a.m_unknown * b.m_not_exists) /
                     z;
    m.m_unknown = (a.m_unknown * b.m_unknown) / z;
    return m;
}

struct Pignistic {
    double p_exists;
    double s_exists;
};

/// Pignistic transformation: the ignorance mass splits evenly onto the two
/// singletons; its half also serves as the epistemic half-width.
inline Pignistic pignistic(const BeliefMass& m) {
    return {m.m_exists + 0.5 * m.m_unknown, 0.5 * m.m_unknown};
}

}  // namespace credence
