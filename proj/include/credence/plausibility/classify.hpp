#pragma once

#include <span>

#include "credence/core/geometry.hpp"
#include "credence/core/types.hpp"

namespace credence {

enum class ContributionKind { Regular, Unexpected, Miss, Irrelevant };

/// How the sensor's belief mass is to be formed for this cluster.
enum class MassRule {
    FromFactors,  ///< evaluate the full BBA factor product
    Vacuous,      ///< m(U) = 1; no impact under DS combination
    MissMass      ///< p_ex = 0: (0, trust, 1 - trust)
};

struct Contribution {
    ContributionKind kind = ContributionKind::Irrelevant;
    MassRule mass_rule = MassRule::Vacuous;
    bool log_miss = false;
};

/// Merged provisional position/extent of a track cluster, as available from
/// the contributing sensors.
struct ClusterEstimate {
    StateVector state;
    Dimensions dims;
};

inline bool in_non_occluded_fov(const StateVector& state, const Dimensions& dims,
                                std::span<const LocalObject> confirmed_others,
                                const SensorMeta& sensor) {
    const CheckPoints pts = bounding_box_points(state, dims);
    if (!in_fov(pts, sensor)) return false;
    std::vector<Obb> boxes;
    boxes.reserve(confirmed_others.size());
    for (const LocalObject& b : confirmed_others) boxes.push_back(Obb::of(b.state, b.dims));
    return line_of_sight(state, dims, boxes, sensor);
}

/// Classifies one sensor's relation to a track cluster.
///
/// Reporting sensor: an object outside its non-occluded FoV that is not
/// coasting is an unexpected observation and turns the sensor vacuous;
/// otherwise the report is regular. A coasting report whose cluster sits in
/// the sensor's non-occluded FoV additionally logs a miss, without touching
/// the mass. Non-reporting sensor: a cluster inside its non-occluded FoV is
/// a miss (handled as p_ex = 0); anything it could not have perceived makes
/// it an irrelevant contributor.
///
/// `siblings` are the sensor's other confirmed reports this step (excluding
/// `reported` itself when present).
inline Contribution classify_contribution(const LocalObject* reported,
                                          const SensorMeta& sensor,
                                          std::span<const LocalObject> siblings,
                                          const ClusterEstimate& estimate) {
    Contribution c;
    if (reported != nullptr) {
        const bool observable =
            in_non_occluded_fov(reported->state, reported->dims, siblings, sensor);
        if (!observable && !reported->status.coasting) {
            c.kind = ContributionKind::Unexpected;
            c.mass_rule = MassRule::Vacuous;
            return c;
        }
        c.kind = ContributionKind::Regular;
        c.mass_rule = MassRule::FromFactors;
        if (reported->status.coasting &&
            in_non_occluded_fov(estimate.state, estimate.dims, siblings, sensor))
            c.log_miss = true;
        return c;
    }
    if (in_non_occluded_fov(estimate.state, estimate.dims, siblings, sensor)) {
        c.kind = ContributionKind::Miss;
        c.mass_rule = MassRule::MissMass;
        c.log_miss = true;
        return c;
    }
    c.kind = ContributionKind::Irrelevant;
    c.mass_rule = MassRule::Vacuous;
    return c;
}

}  // namespace credence
