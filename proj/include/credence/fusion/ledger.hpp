#pragma once

#include <map>

#include "credence/core/types.hpp"
#include "credence/plausibility/classify.hpp"

namespace credence {

/// Per-sensor tally of one fusion step. Regular plus unexpected equals the
/// number of reported confirmed tracks; misses and irrelevant contributions
/// are bookkept on top.
struct LedgerCounts {
    int regular = 0;
    int unexpected = 0;
    int misses = 0;
    int irrelevant = 0;

    int observations() const { return regular + unexpected; }
};

struct ObservationLedger {
    std::map<SensorId, LedgerCounts> per_sensor;

    void record(SensorId id, const Contribution& c) {
        LedgerCounts& l = per_sensor[id];
        switch (c.kind) {
            case ContributionKind::Regular: ++l.regular; break;
            case ContributionKind::Unexpected: ++l.unexpected; break;
            case ContributionKind::Miss: break;  // counted via log_miss below
            case ContributionKind::Irrelevant: ++l.irrelevant; break;
        }
        if (c.log_miss) ++l.misses;
    }

    void add(const ObservationLedger& other) {
        for (const auto& [id, c] : other.per_sensor) {
            LedgerCounts& l = per_sensor[id];
            l.regular += c.regular;
            l.unexpected += c.unexpected;
            l.misses += c.misses;
            l.irrelevant += c.irrelevant;
        }
    }
};

}  // namespace credence
