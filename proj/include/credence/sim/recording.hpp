#pragma once

#include <string>
#include <vector>

#include "credence/core/types.hpp"
#include "credence/fusion/ledger.hpp"
#include "credence/sim/scenario.hpp"
#include "credence/sim/traffic.hpp"

namespace credence {

/// Everything recorded at one fusion step.
struct StepRecord {
    double time = 0.0;
    std::vector<TruthEntry> truth;
    LocalObjectList locals;
    ObservationLedger ledger;
    std::vector<SystemObject> systems;
    std::vector<std::string> diagnostics;
};

/// Full run recording: reproducibility metadata, the sensor layout, the
/// analysis parameters and the per-step data.
struct Recording {
    static constexpr uint32_t kSchemaVersion = 1;

    uint32_t schema_version = kSchemaVersion;
    uint64_t config_hash = 0;
    uint64_t seed = 0;
    double sample_period = 0.1;
    ScenarioKind kind = ScenarioKind::Highway;
    std::vector<SensorMeta> sensors;
    AnalysisSpec analysis;
    std::vector<StepRecord> steps;

    int interval_steps() const {
        return std::max(1, static_cast<int>(std::lround(analysis.interval_s / sample_period)));
    }
    int interval_count() const {
        return static_cast<int>(steps.size()) / interval_steps();
    }
};

}  // namespace credence
