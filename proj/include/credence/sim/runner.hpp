#pragma once

#include <map>
#include <memory>
#include <vector>

#include "credence/core/map.hpp"
#include "credence/fusion/pipeline.hpp"
#include "credence/sim/recording.hpp"
#include "credence/sim/rng.hpp"
#include "credence/sim/scenario.hpp"
#include "credence/sim/sensor_model.hpp"
#include "credence/sim/traffic.hpp"
#include "credence/tracker/tracker.hpp"

namespace credence {

inline TrackerConfig make_tracker_config(const SensorMeta& meta, const TrackerTuning& tuning,
                                         const FaultSpec* fault) {
    TrackerConfig c = TrackerConfig::from_rates(meta.detection_prob, meta.false_alarm_rate);
    if (meta.confirm_threshold != 0.0) c.confirm_threshold = meta.confirm_threshold;
    if (meta.deletion_threshold != 0.0) c.deletion_threshold = meta.deletion_threshold;
    c.gate = tuning.gate;
    c.process_noise = tuning.process_noise;
    c.max_coasting = tuning.max_coasting;
    c.validate();
    // The injected parametrization fault is applied after the sanity check:
    // a corrupt threshold is exactly what the fault models.
    if (fault != nullptr && fault->kind == FaultSpec::Kind::TrackerThreshold &&
        fault->sensor_id == meta.sensor_id)
        c.confirm_threshold = fault->faulty_threshold;
    return c;
}

/// Steps the full chain truth -> detections -> per-sensor tracking -> fusion
/// with plausibilization, at the configured sample period. The warmup phase
/// runs the identical pipeline but is not recorded. Identical (config, seed)
/// produce bit-identical recordings.
inline Recording run_scenario(const ScenarioConfig& input_config, uint64_t config_hash = 0) {
    ScenarioConfig cfg = input_config;
    cfg.finalize();
    cfg.validate();

    const DigitalMap map = build_map(cfg);
    const std::vector<GroundTruthObject> truth = generate_traffic(cfg);
    const FaultSpec* fault = cfg.faults.empty() ? nullptr : &cfg.faults.front();

    std::map<SensorId, SensorMeta> sensors;
    std::vector<std::unique_ptr<Tracker>> trackers;
    for (const SensorMeta& meta : cfg.sensors) {
        sensors[meta.sensor_id] = meta;
        trackers.push_back(
            std::make_unique<Tracker>(meta, make_tracker_config(meta, cfg.tracker, fault)));
    }

    Recording rec;
    rec.config_hash = config_hash;
    rec.seed = cfg.seed;
    rec.sample_period = cfg.sample_period;
    rec.kind = cfg.kind;
    rec.sensors = cfg.sensors;
    rec.analysis = cfg.analysis;

    FusionState fusion_state;
    const int warm_steps = static_cast<int>(std::lround(cfg.warmup / cfg.sample_period));
    const int rec_steps = static_cast<int>(std::lround(cfg.duration / cfg.sample_period));
    for (int i = 0; i < warm_steps + rec_steps; ++i) {
        const double t = (i - warm_steps) * cfg.sample_period;
        const std::vector<TruthEntry> snapshot = truth_snapshot(truth, t);

        LocalObjectList locals;
        locals.timestamp = t;
        for (size_t s = 0; s < trackers.size(); ++s) {
            const SensorMeta& meta = cfg.sensors[s];
            RngStream rng(cfg.seed, rng_purpose::kSense, static_cast<uint64_t>(i),
                          static_cast<uint64_t>(meta.sensor_id));
            const std::vector<Detection> detections =
                sense(snapshot, meta, fault, cfg.noise, cfg.clutter, map, rng, t);
            trackers[s]->step(detections, t);
            locals.sensors[meta.sensor_id] = trackers[s]->confirmed_objects(t);
        }

        FusionStepResult fused = fuse_step(locals, sensors, map, cfg.fusion, fusion_state);

        if (i >= warm_steps) {
            StepRecord step;
            step.time = t;
            step.truth = snapshot;
            step.locals = std::move(locals);
            step.ledger = std::move(fused.ledger);
            step.systems = std::move(fused.objects);
            step.diagnostics = std::move(fused.diagnostics);
            rec.steps.push_back(std::move(step));
        }
    }
    return rec;
}

}  // namespace credence
