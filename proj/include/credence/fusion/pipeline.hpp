#pragma once

#include <map>
#include <string>
#include <vector>

#include "credence/core/map.hpp"
#include "credence/core/types.hpp"
#include "credence/fusion/cluster.hpp"
#include "credence/fusion/ledger.hpp"
#include "credence/fusion/merge.hpp"
#include "credence/plausibility/belief.hpp"
#include "credence/plausibility/classify.hpp"
#include "credence/plausibility/corrections.hpp"
#include "credence/plausibility/factors.hpp"

namespace credence {

struct FusionConfig {
    double cluster_gate = 16.812;  // chi-square, 6 dof, 99%
    double frame_gate = 5.0;       // [m] on predicted position distance
    double smoothing_alpha = 0.5;  // averaging over the last two frames
    ValueLimits limits;
};

/// Carries identity and smoothing memory across fusion steps. Global ids are
/// unique for the lifetime of the state and never reused.
struct FusionState {
    struct ObjectMemory {
        double m_exists = 0.0;  // previous fused existence belief (Eq. 10 baseline)
        BeliefMass smoothed_mass;
        Dimensions smoothed_dims;
    };
    std::vector<SystemObject> previous;
    std::map<GlobalId, ObjectMemory> memory;
    GlobalId next_global_id = 1;
    double last_time = 0.0;
    bool has_time = false;
};

/// Per-sensor view of one cluster, kept for diagnosis and tests.
struct SensorContribution {
    SensorId sensor_id = 0;
    Contribution contribution;
    BeliefMass mass = BeliefMass::vacuous();
};

struct ClusterReport {
    std::vector<SensorContribution> contributions;
    BeliefMass fused = BeliefMass::vacuous();
    bool conflict = false;
};

struct FusionStepResult {
    std::vector<SystemObject> objects;
    ObservationLedger ledger;
    std::vector<ClusterReport> clusters;
    std::vector<std::string> diagnostics;
};

namespace detail {

inline std::vector<LocalObject> siblings_of(const std::vector<LocalObject>& confirmed,
                                            const LocalObject* self) {
    std::vector<LocalObject> out;
    out.reserve(confirmed.size());
    for (const LocalObject& o : confirmed) {
        if (self != nullptr && o.track_id == self->track_id) continue;
        out.push_back(o);
    }
    return out;
}

}  // namespace detail

/// The combined object-fusion and plausibilization step: clustering,
/// per-sensor belief assignment with miss/unexpected registration, DS
/// combination, merging, cross-frame id association, model-based corrections
/// and the pignistic transform. Total-conflict clusters are dropped with a
/// diagnostic; the step itself always completes.
inline FusionStepResult fuse_step(const LocalObjectList& objects,
                                  const std::map<SensorId, SensorMeta>& sensors,
                                  const DigitalMap& map, const FusionConfig& config,
                                  FusionState& state) {
    FusionStepResult result;
    const double now = objects.timestamp;

    std::map<SensorId, std::vector<LocalObject>> confirmed;
    for (const auto& [sid, objs] : objects.sensors)
        for (const LocalObject& o : objs)
            if (o.status.confirmed) confirmed[sid].push_back(o);

    std::map<SensorId, SigmoidCalib> calib;
    for (const auto& [sid, meta] : sensors) {
        const double s0 = std::log(meta.detection_prob / meta.false_alarm_rate);
        calib[sid] = calibrate_sigmoid(s0, meta.confirm_threshold);
    }

    const std::vector<TrackCluster> clusters = cluster(objects, config.cluster_gate);

    struct Fused {
        MergedTrack merged;
        BeliefMass mass;
        std::set<SensorId> contributors;
    };
    std::vector<Fused> fused_clusters;

    for (const TrackCluster& c : clusters) {
        const MergedTrack merged = merge(c);
        const ClusterEstimate estimate{merged.state, merged.dims};

        ClusterReport report;
        BeliefMass combined = BeliefMass::vacuous();
        bool conflict = false;
        std::set<SensorId> contributors;

        for (const auto& [sid, meta] : sensors) {
            const LocalObject* member = nullptr;
            for (const LocalObject& o : c.members)
                if (o.sensor_id == sid) member = &o;

            const auto sensor_confirmed = confirmed.find(sid);
            static const std::vector<LocalObject> kNone;
            const std::vector<LocalObject> siblings = detail::siblings_of(
                sensor_confirmed != confirmed.end() ? sensor_confirmed->second : kNone, member);

            const Contribution contribution =
                classify_contribution(member, meta, siblings, estimate);
            result.ledger.record(sid, contribution);

            BeliefMass mass = BeliefMass::vacuous();
            switch (contribution.mass_rule) {
                case MassRule::FromFactors: {
                    BbaFactors f;
                    f.p_trust = meta.trust;
                    f.p_fov = p_fov_factor(*member, meta);
                    f.p_occ = p_occ_factor(*member, siblings, meta);
                    f.p_ex = p_ex_factor(*member, calib[sid]);
                    f.p_dm = p_dm_factor(*member, map, config.limits);
                    f.p_val = p_val_factor(*member, config.limits);
                    mass = compute_bba(f);
                    break;
                }
                case MassRule::MissMass:
                    mass = compute_bba({meta.trust, 1.0, 1.0, 0.0, 1.0, 1.0});
                    break;
                case MassRule::Vacuous: break;
            }
            if (member != nullptr) contributors.insert(sid);
            report.contributions.push_back({sid, contribution, mass});

            if (!conflict) {
                try {
                    combined = ds_combine(combined, mass);
                } catch (const TotalConflictError&) {
                    conflict = true;
                    result.diagnostics.push_back(
                        "total conflict, cluster fusion aborted near x=" +
                        std::to_string(merged.state.x) + " y=" + std::to_string(merged.state.y));
                }
            }
        }
        report.fused = combined;
        report.conflict = conflict;
        result.clusters.push_back(std::move(report));
        if (!conflict) fused_clusters.push_back({merged, combined, std::move(contributors)});
    }

    // Cross-frame association keeps persistent global ids: gated optimal
    // assignment on the distance between current positions and the previous
    // objects predicted to the current time.
    const double dt = state.has_time ? now - state.last_time : 0.0;
    Eigen::MatrixXd cost(fused_clusters.size(), state.previous.size());
    for (size_t i = 0; i < fused_clusters.size(); ++i) {
        for (size_t j = 0; j < state.previous.size(); ++j) {
            const SystemObject& prev = state.previous[j];
            const Vec3 predicted = prev.state.position() + prev.state.velocity() * dt;
            cost(i, j) = (fused_clusters[i].merged.state.position() - predicted).norm();
        }
    }
    const std::vector<int> match = solve_gated_assignment(cost, config.frame_gate);

    std::map<GlobalId, FusionState::ObjectMemory> next_memory;
    for (size_t i = 0; i < fused_clusters.size(); ++i) {
        Fused& f = fused_clusters[i];
        const bool matched = match[i] >= 0;
        const GlobalId gid =
            matched ? state.previous[static_cast<size_t>(match[i])].global_id : state.next_global_id++;
        const auto mem = state.memory.find(gid);
        const bool has_memory = matched && mem != state.memory.end();

        const double a = config.smoothing_alpha;
        Dimensions dims = f.merged.dims;
        if (has_memory) {
            const Dimensions& prev = mem->second.smoothed_dims;
            dims.length = (1.0 - a) * prev.length + a * dims.length;
            dims.width = (1.0 - a) * prev.width + a * dims.width;
            dims.height = (1.0 - a) * prev.height + a * dims.height;
            dims.heading = normalize_angle(
                std::atan2((1.0 - a) * std::sin(prev.heading) + a * std::sin(dims.heading),
                           (1.0 - a) * std::cos(prev.heading) + a * std::cos(dims.heading)));
        }

        std::vector<MassDelta> deltas;
        if (has_memory)
            deltas.push_back(
                history_correction(f.mass, mem->second.m_exists, f.merged.status.coasting));
        deltas.push_back(
            dim_vel_correction(f.mass, dims, f.merged.state.speed(), config.limits));
        const BeliefMass corrected = apply_corrections(f.mass, deltas);

        BeliefMass smoothed = corrected;
        if (has_memory) {
            const BeliefMass& prev = mem->second.smoothed_mass;
            smoothed.m_exists = (1.0 - a) * prev.m_exists + a * corrected.m_exists;
            smoothed.m_not_exists = (1.0 - a) * prev.m_not_exists + a * corrected.m_not_exists;
            smoothed.m_unknown = (1.0 - a) * prev.m_unknown + a * corrected.m_unknown;
        }

        const Pignistic pig = pignistic(smoothed);
        SystemObject obj;
        obj.global_id = gid;
        obj.timestamp = now;
        obj.state = f.merged.state;
        obj.covariance = f.merged.covariance;
        obj.dims = dims;
        obj.status = f.merged.status;
        obj.p_exists = pig.p_exists;
        obj.s_exists = pig.s_exists;
        obj.contributors = std::move(f.contributors);
        next_memory[gid] = {smoothed.m_exists, smoothed, dims};
        result.objects.push_back(std::move(obj));
    }

    state.previous = result.objects;
    state.memory = std::move(next_memory);
    state.last_time = now;
    state.has_time = true;
    return result;
}

}  // namespace credence
