#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "credence/analysis/intervals.hpp"
#include "credence/analysis/stats.hpp"
#include "credence/sim/recording.hpp"

namespace credence {

enum class MetricKind { MR, UOR };

struct MetricFlag {
    SensorId sensor = 0;
    MetricKind metric = MetricKind::MR;
    int direction = 0;  // +1 above baseline, -1 below
    Interval95 value;
    Interval95 baseline;
};

struct BinFlag {
    int bin = 0;
    Interval95 value;
    Interval95 reference;
};

struct DiagnosisReport {
    int intervals = 0;
    std::map<SensorId, Interval95> mr;
    std::map<SensorId, Interval95> uor;
    std::vector<MetricFlag> flags;
    std::vector<BinFlag> p_low_bins;
    std::string fault_class = "no fault";
    std::optional<SensorId> affected_sensor;

    bool fault_detected() const { return !flags.empty(); }
};

namespace detail {

inline std::map<SensorId, std::vector<double>> metric_series(
    const std::vector<IntervalStats>& intervals, MetricKind kind) {
    std::map<SensorId, std::vector<double>> out;
    for (const IntervalStats& iv : intervals) {
        for (const auto& [sid, s] : iv.sensors) {
            const auto v = kind == MetricKind::MR ? s.mr : s.uor;
            if (v) out[sid].push_back(*v);
        }
    }
    return out;
}

/// Flags sensors whose CI separates from the cross-sensor baseline of the
/// remaining sensors. Deviating sensors are excluded from the baselines one
/// at a time, most separated first, until nothing else separates; flags are
/// then taken against the cleaned baselines. A faulty sensor can therefore
/// not mask itself by polluting its own baseline, while the healthy majority
/// stays unflagged.
inline void flag_metric(const std::map<SensorId, Interval95>& stats, MetricKind kind,
                        std::vector<MetricFlag>& flags) {
    std::set<SensorId> excluded;
    auto baseline_for = [&](SensorId sid) {
        std::vector<Interval95> others;
        for (const auto& [oid, oci] : stats)
            if (oid != sid && !excluded.count(oid)) others.push_back(oci);
        return others;
    };
    auto separation = [](const Interval95& ci, const Interval95& base) {
        if (disjoint_above(ci, base)) return ci.low() - base.high();
        if (disjoint_below(ci, base)) return base.low() - ci.high();
        return 0.0;
    };
    while (stats.size() - excluded.size() >= 2) {
        SensorId worst = 0;
        double worst_gap = 0.0;
        for (const auto& [sid, ci] : stats) {
            if (excluded.count(sid)) continue;
            const auto others = baseline_for(sid);
            if (others.empty()) continue;
            const double gap = separation(ci, wls_baseline(others));
            if (gap > worst_gap) {
                worst_gap = gap;
                worst = sid;
            }
        }
        if (worst_gap <= 0.0) break;
        excluded.insert(worst);
    }
    for (const auto& [sid, ci] : stats) {
        const auto others = baseline_for(sid);
        if (others.empty()) continue;
        const Interval95 base = wls_baseline(others);
        if (disjoint_above(ci, base))
            flags.push_back({sid, kind, +1, ci, base});
        else if (disjoint_below(ci, base))
            flags.push_back({sid, kind, -1, ci, base});
    }
}

inline std::vector<SensorId> sensors_by_position(const std::vector<SensorMeta>& metas) {
    std::vector<const SensorMeta*> ptr;
    for (const SensorMeta& m : metas) ptr.push_back(&m);
    std::sort(ptr.begin(), ptr.end(), [](const SensorMeta* a, const SensorMeta* b) {
        return std::tie(a->mount.x(), a->mount.y(), a->sensor_id) <
               std::tie(b->mount.x(), b->mount.y(), b->sensor_id);
    });
    std::vector<SensorId> out;
    for (const SensorMeta* m : ptr) out.push_back(m->sensor_id);
    return out;
}

}  // namespace detail

/// Statistical fault diagnosis over a recording, following the single-fault
/// hypothesis. MR/UOR flags come from confidence-interval disjointness
/// against a robust cross-sensor baseline; with a no-fault reference
/// recording, spatial existence-probability dips are flagged as well. Flag
/// patterns map onto the known fault classes:
///   MR high + UOR low at one sensor      -> misoriented sensor pose
///   MR high at the two neighbors only    -> tracker parametrization
///   MR high at one sensor, UOR flat      -> sensor pollution / blind spot
/// Anything else with flags present is reported inconclusive.
inline DiagnosisReport diagnose(const Recording& rec, const Recording* reference = nullptr,
                                int min_intervals = 10) {
    const int n_intervals = rec.interval_count();
    if (n_intervals < min_intervals)
        throw InsufficientDataError("diagnosis needs at least " + std::to_string(min_intervals) +
                                    " intervals, recording has " + std::to_string(n_intervals));

    const std::vector<IntervalStats> intervals = all_interval_metrics(rec);
    const std::set<SensorId> stat_set(rec.analysis.stat_sensors.begin(),
                                      rec.analysis.stat_sensors.end());

    DiagnosisReport report;
    report.intervals = n_intervals;
    for (MetricKind kind : {MetricKind::MR, MetricKind::UOR}) {
        const auto series = detail::metric_series(intervals, kind);
        std::map<SensorId, Interval95> stats;
        for (const auto& [sid, values] : series) {
            if (!stat_set.count(sid)) continue;
            if (values.size() < 2) continue;
            stats[sid] = confidence_interval(values);
        }
        if (kind == MetricKind::MR) report.mr = stats;
        else report.uor = stats;
        if (stats.size() >= 2) detail::flag_metric(stats, kind, report.flags);
    }

    if (reference != nullptr) {
        const std::vector<IntervalStats> ref_intervals = all_interval_metrics(*reference);
        const int bins = rec.analysis.bins.count();
        for (int b = 0; b < bins; ++b) {
            std::vector<double> cur, ref;
            for (const IntervalStats& iv : intervals)
                if (auto m = iv.bin_mean(b)) cur.push_back(*m);
            for (const IntervalStats& iv : ref_intervals)
                if (auto m = iv.bin_mean(b)) ref.push_back(*m);
            if (cur.size() < 2 || ref.size() < 2) continue;
            const Interval95 ci_cur = confidence_interval(cur);
            const Interval95 ci_ref = confidence_interval(ref);
            if (disjoint_below(ci_cur, ci_ref)) report.p_low_bins.push_back({b, ci_cur, ci_ref});
        }
    }

    // Fault-class mapping from the flag pattern.
    std::set<SensorId> mr_high, mr_low, uor_high, uor_low;
    for (const MetricFlag& f : report.flags) {
        if (f.metric == MetricKind::MR) (f.direction > 0 ? mr_high : mr_low).insert(f.sensor);
        else (f.direction > 0 ? uor_high : uor_low).insert(f.sensor);
    }

    if (report.flags.empty()) {
        report.fault_class = "no fault";
        return report;
    }

    std::vector<SensorId> miso;
    std::set_intersection(mr_high.begin(), mr_high.end(), uor_low.begin(), uor_low.end(),
                          std::back_inserter(miso));
    if (!miso.empty()) {
        report.fault_class = "misoriented sensor pose";
        // Largest MR deviation wins if several qualify.
        SensorId best = miso.front();
        double best_dev = -1.0;
        for (SensorId s : miso)
            for (const MetricFlag& f : report.flags)
                if (f.sensor == s && f.metric == MetricKind::MR &&
                    f.value.mean - f.baseline.mean > best_dev) {
                    best_dev = f.value.mean - f.baseline.mean;
                    best = s;
                }
        report.affected_sensor = best;
        return report;
    }

    if (uor_high.empty() && uor_low.empty() && mr_low.empty()) {
        const std::vector<SensorId> order = detail::sensors_by_position(rec.sensors);
        if (mr_high.size() == 2) {
            for (size_t k = 0; k < order.size(); ++k) {
                const bool prev_ok = k > 0 && mr_high.count(order[k - 1]);
                const bool next_ok = k + 1 < order.size() && mr_high.count(order[k + 1]);
                if (prev_ok && next_ok && !mr_high.count(order[k])) {
                    report.fault_class = "tracker parametrization";
                    report.affected_sensor = order[k];
                    return report;
                }
            }
        }
        if (mr_high.size() == 1) {
            report.fault_class = "sensor pollution or blind spot";
            report.affected_sensor = *mr_high.begin();
            return report;
        }
    }

    report.fault_class = "inconclusive";
    return report;
}

}  // namespace credence
