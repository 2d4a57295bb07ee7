#pragma once

#include <map>
#include <optional>
#include <vector>

#include "credence/sim/recording.hpp"

namespace credence {

/// Per-interval plausibility statistics: miss ratio and unexpected
/// observation rate per sensor, mean existence probability per spatial bin.
struct IntervalStats {
    struct SensorRatios {
        int misses = 0;
        int observations = 0;
        int unexpected = 0;
        std::optional<double> mr;
        std::optional<double> uor;
    };
    int index = 0;
    std::map<SensorId, SensorRatios> sensors;
    std::vector<double> bin_p_sum;
    std::vector<int> bin_count;

    std::optional<double> bin_mean(int b) const {
        if (b < 0 || b >= static_cast<int>(bin_p_sum.size()) || bin_count[b] == 0)
            return std::nullopt;
        return bin_p_sum[b] / bin_count[b];
    }
};

/// Aggregates one interval of a recording: ledger totals turn into the
/// MR/UOR ratios and system objects are averaged per spatial bin. A sensor
/// without observations in the interval has its ratios marked missing.
inline IntervalStats interval_metrics(const Recording& rec, int interval_index) {
    const int per = rec.interval_steps();
    IntervalStats out;
    out.index = interval_index;
    out.bin_p_sum.assign(rec.analysis.bins.count(), 0.0);
    out.bin_count.assign(rec.analysis.bins.count(), 0);

    const int begin = interval_index * per;
    const int end = std::min<int>(begin + per, static_cast<int>(rec.steps.size()));
    for (const SensorMeta& meta : rec.sensors) out.sensors[meta.sensor_id];

    for (int i = begin; i < end; ++i) {
        const StepRecord& step = rec.steps[i];
        for (const auto& [sid, counts] : step.ledger.per_sensor) {
            auto& s = out.sensors[sid];
            s.misses += counts.misses;
            s.observations += counts.observations();
            s.unexpected += counts.unexpected;
        }
        for (const SystemObject& obj : step.systems) {
            const int b = rec.analysis.bins.bin_of(obj.state.position());
            if (b < 0) continue;
            out.bin_p_sum[b] += obj.p_exists;
            ++out.bin_count[b];
        }
    }
    for (auto& [sid, s] : out.sensors) {
        if (s.observations > 0) {
            s.mr = static_cast<double>(s.misses) / (s.misses + s.observations);
            s.uor = static_cast<double>(s.unexpected) / s.observations;
        }
    }
    return out;
}

inline std::vector<IntervalStats> all_interval_metrics(const Recording& rec) {
    std::vector<IntervalStats> out;
    for (int k = 0; k < rec.interval_count(); ++k) out.push_back(interval_metrics(rec, k));
    return out;
}

}  // namespace credence
