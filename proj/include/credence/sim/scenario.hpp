#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "credence/core/map.hpp"
#include "credence/core/types.hpp"
#include "credence/fusion/pipeline.hpp"

namespace credence {

enum class ScenarioKind { Highway, Intersection };

/// Straight multi-lane segment along +x. Lane l is centered at
/// (l + 0.5) * lane_width; traffic flows in +x.
struct HighwayMapSpec {
    int lanes = 4;
    double lane_width = 3.5;
    double length = 400.0;  // monitored stretch [0, length]
    double margin = 80.0;   // spawn/despawn margin beyond both ends
};

/// Four-way junction centered at the origin, roads along both axes with one
/// lane per direction, pedestrian paths on the sidewalk band.
struct IntersectionMapSpec {
    double leg_length = 80.0;
    double road_half_width = 3.5;
    double sidewalk_offset = 5.5;
    double stop_line = 6.0;
};

struct TrafficSpec {
    double arrival_rate = 0.12;      // vehicles/s per lane (highway) or per leg
    double pedestrian_rate = 0.0;    // pedestrians/s per leg (intersection)
    double car_fraction = 0.85;
    double truck_fraction = 0.10;    // remainder: bus (highway) / cyclist (intersection)
    double speed_jitter = 0.5;       // [m/s] within-lane speed spread
    double min_headway_s = 2.0;      // minimum arrival separation per lane
    double cruise_speed = 10.0;      // intersection approach speed
    double turn_speed = 5.0;
    double stop_probability = 0.7;   // chance to stop at the stop line
    double max_stop_s = 3.0;
};

struct NoiseSpec {
    double position_sigma = 0.5;
    double velocity_sigma = 0.5;
    double extent_sigma = 0.1;
    double heading_sigma = 0.03;
};

/// Parametric false-alarm model: expected count per scan is
/// resolution_cells * pfa. Radar clutter concentrates on surfaces near the
/// road, so positions are drawn from the FoV intersected with the mapped
/// corridor and a height band.
struct ClutterSpec {
    double resolution_cells = 131072.0;
    bool road_corridor = true;
    double z_min = 0.3;
    double z_max = 2.5;
    double min_range_frac = 0.2;
    double velocity_sigma = 1.0;
};

struct FaultSpec {
    enum class Kind { Misorientation, TrackerThreshold, BlindSpot };
    Kind kind = Kind::Misorientation;
    SensorId sensor_id = 0;
    double delta_yaw = 0.0;         // Misorientation [rad], counter-clockwise
    double faulty_threshold = 0.0;  // TrackerThreshold
    double blind_center = 0.0;      // BlindSpot wedge center azimuth [rad]
    double blind_width = 0.0;       // BlindSpot wedge opening [rad]
};

/// Spatial binning for the existence-probability statistics.
struct BinSpec {
    enum class Kind { LongitudinalX, GridXY };
    Kind kind = Kind::LongitudinalX;
    double x0 = 0.0, x1 = 0.0;
    double y0 = 0.0, y1 = 0.0;
    double size = 25.0;

    int nx() const { return std::max(1, static_cast<int>(std::ceil((x1 - x0) / size))); }
    int ny() const {
        return kind == Kind::GridXY
                   ? std::max(1, static_cast<int>(std::ceil((y1 - y0) / size)))
                   : 1;
    }
    int count() const { return nx() * ny(); }

    /// Bin index of a position, or -1 outside the binned region.
    int bin_of(const Vec3& p) const {
        if (p.x() < x0 || p.x() >= x1) return -1;
        const int ix = static_cast<int>((p.x() - x0) / size);
        if (kind == Kind::LongitudinalX) return ix;
        if (p.y() < y0 || p.y() >= y1) return -1;
        const int iy = static_cast<int>((p.y() - y0) / size);
        return iy * nx() + ix;
    }
};

struct AnalysisSpec {
    double interval_s = 5.0;
    BinSpec bins;
    std::vector<SensorId> stat_sensors;  // sensors entering the statistics
};

/// Shared tracker tuning; the score thresholds derive from each sensor's
/// (pd, pfa) unless set explicitly on the sensor.
struct TrackerTuning {
    double gate = 16.812;
    double process_noise = 0.5;
    int max_coasting = 5;
    double confirm_factor = 1.5;    // threshold = factor * log(pd/pfa)
    double deletion_factor = 0.85;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Highway;
    HighwayMapSpec highway;
    IntersectionMapSpec intersection;
    std::vector<SensorMeta> sensors;
    TrafficSpec traffic;
    NoiseSpec noise;
    ClutterSpec clutter;
    FusionConfig fusion;
    TrackerTuning tracker;
    double sample_period = 0.1;
    double duration = 150.0;
    double warmup = 20.0;
    uint64_t seed = 1;
    std::vector<FaultSpec> faults;
    AnalysisSpec analysis;

    /// Fills derived per-sensor defaults (score thresholds from pd/pfa).
    void finalize() {
        for (SensorMeta& s : sensors) {
            const double base = std::log(s.detection_prob / s.false_alarm_rate);
            if (s.confirm_threshold == 0.0) s.confirm_threshold = tracker.confirm_factor * base;
            if (s.deletion_threshold == 0.0) s.deletion_threshold = tracker.deletion_factor * base;
        }
        if (analysis.stat_sensors.empty())
            for (const SensorMeta& s : sensors) analysis.stat_sensors.push_back(s.sensor_id);
    }

    void validate() const {
        if (!(sample_period > 0.0))
            throw std::invalid_argument("sample period must be > 0");
        if (duration < 0.0) throw std::invalid_argument("duration must be >= 0");
        if (duration > 0.0 && duration + 1e-9 < analysis.interval_s)
            throw std::invalid_argument("duration must cover at least one interval");
        if (faults.size() > 1)
            throw std::invalid_argument("at most one fault may be active per run (single fault hypothesis)");
        if (sensors.empty()) throw std::invalid_argument("at least one sensor required");
        for (const SensorMeta& s : sensors) s.validate();
        for (const FaultSpec& f : faults) {
            const bool known = std::any_of(sensors.begin(), sensors.end(),
                                           [&](const SensorMeta& s) { return s.sensor_id == f.sensor_id; });
            if (!known) throw std::invalid_argument("fault references unknown sensor id " +
                                                    std::to_string(f.sensor_id));
        }
    }
};

/// Digital map of the configured scenario geometry. Sidewalk bands count as
/// plausible surface at the intersection so that pedestrians are not
/// penalized by the road-map check.
inline DigitalMap build_map(const ScenarioConfig& cfg) {
    if (cfg.kind == ScenarioKind::Highway) {
        const auto& h = cfg.highway;
        const double road_width = h.lanes * h.lane_width;
        const double x0 = -h.margin, x1 = h.length + h.margin;
        DigitalMap map(x0, -2.0, 1.0, static_cast<int>(std::ceil(x1 - x0)),
                       static_cast<int>(std::ceil(road_width + 4.0)), h.lanes, h.lane_width);
        map.mark_road_rect(x0, 0.0, x1, road_width);
        return map;
    }
    const auto& isec = cfg.intersection;
    const double ext = isec.leg_length + 10.0;
    const int n = static_cast<int>(std::ceil(2.0 * ext));
    DigitalMap map(-ext, -ext, 1.0, n, n, 2, isec.road_half_width);
    const double band = isec.sidewalk_offset + 1.5;
    map.mark_road_rect(-ext, -band, ext, band);
    map.mark_road_rect(-band, -ext, band, ext);
    return map;
}

}  // namespace credence
