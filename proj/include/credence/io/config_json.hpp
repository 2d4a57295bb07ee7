#pragma once

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "credence/io/hash.hpp"
#include "credence/sim/scenario.hpp"

namespace credence {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cfgio {

using nlohmann::json;

constexpr int kConfigSchemaVersion = 1;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

inline double angle_deg(const json& j, const char* key, double fallback_deg) {
    return deg2rad(get_or<double>(j, key, fallback_deg));
}

inline SensorMeta parse_sensor(const json& j, size_t idx) {
    const std::string where = "sensors[" + std::to_string(idx) + "]";
    if (!j.contains("id")) throw ConfigError(where + ": missing 'id'");
    SensorMeta s;
    s.sensor_id = j.at("id").get<int>();
    if (j.contains("mount")) {
        const auto& m = j.at("mount");
        if (!m.is_array() || m.size() != 3)
            throw ConfigError(where + ".mount: expected [x, y, z]");
        s.mount = Vec3(m[0].get<double>(), m[1].get<double>(), m[2].get<double>());
    }
    s.yaw = angle_deg(j, "yaw_deg", 0.0);
    s.pitch = angle_deg(j, "pitch_deg", 0.0);
    if (j.contains("fov")) {
        const auto& f = j.at("fov");
        s.fov.range = get_or<double>(f, "range_m", 90.0);
        s.fov.horizontal = angle_deg(f, "horizontal_deg", 30.0);
        s.fov.vertical = angle_deg(f, "vertical_deg", 8.0);
    }
    s.trust = get_or<double>(j, "trust", 0.9);
    s.detection_prob = get_or<double>(j, "detection_prob", 0.9);
    s.false_alarm_rate = get_or<double>(j, "false_alarm_rate", 1e-6);
    s.confirm_threshold = get_or<double>(j, "confirm_threshold", 0.0);
    s.deletion_threshold = get_or<double>(j, "deletion_threshold", 0.0);
    if (j.contains("over_range")) {
        const auto& o = j.at("over_range");
        s.over_range.range_factor = get_or<double>(o, "range_factor", 1.0);
        s.over_range.detection_prob = get_or<double>(o, "detection_prob", 0.0);
        s.over_range.azimuth = angle_deg(o, "azimuth_deg", 0.0);
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return s;
}

inline FaultSpec parse_fault(const json& j, const ScenarioConfig& cfg) {
    if (!j.contains("type")) throw ConfigError("faults[]: missing 'type'");
    const std::string type = j.at("type").get<std::string>();
    FaultSpec f;
    f.sensor_id = get_or<int>(j, "sensor_id", 0);
    if (type == "misorientation") {
        f.kind = FaultSpec::Kind::Misorientation;
        f.delta_yaw = angle_deg(j, "delta_yaw_deg", 0.0);
    } else if (type == "tracker_threshold") {
        f.kind = FaultSpec::Kind::TrackerThreshold;
        if (j.contains("faulty_threshold")) {
            f.faulty_threshold = j.at("faulty_threshold").get<double>();
        } else {
            const double factor = get_or<double>(j, "threshold_factor", 1.0 / 3.0);
            for (const SensorMeta& s : cfg.sensors)
                if (s.sensor_id == f.sensor_id) f.faulty_threshold = factor * s.confirm_threshold;
            if (f.faulty_threshold == 0.0)
                throw ConfigError("faults[]: tracker_threshold fault on unknown sensor");
        }
    } else if (type == "blind_spot") {
        f.kind = FaultSpec::Kind::BlindSpot;
        f.blind_center = angle_deg(j, "center_deg", 0.0);
        f.blind_width = angle_deg(j, "width_deg", 0.0);
    } else {
        throw ConfigError("faults[]: unknown fault type '" + type + "'");
    }
    return f;
}

}  // namespace cfgio

/// Parses a scenario configuration document. Angles are given in degrees,
/// lengths in metres. Throws ConfigError with the offending field path.
inline ScenarioConfig parse_scenario_config(const std::string& text, uint64_t* hash_out = nullptr) {
    using cfgio::get_or;
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    const int version = get_or<int>(j, "schema_version", -1);
    if (version != cfgio::kConfigSchemaVersion)
        throw ConfigError("config schema_version must be " +
                          std::to_string(cfgio::kConfigSchemaVersion));

    ScenarioConfig cfg;
    const std::string kind = get_or<std::string>(j, "scenario", "highway");
    if (kind == "highway") cfg.kind = ScenarioKind::Highway;
    else if (kind == "intersection") cfg.kind = ScenarioKind::Intersection;
    else throw ConfigError("scenario must be 'highway' or 'intersection'");

    if (j.contains("highway")) {
        const auto& h = j.at("highway");
        cfg.highway.lanes = get_or<int>(h, "lanes", cfg.highway.lanes);
        cfg.highway.lane_width = get_or<double>(h, "lane_width_m", cfg.highway.lane_width);
        cfg.highway.length = get_or<double>(h, "length_m", cfg.highway.length);
        cfg.highway.margin = get_or<double>(h, "margin_m", cfg.highway.margin);
    }
    if (j.contains("intersection")) {
        const auto& v = j.at("intersection");
        cfg.intersection.leg_length = get_or<double>(v, "leg_length_m", cfg.intersection.leg_length);
        cfg.intersection.road_half_width =
            get_or<double>(v, "road_half_width_m", cfg.intersection.road_half_width);
        cfg.intersection.sidewalk_offset =
            get_or<double>(v, "sidewalk_offset_m", cfg.intersection.sidewalk_offset);
        cfg.intersection.stop_line = get_or<double>(v, "stop_line_m", cfg.intersection.stop_line);
    }

    if (!j.contains("sensors") || !j.at("sensors").is_array() || j.at("sensors").empty())
        throw ConfigError("config needs a non-empty 'sensors' array");
    for (size_t i = 0; i < j.at("sensors").size(); ++i)
        cfg.sensors.push_back(cfgio::parse_sensor(j.at("sensors")[i], i));

    if (j.contains("traffic")) {
        const auto& t = j.at("traffic");
        cfg.traffic.arrival_rate = get_or<double>(t, "arrival_rate_hz", cfg.traffic.arrival_rate);
        cfg.traffic.pedestrian_rate =
            get_or<double>(t, "pedestrian_rate_hz", cfg.traffic.pedestrian_rate);
        cfg.traffic.car_fraction = get_or<double>(t, "car_fraction", cfg.traffic.car_fraction);
        cfg.traffic.truck_fraction = get_or<double>(t, "truck_fraction", cfg.traffic.truck_fraction);
        cfg.traffic.speed_jitter = get_or<double>(t, "speed_jitter", cfg.traffic.speed_jitter);
        cfg.traffic.min_headway_s = get_or<double>(t, "min_headway_s", cfg.traffic.min_headway_s);
        cfg.traffic.cruise_speed = get_or<double>(t, "cruise_speed", cfg.traffic.cruise_speed);
        cfg.traffic.turn_speed = get_or<double>(t, "turn_speed", cfg.traffic.turn_speed);
        cfg.traffic.stop_probability =
            get_or<double>(t, "stop_probability", cfg.traffic.stop_probability);
        cfg.traffic.max_stop_s = get_or<double>(t, "max_stop_s", cfg.traffic.max_stop_s);
    }
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        cfg.noise.position_sigma = get_or<double>(n, "position_sigma_m", cfg.noise.position_sigma);
        cfg.noise.velocity_sigma = get_or<double>(n, "velocity_sigma", cfg.noise.velocity_sigma);
        cfg.noise.extent_sigma = get_or<double>(n, "extent_sigma_m", cfg.noise.extent_sigma);
        cfg.noise.heading_sigma = get_or<double>(n, "heading_sigma_rad", cfg.noise.heading_sigma);
    }
    if (j.contains("clutter")) {
        const auto& c = j.at("clutter");
        cfg.clutter.resolution_cells =
            get_or<double>(c, "resolution_cells", cfg.clutter.resolution_cells);
        cfg.clutter.road_corridor = get_or<bool>(c, "road_corridor", cfg.clutter.road_corridor);
        cfg.clutter.z_min = get_or<double>(c, "z_min_m", cfg.clutter.z_min);
        cfg.clutter.z_max = get_or<double>(c, "z_max_m", cfg.clutter.z_max);
        cfg.clutter.min_range_frac = get_or<double>(c, "min_range_frac", cfg.clutter.min_range_frac);
        cfg.clutter.velocity_sigma =
            get_or<double>(c, "velocity_sigma", cfg.clutter.velocity_sigma);
    }
    if (j.contains("tracker")) {
        const auto& t = j.at("tracker");
        cfg.tracker.gate = get_or<double>(t, "gate", cfg.tracker.gate);
        cfg.tracker.process_noise = get_or<double>(t, "process_noise", cfg.tracker.process_noise);
        cfg.tracker.max_coasting = get_or<int>(t, "max_coasting", cfg.tracker.max_coasting);
        cfg.tracker.confirm_factor = get_or<double>(t, "confirm_factor", cfg.tracker.confirm_factor);
        cfg.tracker.deletion_factor =
            get_or<double>(t, "deletion_factor", cfg.tracker.deletion_factor);
    }
    if (j.contains("fusion")) {
        const auto& f = j.at("fusion");
        cfg.fusion.cluster_gate = get_or<double>(f, "cluster_gate", cfg.fusion.cluster_gate);
        cfg.fusion.frame_gate = get_or<double>(f, "frame_gate_m", cfg.fusion.frame_gate);
        cfg.fusion.smoothing_alpha =
            get_or<double>(f, "smoothing_alpha", cfg.fusion.smoothing_alpha);
    }
    if (j.contains("limits")) {
        const auto& l = j.at("limits");
        auto& lim = cfg.fusion.limits;
        lim.max_z = get_or<double>(l, "max_z_m", lim.max_z);
        lim.max_width = get_or<double>(l, "max_width_m", lim.max_width);
        lim.max_length = get_or<double>(l, "max_length_m", lim.max_length);
        lim.max_height = get_or<double>(l, "max_height_m", lim.max_height);
        lim.max_speed = get_or<double>(l, "max_speed", lim.max_speed);
        lim.vru_extent = get_or<double>(l, "vru_extent_m", lim.vru_extent);
        lim.vru_speed = get_or<double>(l, "vru_speed", lim.vru_speed);
        lim.lane_width = get_or<double>(l, "lane_width_m", lim.lane_width);
    }

    cfg.sample_period = get_or<double>(j, "sample_period_s", cfg.sample_period);
    cfg.duration = get_or<double>(j, "duration_s", cfg.duration);
    cfg.warmup = get_or<double>(j, "warmup_s", cfg.warmup);
    cfg.seed = get_or<uint64_t>(j, "seed", cfg.seed);

    if (j.contains("analysis")) {
        const auto& a = j.at("analysis");
        cfg.analysis.interval_s = get_or<double>(a, "interval_s", cfg.analysis.interval_s);
        if (a.contains("stat_sensors"))
            for (const auto& s : a.at("stat_sensors"))
                cfg.analysis.stat_sensors.push_back(s.get<int>());
        if (a.contains("bins")) {
            const auto& b = a.at("bins");
            const std::string bk = get_or<std::string>(b, "kind", "longitudinal");
            cfg.analysis.bins.kind =
                bk == "grid" ? BinSpec::Kind::GridXY : BinSpec::Kind::LongitudinalX;
            cfg.analysis.bins.x0 = get_or<double>(b, "x0", 0.0);
            cfg.analysis.bins.x1 = get_or<double>(b, "x1", 0.0);
            cfg.analysis.bins.y0 = get_or<double>(b, "y0", 0.0);
            cfg.analysis.bins.y1 = get_or<double>(b, "y1", 0.0);
            cfg.analysis.bins.size = get_or<double>(b, "size_m", 25.0);
        }
    }

    cfg.finalize();

    if (j.contains("faults"))
        for (const auto& f : j.at("faults")) cfg.faults.push_back(cfgio::parse_fault(f, cfg));

    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (hash_out != nullptr) *hash_out = fnv1a64(text);
    return cfg;
}

inline ScenarioConfig load_scenario_config(const std::string& path, uint64_t* hash_out = nullptr) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_scenario_config(buf.str(), hash_out);
}

}  // namespace credence
