#pragma once

#include <cmath>
#include <vector>

#include "credence/core/geometry.hpp"
#include "credence/core/map.hpp"
#include "credence/core/types.hpp"
#include "credence/sim/rng.hpp"
#include "credence/sim/scenario.hpp"
#include "credence/sim/traffic.hpp"
#include "credence/tracker/tracker.hpp"

namespace credence {

namespace detail {

inline bool truth_line_of_sight(const TruthEntry& target, const std::vector<TruthEntry>& all,
                                const SensorMeta& sensor) {
    std::vector<Obb> blockers;
    for (const TruthEntry& e : all) {
        if (e.id == target.id) continue;
        blockers.push_back(Obb::of(e.state, e.dims));
    }
    return line_of_sight(target.state, target.dims, blockers, sensor);
}

}  // namespace detail

/// Parametric detection generator for one sensor and one time step.
///
/// Truth objects inside the non-occluded physical FoV are detected with
/// probability pd; objects between the regular range and the over-range
/// extension respond with the reduced over-range probability inside the main
/// lobe. False alarms arrive at resolution_cells * pfa per scan. An active
/// fault modifies the physical sensing geometry: a misoriented sensor
/// physically looks elsewhere while reporting in its own frame, a blind spot
/// suppresses detections inside the wedge.
inline std::vector<Detection> sense(const std::vector<TruthEntry>& truth,
                                    const SensorMeta& sensor, const FaultSpec* fault,
                                    const NoiseSpec& noise, const ClutterSpec& clutter,
                                    const DigitalMap& map, RngStream& rng, double timestamp) {
    SensorMeta physical = sensor;
    const bool faulted = fault != nullptr && fault->sensor_id == sensor.sensor_id;
    if (faulted && fault->kind == FaultSpec::Kind::Misorientation)
        physical.yaw = normalize_angle(physical.yaw + fault->delta_yaw);

    const Mat3 rot = yaw_pitch_rotation(physical.yaw, physical.pitch);
    const Mat3 rot_t = rot.transpose();

    std::vector<Detection> out;
    Mat6 meas_noise = Mat6::Zero();
    meas_noise.topLeftCorner<3, 3>() =
        noise.position_sigma * noise.position_sigma * Mat3::Identity();
    meas_noise.bottomRightCorner<3, 3>() =
        noise.velocity_sigma * noise.velocity_sigma * Mat3::Identity();

    for (const TruthEntry& e : truth) {
        const auto sph = spherical_in_sensor_frame(e.state.position(), physical);
        if (faulted && fault->kind == FaultSpec::Kind::BlindSpot &&
            std::abs(normalize_angle(sph.azimuth - fault->blind_center)) <=
                0.5 * fault->blind_width)
            continue;

        double pd = 0.0;
        const CheckPoints pts = bounding_box_points(e.state, e.dims);
        if (in_fov(pts, physical)) {
            pd = sensor.detection_prob;
        } else if (sensor.over_range.range_factor > 1.0 &&
                   sph.range <= sensor.fov.range * sensor.over_range.range_factor &&
                   std::abs(sph.azimuth) <= 0.5 * sensor.over_range.azimuth &&
                   std::abs(sph.elevation) <= 0.5 * sensor.fov.vertical) {
            pd = sensor.over_range.detection_prob;
        }
        if (pd <= 0.0) continue;
        if (!detail::truth_line_of_sight(e, truth, physical)) continue;
        if (rng.uniform() >= pd) continue;

        Detection d;
        d.sensor_id = sensor.sensor_id;
        d.timestamp = timestamp;
        const Vec3 p_s = rot_t * (e.state.position() - physical.mount);
        const Vec3 v_s = rot_t * e.state.velocity();
        d.position = p_s + Vec3(rng.normal(0.0, noise.position_sigma),
                                rng.normal(0.0, noise.position_sigma),
                                rng.normal(0.0, noise.position_sigma));
        d.velocity = v_s + Vec3(rng.normal(0.0, noise.velocity_sigma),
                                rng.normal(0.0, noise.velocity_sigma),
                                rng.normal(0.0, noise.velocity_sigma));
        d.noise = meas_noise;
        Dimensions ext = e.dims;
        ext.length = std::max(0.2, ext.length + rng.normal(0.0, noise.extent_sigma));
        ext.width = std::max(0.2, ext.width + rng.normal(0.0, noise.extent_sigma));
        ext.height = std::max(0.2, ext.height + rng.normal(0.0, noise.extent_sigma));
        ext.heading = normalize_angle(e.dims.heading - physical.yaw +
                                      rng.normal(0.0, noise.heading_sigma));
        d.extent = ext;
        out.push_back(std::move(d));
    }

    // False alarms, drawn from the FoV intersected with the clutter band.
    const int n_fa = rng.poisson(clutter.resolution_cells * sensor.false_alarm_rate);
    for (int k = 0; k < n_fa; ++k) {
        for (int attempt = 0; attempt < 50; ++attempt) {
            const double range = rng.uniform(clutter.min_range_frac * sensor.fov.range,
                                             sensor.fov.range);
            const double az = rng.uniform(-0.5 * sensor.fov.horizontal,
                                          0.5 * sensor.fov.horizontal);
            const double z = rng.uniform(clutter.z_min, clutter.z_max);
            Vec3 pos = physical.mount + rot * Vec3(range * std::cos(az),
                                                   range * std::sin(az), 0.0);
            pos.z() = z;
            const auto sph = spherical_in_sensor_frame(pos, physical);
            if (std::abs(sph.elevation) > 0.5 * sensor.fov.vertical ||
                sph.range > sensor.fov.range)
                continue;
            if (clutter.road_corridor && !map.road_at(pos.x(), pos.y())) continue;
            Detection d;
            d.sensor_id = sensor.sensor_id;
            d.timestamp = timestamp;
            d.position = rot_t * (pos - physical.mount);
            d.velocity = Vec3(rng.normal(0.0, clutter.velocity_sigma),
                              rng.normal(0.0, clutter.velocity_sigma),
                              rng.normal(0.0, clutter.velocity_sigma));
            d.noise = meas_noise;
            d.extent = Dimensions{2.0, 1.0, 1.0, 0.0};
            out.push_back(std::move(d));
            break;
        }
    }
    return out;
}

}  // namespace credence
