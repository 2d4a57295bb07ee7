#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "credence/core/types.hpp"

namespace credence {

/// The eleven surface points checked against sensor coverage: the eight box
/// corners, the center, and the mid-height midpoints of the front and rear
/// faces.
using CheckPoints = std::array<Vec3, 11>;

inline Mat3 yaw_pitch_rotation(double yaw, double pitch) {
    return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
            Eigen::AngleAxisd(-pitch, Vec3::UnitY()))
        .toRotationMatrix();
}

inline CheckPoints bounding_box_points(const StateVector& state, const Dimensions& dims) {
    const Vec3 c = state.position();
    const double hl = 0.5 * dims.length;
    const double hw = 0.5 * dims.width;
    const double hh = 0.5 * dims.height;
    const double ch = std::cos(dims.heading);
    const double sh = std::sin(dims.heading);
    auto world = [&](double lx, double ly, double lz) {
        return Vec3(c.x() + ch * lx - sh * ly, c.y() + sh * lx + ch * ly, c.z() + lz);
    };
    CheckPoints pts;
    int k = 0;
    for (double sx : {-1.0, 1.0})
        for (double sy : {-1.0, 1.0})
            for (double sz : {-1.0, 1.0}) pts[k++] = world(sx * hl, sy * hw, sz * hh);
    pts[8] = c;
    pts[9] = world(hl, 0.0, 0.0);   // front mid, at center height
    pts[10] = world(-hl, 0.0, 0.0); // rear mid
    return pts;
}

/// Point coordinates in the sensor frame (x boresight, y left, z up).
inline Vec3 to_sensor_frame(const Vec3& p, const SensorMeta& sensor) {
    return yaw_pitch_rotation(sensor.yaw, sensor.pitch).transpose() * (p - sensor.mount);
}

struct SphericalCoords {
    double range;
    double azimuth;
    double elevation;
};

inline SphericalCoords spherical_in_sensor_frame(const Vec3& p, const SensorMeta& sensor) {
    const Vec3 s = to_sensor_frame(p, sensor);
    const double range = s.norm();
    const double az = std::atan2(s.y(), s.x());
    const double el = std::atan2(s.z(), std::hypot(s.x(), s.y()));
    return {range, az, el};
}

inline bool point_in_fov(const Vec3& p, const SensorMeta& sensor) {
    const auto sph = spherical_in_sensor_frame(p, sensor);
    return sph.range <= sensor.fov.range &&
           std::abs(sph.azimuth) <= 0.5 * sensor.fov.horizontal &&
           std::abs(sph.elevation) <= 0.5 * sensor.fov.vertical;
}

/// True iff at least one of the points lies inside the sensor cone.
inline bool in_fov(std::span<const Vec3> points, const SensorMeta& sensor) {
    return std::any_of(points.begin(), points.end(),
                       [&](const Vec3& p) { return point_in_fov(p, sensor); });
}

inline bool in_fov(const CheckPoints& points, const SensorMeta& sensor) {
    return in_fov(std::span<const Vec3>(points.data(), points.size()), sensor);
}

/// Componentwise distance of the object center to the FoV boundary. Each
/// component is zero when the corresponding constraint is satisfied; the
/// angular components are expressed in radians.
struct FovDistance {
    double range = 0.0;
    double azimuth = 0.0;
    double elevation = 0.0;
};

inline FovDistance fov_distance(const StateVector& state, const SensorMeta& sensor) {
    const auto sph = spherical_in_sensor_frame(state.position(), sensor);
    FovDistance d;
    d.range = std::max(0.0, sph.range - sensor.fov.range);
    d.azimuth = std::max(0.0, std::abs(sph.azimuth) - 0.5 * sensor.fov.horizontal);
    d.elevation = std::max(0.0, std::abs(sph.elevation) - 0.5 * sensor.fov.vertical);
    return d;
}

/// Oriented bounding box, yaw-only orientation.
struct Obb {
    Vec3 center = Vec3::Zero();
    double heading = 0.0;
    Vec3 half = Vec3::Zero();

    static Obb of(const StateVector& state, const Dimensions& dims) {
        return {state.position(), dims.heading,
                Vec3(0.5 * dims.length, 0.5 * dims.width, 0.5 * dims.height)};
    }
};

/// Slab test for a segment [a, b] against an oriented box.
inline bool segment_intersects_obb(const Vec3& a, const Vec3& b, const Obb& box) {
    const double ch = std::cos(box.heading);
    const double sh = std::sin(box.heading);
    auto local = [&](const Vec3& p) {
        const Vec3 d = p - box.center;
        return Vec3(ch * d.x() + sh * d.y(), -sh * d.x() + ch * d.y(), d.z());
    };
    const Vec3 p0 = local(a);
    const Vec3 p1 = local(b);
    const Vec3 d = p1 - p0;
    double tmin = 0.0, tmax = 1.0;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(d[i]) < 1e-12) {
            if (std::abs(p0[i]) > box.half[i]) return false;
        } else {
            double t1 = (-box.half[i] - p0[i]) / d[i];
            double t2 = (box.half[i] - p0[i]) / d[i];
            if (t1 > t2) std::swap(t1, t2);
            tmin = std::max(tmin, t1);
            tmax = std::min(tmax, t2);
            if (tmin > tmax) return false;
        }
    }
    return true;
}

/// True iff at least one of the eleven check points of the target box has an
/// unobstructed straight segment to the sensor mount. Obstruction means the
/// segment crosses a blocker's oriented bounding box.
inline bool line_of_sight(const StateVector& state, const Dimensions& dims,
                          std::span<const Obb> blockers, const SensorMeta& sensor) {
    const CheckPoints pts = bounding_box_points(state, dims);
    for (const Vec3& p : pts) {
        bool blocked = false;
        for (const Obb& box : blockers) {
            if (segment_intersects_obb(sensor.mount, p, box)) {
                blocked = true;
                break;
            }
        }
        if (!blocked) return true;
    }
    return false;
}

inline bool line_of_sight(const LocalObject& target, std::span<const LocalObject> blockers,
                          const SensorMeta& sensor) {
    std::vector<Obb> boxes;
    boxes.reserve(blockers.size());
    for (const LocalObject& b : blockers) boxes.push_back(Obb::of(b.state, b.dims));
    return line_of_sight(target.state, target.dims, boxes, sensor);
}

}  // namespace credence
