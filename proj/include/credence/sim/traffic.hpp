#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "credence/core/types.hpp"
#include "credence/sim/rng.hpp"
#include "credence/sim/scenario.hpp"

namespace credence {

enum class ObjectClass { Car, Truck, Bus, Cyclist, Pedestrian };

inline Dimensions class_dims(ObjectClass c) {
    switch (c) {
        case ObjectClass::Car: return {4.5, 1.9, 1.5, 0.0};
        case ObjectClass::Truck: return {12.0, 2.5, 3.8, 0.0};
        case ObjectClass::Bus: return {13.0, 2.55, 3.2, 0.0};
        case ObjectClass::Cyclist: return {1.8, 0.6, 1.7, 0.0};
        case ObjectClass::Pedestrian: return {0.6, 0.6, 1.7, 0.0};
    }
    return {4.5, 1.9, 1.5, 0.0};
}

struct TruthPose {
    Vec3 position;
    Vec3 velocity;
    double heading;
};

/// Piecewise-linear trajectory with per-segment constant speed; repeated
/// waypoints encode stop dwells. Position is continuous by construction.
struct GroundTruthObject {
    int id = 0;
    ObjectClass cls = ObjectClass::Car;
    Dimensions dims = class_dims(ObjectClass::Car);
    std::vector<double> times;
    std::vector<Vec3> points;

    double spawn_time() const { return times.front(); }
    double despawn_time() const { return times.back(); }

    std::optional<TruthPose> pose_at(double t) const {
        if (times.size() < 2 || t < times.front() || t > times.back()) return std::nullopt;
        size_t k = 1;
        while (k + 1 < times.size() && t > times[k]) ++k;
        const double t0 = times[k - 1], t1 = times[k];
        const Vec3 a = points[k - 1], b = points[k];
        const double span = t1 - t0;
        TruthPose pose;
        if (span <= 0.0) {
            pose.position = a;
            pose.velocity = Vec3::Zero();
        } else {
            const double w = (t - t0) / span;
            pose.position = a + w * (b - a);
            pose.velocity = (b - a) / span;
        }
        if (pose.velocity.head<2>().norm() > 1e-6)
            pose.heading = std::atan2(pose.velocity.y(), pose.velocity.x());
        else
            pose.heading = heading_hint(k);
        return pose;
    }

  private:
    double heading_hint(size_t k) const {
        // Heading during a stop dwell: direction of the next moving segment.
        for (size_t j = k; j < points.size(); ++j) {
            const Vec3 d = points[j] - points[j - 1];
            if (d.head<2>().norm() > 1e-6) return std::atan2(d.y(), d.x());
        }
        for (size_t j = k; j-- > 1;) {
            const Vec3 d = points[j] - points[j - 1];
            if (d.head<2>().norm() > 1e-6) return std::atan2(d.y(), d.x());
        }
        return 0.0;
    }
};

struct TruthEntry {
    int id = 0;
    ObjectClass cls = ObjectClass::Car;
    StateVector state;
    Dimensions dims;
};

inline std::vector<TruthEntry> truth_snapshot(const std::vector<GroundTruthObject>& objects,
                                              double t) {
    std::vector<TruthEntry> out;
    for (const GroundTruthObject& g : objects) {
        const auto pose = g.pose_at(t);
        if (!pose) continue;
        TruthEntry e;
        e.id = g.id;
        e.cls = g.cls;
        e.state = {pose->position.x(), pose->position.y(), pose->position.z(),
                   pose->velocity.x(), pose->velocity.y(), pose->velocity.z()};
        e.dims = g.dims;
        e.dims.heading = normalize_angle(pose->heading);
        out.push_back(e);
    }
    return out;
}

namespace detail {

inline ObjectClass sample_vehicle_class(RngStream& rng, const TrafficSpec& traffic,
                                        bool intersection) {
    const double u = rng.uniform();
    if (u < traffic.car_fraction) return ObjectClass::Car;
    if (u < traffic.car_fraction + traffic.truck_fraction) return ObjectClass::Truck;
    return intersection ? ObjectClass::Cyclist : ObjectClass::Bus;
}

/// Appends a circular-arc connector approximated by short chords.
inline void append_arc(std::vector<Vec3>& pts, const Vec3& center, double radius,
                       double a0, double a1, int segments = 6) {
    for (int s = 1; s <= segments; ++s) {
        const double a = a0 + (a1 - a0) * s / segments;
        pts.emplace_back(center.x() + radius * std::cos(a), center.y() + radius * std::sin(a),
                         pts.back().z());
    }
}

inline GroundTruthObject make_waypoint_object(int id, ObjectClass cls, double spawn,
                                              const std::vector<Vec3>& pts,
                                              const std::vector<double>& speeds,
                                              double stop_after_m, double stop_dwell) {
    // speeds[i] applies to segment pts[i] -> pts[i+1]
    GroundTruthObject g;
    g.id = id;
    g.cls = cls;
    g.dims = class_dims(cls);
    g.times.push_back(spawn);
    g.points.push_back(pts.front());
    double dist = 0.0;
    bool stopped = stop_dwell <= 0.0;
    for (size_t i = 1; i < pts.size(); ++i) {
        const double len = (pts[i] - pts[i - 1]).norm();
        const double v = speeds[i - 1];
        g.times.push_back(g.times.back() + len / v);
        g.points.push_back(pts[i]);
        dist += len;
        if (!stopped && dist >= stop_after_m) {
            g.times.push_back(g.times.back() + stop_dwell);
            g.points.push_back(pts[i]);
            stopped = true;
        }
    }
    return g;
}

}  // namespace detail

/// Highway mode: per-lane Poisson arrivals at the upstream margin, constant
/// per-vehicle speed around the lane's base speed, no lane changes. Lane
/// base speeds rise with the lane index; trucks and buses keep to the two
/// outermost-right lanes.
inline std::vector<GroundTruthObject> generate_highway_traffic(const ScenarioConfig& cfg) {
    const auto& h = cfg.highway;
    const auto& tr = cfg.traffic;
    std::vector<GroundTruthObject> out;
    const double t_begin = -cfg.warmup;
    const double t_end = cfg.duration;
    const double x0 = -h.margin;
    const double x1 = h.length + h.margin;
    int next_id = 1;
    for (int lane = 0; lane < h.lanes; ++lane) {
        RngStream rng(cfg.seed, rng_purpose::kTraffic, static_cast<uint64_t>(lane));
        const double lane_speed = 25.0 + 4.0 * lane;
        const double y = (lane + 0.5) * h.lane_width;
        // Arrivals start before the window so the road is already populated.
        double t = t_begin - (x1 - x0) / lane_speed;
        double last_arrival = -1e9;
        while (true) {
            t += rng.exponential(std::max(1e-9, tr.arrival_rate));
            if (t > t_end) break;
            if (t - last_arrival < tr.min_headway_s) t = last_arrival + tr.min_headway_s;
            if (t > t_end) break;
            last_arrival = t;
            ObjectClass cls = detail::sample_vehicle_class(rng, tr, false);
            if (lane >= 2 && cls != ObjectClass::Car) cls = ObjectClass::Car;
            double speed = lane_speed + rng.uniform(-tr.speed_jitter, tr.speed_jitter);
            if (cls != ObjectClass::Car) speed = std::min(speed, 25.0);
            GroundTruthObject g;
            g.id = 1000 * (lane + 1) + next_id++;
            g.cls = cls;
            g.dims = class_dims(cls);
            const double z = 0.5 * g.dims.height;
            g.times = {t, t + (x1 - x0) / speed};
            g.points = {Vec3(x0, y, z), Vec3(x1, y, z)};
            out.push_back(std::move(g));
        }
    }
    return out;
}

/// Intersection mode: vehicles arrive on the four legs, optionally stop at
/// the stop line, then continue straight or turn along circular-arc
/// connectors; pedestrians walk L-shaped sidewalk paths around the corners.
inline std::vector<GroundTruthObject> generate_intersection_traffic(const ScenarioConfig& cfg) {
    const auto& isec = cfg.intersection;
    const auto& tr = cfg.traffic;
    std::vector<GroundTruthObject> out;
    const double t_begin = -cfg.warmup;
    const double t_end = cfg.duration;
    const double lane = 0.5 * isec.road_half_width;  // right-hand lane center offset
    const double stop = isec.stop_line;
    const double leg = isec.leg_length;
    int next_id = 1;

    // Legs indexed by the approach travel heading: 0.5*pi*leg_i.
    for (int leg_i = 0; leg_i < 4; ++leg_i) {
        RngStream rng(cfg.seed, rng_purpose::kTraffic, 10 + static_cast<uint64_t>(leg_i));
        const double ca = 0.5 * kPi * leg_i;
        const double ch = std::cos(ca), sh = std::sin(ca);
        // forward along the travel direction, right towards the curb
        auto frame = [&](double forward, double right) {
            return Vec3(forward * ch + right * sh, forward * sh - right * ch, 0.9);
        };
        const Vec3 fwd(ch, sh, 0.0);
        const Vec3 rightv(sh, -ch, 0.0);
        double t = t_begin - 40.0;
        double last_arrival = -1e9;
        while (true) {
            t += rng.exponential(std::max(1e-9, tr.arrival_rate));
            if (t - last_arrival < 3.0) t = last_arrival + 3.0;
            if (t > t_end) break;
            last_arrival = t;
            const ObjectClass cls = detail::sample_vehicle_class(rng, tr, true);
            const double cruise = cls == ObjectClass::Cyclist ? 5.0 : tr.cruise_speed;
            const double vturn = cls == ObjectClass::Cyclist ? 4.0 : tr.turn_speed;
            const double u_turn = rng.uniform();
            const double dwell = (cls != ObjectClass::Cyclist && rng.uniform() < tr.stop_probability)
                                     ? rng.uniform(0.5, tr.max_stop_s)
                                     : 0.0;

            std::vector<Vec3> pts;
            std::vector<double> speeds;
            pts.push_back(frame(-leg, lane));
            pts.push_back(frame(-stop, lane));
            speeds.push_back(cruise);
            if (u_turn < 0.25 && cls != ObjectClass::Cyclist) {
                // Right turn: quarter arc, exit travels along +right.
                const Vec3 center = frame(-stop, stop);
                const double radius = stop - lane;
                const double a0 =
                    std::atan2(pts.back().y() - center.y(), pts.back().x() - center.x());
                detail::append_arc(pts, center, radius, a0, a0 - 0.5 * kPi);
                for (int s = 0; s < 6; ++s) speeds.push_back(vturn);
                pts.push_back(pts.back() + (leg - stop) * rightv);
                speeds.push_back(cruise);
            } else if (u_turn < 0.5 && cls != ObjectClass::Cyclist) {
                // Left turn: wide quarter arc, exit travels along -right.
                const Vec3 center = frame(-stop, -stop);
                const double radius = stop + lane;
                const double a0 =
                    std::atan2(pts.back().y() - center.y(), pts.back().x() - center.x());
                detail::append_arc(pts, center, radius, a0, a0 + 0.5 * kPi);
                for (int s = 0; s < 6; ++s) speeds.push_back(vturn);
                pts.push_back(pts.back() - (leg - stop) * rightv);
                speeds.push_back(cruise);
            } else {
                pts.push_back(frame(leg, lane));
                speeds.push_back(cruise);
            }
            GroundTruthObject g = detail::make_waypoint_object(
                10000 * (leg_i + 1) + next_id++, cls, t, pts, speeds, leg - stop, dwell);
            const double z = 0.5 * g.dims.height;
            for (Vec3& p : g.points) p.z() = z;
            out.push_back(std::move(g));
        }
    }

    // Pedestrians on L-shaped sidewalk walks around the four corners.
    if (tr.pedestrian_rate > 0.0) {
        int ped_id = 1;
        for (int corner = 0; corner < 4; ++corner) {
            RngStream rng(cfg.seed, rng_purpose::kTraffic, 20 + static_cast<uint64_t>(corner));
            const double sx = (corner == 0 || corner == 3) ? 1.0 : -1.0;
            const double sy = (corner < 2) ? 1.0 : -1.0;
            const double off = isec.sidewalk_offset;
            double t = t_begin - 60.0;
            while (true) {
                t += rng.exponential(tr.pedestrian_rate);
                if (t > t_end) break;
                const bool inward = rng.uniform() < 0.5;
                const Vec3 a(sx * off, sy * leg, 0.85);
                const Vec3 b(sx * off, sy * off, 0.85);
                const Vec3 c(sx * leg, sy * off, 0.85);
                const std::vector<Vec3> pts =
                    inward ? std::vector<Vec3>{a, b, c} : std::vector<Vec3>{c, b, a};
                out.push_back(detail::make_waypoint_object(90000 + ped_id++,
                                                           ObjectClass::Pedestrian, t, pts,
                                                           {1.4, 1.4}, 1e9, 0.0));
            }
        }
    }
    return out;
}

inline std::vector<GroundTruthObject> generate_traffic(const ScenarioConfig& cfg) {
    return cfg.kind == ScenarioKind::Highway ? generate_highway_traffic(cfg)
                                             : generate_intersection_traffic(cfg);
}

}  // namespace credence
