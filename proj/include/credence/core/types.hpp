#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace credence {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

using SensorId = int;
using TrackId = int64_t;
using GlobalId = int64_t;

constexpr double kPi = 3.141592653589793238462643383279502884;

/// Wraps an angle to [-pi, pi).
inline double normalize_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Kinematic state in the global frame: position [m], velocity [m/s].
struct StateVector {
    double x = 0.0, y = 0.0, z = 0.0;
    double vx = 0.0, vy = 0.0, vz = 0.0;

    Vec3 position() const { return {x, y, z}; }
    Vec3 velocity() const { return {vx, vy, vz}; }
    double speed() const { return velocity().norm(); }

    Vec6 as_vec() const {
        Vec6 v;
        v << x, y, z, vx, vy, vz;
        return v;
    }
    static StateVector from_vec(const Vec6& v) {
        return {v[0], v[1], v[2], v[3], v[4], v[5]};
    }

    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) &&
               std::isfinite(vx) && std::isfinite(vy) && std::isfinite(vz);
    }
};

/// Box extents [m] plus heading [rad], heading normalized to [-pi, pi).
struct Dimensions {
    double length = 0.0;
    double width = 0.0;
    double height = 0.0;
    double heading = 0.0;

    bool valid() const {
        return length > 0.0 && width > 0.0 && height > 0.0 &&
               heading >= -kPi && heading < kPi;
    }
};

/// Track bookkeeping carried along with every reported object.
/// The score is a log-likelihood ratio; coasting means the track got no
/// measurement update at the current step.
struct TrackStatus {
    double score = 0.0;
    bool confirmed = false;
    bool coasting = false;
};

/// One sensor's tracked object. (sensor_id, track_id, timestamp) identifies
/// it uniquely within a LocalObjectList.
struct LocalObject {
    SensorId sensor_id = 0;
    TrackId track_id = 0;
    double timestamp = 0.0;
    StateVector state;
    Mat6 covariance = Mat6::Identity();
    Dimensions dims;
    TrackStatus status;
};

/// Synchronous set of local objects, grouped per sensor. All contained
/// objects carry the list timestamp.
struct LocalObjectList {
    double timestamp = 0.0;
    std::map<SensorId, std::vector<LocalObject>> sensors;

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& [id, v] : sensors) n += v.size();
        return n;
    }
};

/// Fused global object with existence probability and epistemic half-width.
struct SystemObject {
    GlobalId global_id = 0;
    double timestamp = 0.0;
    StateVector state;
    Mat6 covariance = Mat6::Identity();
    Dimensions dims;
    TrackStatus status;
    double p_exists = 0.5;
    double s_exists = 0.5;
    std::set<SensorId> contributors;
};

/// Dempster-Shafer mass triple over {exists, not-exists, unknown}.
struct BeliefMass {
    double m_exists = 0.0;
    double m_not_exists = 0.0;
    double m_unknown = 1.0;

    static BeliefMass vacuous() { return {0.0, 0.0, 1.0}; }

    double sum() const { return m_exists + m_not_exists + m_unknown; }

    bool valid(double tol = 1e-12) const {
        return m_exists >= -tol && m_not_exists >= -tol && m_unknown >= -tol &&
               std::abs(sum() - 1.0) <= tol;
    }
};

/// Cone-shaped field of view: range [m], horizontal and vertical opening
/// angles [rad], both full widths centered on the boresight.
struct FieldOfView {
    double range = 0.0;
    double horizontal = 0.0;
    double vertical = 0.0;
};

/// Parametric over-range response beyond the regular sensing range. A
/// range_factor of 1 disables it. The azimuth limits the effect to the
/// main lobe.
struct OverRange {
    double range_factor = 1.0;
    double detection_prob = 0.0;
    double azimuth = 0.0;
};

/// Static sensor description: mounting pose, coverage, trust and the
/// per-sensor detection/tracking parameters.
struct SensorMeta {
    SensorId sensor_id = 0;
    Vec3 mount = Vec3::Zero();
    double yaw = 0.0;
    double pitch = 0.0;
    FieldOfView fov;
    double trust = 0.9;
    double detection_prob = 0.9;
    double false_alarm_rate = 1e-6;
    double confirm_threshold = 0.0;
    double deletion_threshold = 0.0;
    OverRange over_range;

    void validate() const {
        if (!(fov.range > 0.0))
            throw std::invalid_argument("sensor fov range must be > 0");
        if (!(fov.horizontal > 0.0 && fov.horizontal <= 2.0 * kPi))
            throw std::invalid_argument("sensor horizontal fov must be in (0, 2pi]");
        if (!(fov.vertical > 0.0 && fov.vertical < kPi))
            throw std::invalid_argument("sensor vertical fov must be in (0, pi)");
        if (!(detection_prob > 0.0 && detection_prob <= 1.0))
            throw std::invalid_argument("sensor pd must be in (0, 1]");
        if (!(false_alarm_rate > 0.0))
            throw std::invalid_argument("sensor pfa must be > 0");
        if (!(trust > 0.0 && trust <= 1.0))
            throw std::invalid_argument("sensor trust must be in (0, 1]");
    }
};

inline bool symmetric_psd(const Mat6& m, double tol = 1e-9) {
    if (((m - m.transpose()).array().abs() > tol).any()) return false;
    Eigen::SelfAdjointEigenSolver<Mat6> es(m);
    return es.eigenvalues().minCoeff() >= -tol;
}

}  // namespace credence
