#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

#include "credence/core/geometry.hpp"
#include "credence/core/types.hpp"
#include "credence/tracker/assignment.hpp"

namespace credence {

/// Raw detection as delivered by a sensor, expressed in the sensor frame.
struct Detection {
    SensorId sensor_id = 0;
    double timestamp = 0.0;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Mat6 noise = Mat6::Identity();
    std::optional<Dimensions> extent;
};

/// Score-based track management parameters. The score increments derive from
/// the sensor's detection statistics: +log(pd/pfa) per hit and
/// log((1-pd)/(1-pfa)) per miss.
struct TrackerConfig {
    double confirm_threshold = 0.0;
    double deletion_threshold = 0.0;
    double initial_score = 0.0;
    double score_hit = 0.0;
    double score_miss = 0.0;
    double gate = 16.812;  // chi-square, 6 dof, 99%
    double process_noise = 0.5;
    int max_coasting = 5;
    double extent_smoothing = 0.3;

    static TrackerConfig from_rates(double pd, double pfa) {
        TrackerConfig c;
        const double hit = std::log(pd / pfa);
        c.score_hit = hit;
        c.score_miss = std::log((1.0 - pd) / (1.0 - pfa));
        c.initial_score = hit;
        c.confirm_threshold = 1.5 * hit;
        c.deletion_threshold = 0.85 * hit;
        return c;
    }

    void validate() const {
        if (!(confirm_threshold > deletion_threshold))
            throw std::invalid_argument("confirmation threshold must exceed deletion threshold");
    }
};

/// Internal filter track. State is [x y z vx vy vz] in the global frame.
struct Track {
    TrackId id = 0;
    Vec6 x = Vec6::Zero();
    Mat6 P = Mat6::Identity();
    Dimensions dims{1.0, 1.0, 1.0, 0.0};
    double score = 0.0;
    bool confirmed = false;
    bool coasting = false;
    int coast_count = 0;
    int hits = 0;
};

/// Measurement already transformed into the global frame.
struct GlobalMeasurement {
    Vec6 z = Vec6::Zero();
    Mat6 R = Mat6::Identity();
    std::optional<Dimensions> extent;
};

namespace detail {

inline void cv_model(double dt, double q, Mat6& F, Mat6& Q) {
    F.setIdentity();
    F(0, 3) = F(1, 4) = F(2, 5) = dt;
    Q.setZero();
    const double dt2 = dt * dt, dt3 = dt2 * dt;
    for (int i = 0; i < 3; ++i) {
        Q(i, i) = q * dt3 / 3.0;
        Q(i + 3, i + 3) = q * dt;
        Q(i, i + 3) = Q(i + 3, i) = q * dt2 / 2.0;
    }
}

inline double circular_blend(double a, double b, double w_b) {
    return std::atan2((1.0 - w_b) * std::sin(a) + w_b * std::sin(b),
                      (1.0 - w_b) * std::cos(a) + w_b * std::cos(b));
}

inline void smooth_extent(Dimensions& dims, const Dimensions& meas, double alpha, bool first) {
    if (first) {
        dims = meas;
        dims.heading = normalize_angle(meas.heading);
        return;
    }
    dims.length = (1.0 - alpha) * dims.length + alpha * meas.length;
    dims.width = (1.0 - alpha) * dims.width + alpha * meas.width;
    dims.height = (1.0 - alpha) * dims.height + alpha * meas.height;
    dims.heading = normalize_angle(circular_blend(dims.heading, meas.heading, alpha));
}

}  // namespace detail

/// Constant-velocity prediction with additive process noise. dt = 0 leaves
/// states and covariances untouched.
inline void predict(std::vector<Track>& tracks, double dt, const TrackerConfig& config) {
    if (dt == 0.0) return;
    Mat6 F, Q;
    detail::cv_model(dt, config.process_noise, F, Q);
    for (Track& t : tracks) {
        t.x = F * t.x;
        t.P = F * t.P * F.transpose() + Q;
        t.P = 0.5 * (t.P + t.P.transpose()).eval();
    }
}

/// Gated globally-optimal nearest-neighbor association followed by a Kalman
/// update of the matched tracks. Unmatched tracks take a score miss and
/// coast; returns the indices of unmatched measurements for initiation.
inline std::vector<int> associate_and_update(std::vector<Track>& tracks,
                                             const std::vector<GlobalMeasurement>& meas,
                                             const TrackerConfig& config) {
    const int n = static_cast<int>(tracks.size());
    const int m = static_cast<int>(meas.size());
    Eigen::MatrixXd cost(n, m);
    std::vector<Mat6> s_inv(static_cast<size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const Mat6 S = tracks[i].P + meas[j].R;
            const Mat6 Si = S.inverse();
            const Vec6 d = meas[j].z - tracks[i].x;
            cost(i, j) = d.dot(Si * d);
            s_inv[static_cast<size_t>(i) * m + j] = Si;
        }
    }
    const std::vector<int> match = solve_gated_assignment(cost, config.gate);

    std::vector<char> meas_used(m, 0);
    for (int i = 0; i < n; ++i) {
        Track& t = tracks[i];
        const int j = match[i];
        if (j >= 0) {
            meas_used[j] = 1;
            const Mat6& Si = s_inv[static_cast<size_t>(i) * m + j];
            const Mat6 K = t.P * Si;
            t.x += K * (meas[j].z - t.x);
            t.P = ((Mat6::Identity() - K) * t.P).eval();
            t.P = 0.5 * (t.P + t.P.transpose()).eval();
            t.score += config.score_hit;
            t.coasting = false;
            t.coast_count = 0;
            ++t.hits;
            if (meas[j].extent)
                detail::smooth_extent(t.dims, *meas[j].extent, config.extent_smoothing, false);
        } else {
            t.score += config.score_miss;
            t.coasting = true;
            ++t.coast_count;
        }
    }
    std::vector<int> unassigned;
    for (int j = 0; j < m; ++j)
        if (!meas_used[j]) unassigned.push_back(j);
    return unassigned;
}

/// Initiates tentative tracks from unassigned measurements, promotes tracks
/// that reached the confirmation threshold and removes tracks below the
/// deletion threshold or past the coasting limit.
inline void manage_tracks(std::vector<Track>& tracks,
                          const std::vector<GlobalMeasurement>& meas,
                          const std::vector<int>& unassigned, const TrackerConfig& config,
                          TrackId& next_id) {
    std::erase_if(tracks, [&](const Track& t) {
        return t.score < config.deletion_threshold || t.coast_count >= config.max_coasting;
    });
    for (Track& t : tracks) {
        if (!t.confirmed && t.score >= config.confirm_threshold) t.confirmed = true;
    }
    for (int j : unassigned) {
        Track t;
        t.id = next_id++;
        t.x = meas[j].z;
        t.P = meas[j].R;
        t.score = config.initial_score;
        t.confirmed = t.score >= config.confirm_threshold;
        t.hits = 1;
        if (meas[j].extent) detail::smooth_extent(t.dims, *meas[j].extent, 1.0, true);
        tracks.push_back(t);
    }
}

/// Per-sensor sequential multi-object tracker. Consumes sensor-frame
/// detections, converts them with the nominal mounting pose and maintains the
/// track file across steps. One instance per sensor, driven by one thread.
class Tracker {
  public:
    Tracker(SensorMeta meta, TrackerConfig config)
        : meta_(std::move(meta)), config_(config) {}

    void step(const std::vector<Detection>& detections, double timestamp) {
        const double dt = has_time_ ? timestamp - last_time_ : 0.0;
        predict(tracks_, dt, config_);
        std::vector<GlobalMeasurement> meas;
        meas.reserve(detections.size());
        for (const Detection& d : detections) meas.push_back(to_global(d));
        const std::vector<int> unassigned = associate_and_update(tracks_, meas, config_);
        manage_tracks(tracks_, meas, unassigned, config_, next_id_);
        last_time_ = timestamp;
        has_time_ = true;
    }

    /// Confirmed tracks as local objects, the sensor's report to fusion.
    std::vector<LocalObject> confirmed_objects(double timestamp) const {
        std::vector<LocalObject> out;
        for (const Track& t : tracks_) {
            if (!t.confirmed) continue;
            LocalObject o;
            o.sensor_id = meta_.sensor_id;
            o.track_id = t.id;
            o.timestamp = timestamp;
            o.state = StateVector::from_vec(t.x);
            o.covariance = t.P;
            o.dims = t.dims;
            o.status = {t.score, t.confirmed, t.coasting};
            out.push_back(std::move(o));
        }
        return out;
    }

    const std::vector<Track>& tracks() const { return tracks_; }
    const TrackerConfig& config() const { return config_; }
    const SensorMeta& meta() const { return meta_; }

  private:
    GlobalMeasurement to_global(const Detection& d) const {
        const Mat3 R = yaw_pitch_rotation(meta_.yaw, meta_.pitch);
        GlobalMeasurement g;
        g.z.head<3>() = meta_.mount + R * d.position;
        g.z.tail<3>() = R * d.velocity;
        Mat6 T = Mat6::Zero();
        T.topLeftCorner<3, 3>() = R;
        T.bottomRightCorner<3, 3>() = R;
        g.R = T * d.noise * T.transpose();
        if (d.extent) {
            Dimensions e = *d.extent;
            e.heading = normalize_angle(e.heading + meta_.yaw);
            g.extent = e;
        }
        return g;
    }

    SensorMeta meta_;
    TrackerConfig config_;
    std::vector<Track> tracks_;
    TrackId next_id_ = 1;
    double last_time_ = 0.0;
    bool has_time_ = false;
};

}  // namespace credence
