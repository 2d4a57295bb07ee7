#pragma once

#include <cmath>
#include <stdexcept>

#include "credence/core/types.hpp"
#include "credence/fusion/cluster.hpp"

namespace credence {

struct MergedTrack {
    StateVector state;
    Mat6 covariance = Mat6::Identity();
    Dimensions dims;
    TrackStatus status;
};

/// Information-weighted fusion of all cluster members. Extents fuse by
/// element-wise maximum, headings by the circular mean; the merged track
/// coasts only when every member coasts, and carries the maximum score.
/// Singleton clusters pass through unchanged.
inline MergedTrack merge(const TrackCluster& cluster) {
    if (cluster.members.empty()) throw std::invalid_argument("cannot merge an empty cluster");
    MergedTrack m;
    if (cluster.members.size() == 1) {
        const LocalObject& o = cluster.members.front();
        m.state = o.state;
        m.covariance = o.covariance;
        m.dims = o.dims;
        m.status = o.status;
        return m;
    }
    Mat6 info = Mat6::Zero();
    Vec6 info_state = Vec6::Zero();
    double sin_h = 0.0, cos_h = 0.0;
    bool all_coasting = true;
    double score = -std::numeric_limits<double>::infinity();
    Dimensions dims{0.0, 0.0, 0.0, 0.0};
    for (const LocalObject& o : cluster.members) {
        const Mat6 inv = o.covariance.inverse();
        info += inv;
        info_state += inv * o.state.as_vec();
        dims.length = std::max(dims.length, o.dims.length);
        dims.width = std::max(dims.width, o.dims.width);
        dims.height = std::max(dims.height, o.dims.height);
        sin_h += std::sin(o.dims.heading);
        cos_h += std::cos(o.dims.heading);
        all_coasting = all_coasting && o.status.coasting;
        score = std::max(score, o.status.score);
    }
    m.covariance = info.inverse();
    m.covariance = 0.5 * (m.covariance + m.covariance.transpose()).eval();
    m.state = StateVector::from_vec(m.covariance * info_state);
    dims.heading = normalize_angle(std::atan2(sin_h, cos_h));
    m.dims = dims;
    m.status = {score, true, all_coasting};
    return m;
}

}  // namespace credence
