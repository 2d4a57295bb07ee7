#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "credence/core/geometry.hpp"
#include "credence/core/map.hpp"
#include "credence/core/types.hpp"

namespace credence {

/// Physically possible attribute limits plus the VRU thresholds used by the
/// dimension-velocity check and the lane width normalizing the road-map
/// distance.
struct ValueLimits {
    double max_z = 3.0;
    double max_width = 5.0;
    double max_length = 25.0;
    double max_height = 5.0;
    double max_speed = 80.0;
    double vru_extent = 2.0;
    double vru_speed = 20.0;
    double lane_width = 3.5;
};

/// Coefficients of the score-to-existence sigmoid p = 1/(1 + e^(-a*s + b)).
struct SigmoidCalib {
    double alpha = 1.0;
    double beta = 0.0;
};

/// Solves for (alpha, beta) so that p_ex(initial_score) = 0.9 and
/// p_ex(confirm_threshold) = 0.99.
inline SigmoidCalib calibrate_sigmoid(double initial_score, double confirm_threshold) {
    if (!(confirm_threshold > initial_score))
        throw std::invalid_argument("sigmoid calibration requires threshold > initial score");
    // logit(0.9) = ln 9, logit(0.99) = ln 99
    const double l0 = std::log(9.0);
    const double l1 = std::log(99.0);
    SigmoidCalib c;
    c.alpha = (l1 - l0) / (confirm_threshold - initial_score);
    c.beta = c.alpha * initial_score - l0;
    return c;
}

inline double p_ex_factor(double score, const SigmoidCalib& calib) {
    return 1.0 / (1.0 + std::exp(-calib.alpha * score + calib.beta));
}

inline double p_ex_factor(const LocalObject& obj, const SigmoidCalib& calib) {
    return p_ex_factor(obj.status.score, calib);
}

/// FoV plausibility: one when any of the eleven check points is covered,
/// otherwise an exponential decay over the center's distance to the cone,
/// each component normalized by half its opening. Never reaches zero, so a
/// track coasting out of coverage keeps a residual weight.
inline double p_fov_factor(const LocalObject& obj, const SensorMeta& sensor) {
    const CheckPoints pts = bounding_box_points(obj.state, obj.dims);
    if (in_fov(pts, sensor)) return 1.0;
    const FovDistance d = fov_distance(obj.state, sensor);
    double exponent = d.range / (0.5 * sensor.fov.range);
    if (sensor.fov.horizontal < 2.0 * kPi)
        exponent += d.azimuth / (0.5 * sensor.fov.horizontal);
    exponent += d.elevation / (0.5 * sensor.fov.vertical);
    return std::exp(-exponent);
}

/// Occlusion gate: belief in a non-coasting observation is forfeited when
/// every check point is shadowed by the sensor's other confirmed objects. A
/// coasting track in a shadow is left untouched.
inline double p_occ_factor(const LocalObject& obj, std::span<const LocalObject> siblings,
                           const SensorMeta& sensor) {
    if (obj.status.coasting) return 1.0;
    return line_of_sight(obj, siblings, sensor) ? 1.0 : 0.0;
}

/// Road-map plausibility, normalized by the typical lane width.
inline double p_dm_factor(const LocalObject& obj, const DigitalMap& map,
                          const ValueLimits& limits) {
    return std::exp(-map_distance(obj.state, map) / limits.lane_width);
}

/// Signal-value plausibility: exponential penalty on every attribute
/// exceeding its physical limit, relative excess per attribute.
inline double p_val_factor(const LocalObject& obj, const ValueLimits& limits) {
    auto excess = [](double value, double max) {
        return value > max ? (value - max) / max : 0.0;
    };
    const double e = excess(obj.state.z, limits.max_z) +
                     excess(obj.dims.width, limits.max_width) +
                     excess(obj.dims.length, limits.max_length) +
                     excess(obj.dims.height, limits.max_height) +
                     excess(obj.state.speed(), limits.max_speed);
    return std::exp(-e);
}

}  // namespace credence
