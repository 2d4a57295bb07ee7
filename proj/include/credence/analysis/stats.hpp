#pragma once

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace credence {

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Interval95 {
    double mean = 0.0;
    double half_width = 0.0;
    double var_of_mean = 0.0;  // s^2 / n
    int n = 0;

    double low() const { return mean - half_width; }
    double high() const { return mean + half_width; }
};

/// Two-sided 95% confidence interval of the mean, Student t on the sample.
inline Interval95 confidence_interval(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    if (n < 2) throw InsufficientDataError("confidence interval needs at least 2 samples");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = ss / (n - 1);
    const boost::math::students_t_distribution<double> dist(n - 1);
    const double t = boost::math::quantile(dist, 0.975);
    Interval95 ci;
    ci.mean = mean;
    ci.var_of_mean = var / n;
    ci.half_width = t * std::sqrt(ci.var_of_mean);
    ci.n = n;
    return ci;
}

/// Cross-source weighted-least-squares average: weights are the inverse
/// variances of the per-source mean estimates; the pooled variance is the
/// inverse weight sum and the 95% width uses the normal quantile. All-zero
/// variances degenerate to the plain mean with zero width.
inline Interval95 wls_baseline(std::span<const Interval95> sources) {
    if (sources.empty()) throw InsufficientDataError("baseline needs at least one source");
    constexpr double kTiny = 1e-30;
    bool all_tiny = true;
    for (const Interval95& s : sources) all_tiny = all_tiny && s.var_of_mean <= kTiny;
    Interval95 out;
    if (all_tiny) {
        for (const Interval95& s : sources) out.mean += s.mean;
        out.mean /= static_cast<double>(sources.size());
        out.n = static_cast<int>(sources.size());
        return out;
    }
    double wsum = 0.0, acc = 0.0;
    for (const Interval95& s : sources) {
        const double w = 1.0 / std::max(s.var_of_mean, kTiny);
        wsum += w;
        acc += w * s.mean;
    }
    out.mean = acc / wsum;
    out.var_of_mean = 1.0 / wsum;
    const boost::math::normal_distribution<double> norm;
    out.half_width = boost::math::quantile(norm, 0.975) * std::sqrt(out.var_of_mean);
    out.n = static_cast<int>(sources.size());
    return out;
}

inline bool disjoint_above(const Interval95& a, const Interval95& base) {
    return a.low() > base.high();
}
inline bool disjoint_below(const Interval95& a, const Interval95& base) {
    return a.high() < base.low();
}

}  // namespace credence
