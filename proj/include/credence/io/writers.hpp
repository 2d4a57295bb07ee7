#pragma once

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "credence/analysis/diagnose.hpp"
#include "credence/analysis/intervals.hpp"
#include "credence/sim/recording.hpp"

namespace credence {

constexpr const char* kToolVersion = "credence 0.1.0";
constexpr int kMetricsSchemaVersion = 1;
constexpr int kReportSchemaVersion = 1;

/// Plot-ready metrics table. Per-interval rows carry the raw interval means;
/// 'all' rows aggregate them with the 95% confidence interval.
inline std::string metrics_table(const Recording& rec) {
    const std::vector<IntervalStats> intervals = all_interval_metrics(rec);
    std::ostringstream os;
    os << "# schema_version=" << kMetricsSchemaVersion << "\n";
    os << "interval,subject,metric,mean,ci_low,ci_high\n";
    os << std::setprecision(10);
    auto row = [&](const std::string& interval, const std::string& subject,
                   const std::string& metric, double mean, const std::string& lo,
                   const std::string& hi) {
        os << interval << ',' << subject << ',' << metric << ',' << mean << ',' << lo << ','
           << hi << "\n";
    };
    std::map<SensorId, std::vector<double>> mr_series, uor_series;
    std::map<int, std::vector<double>> bin_series;
    for (const IntervalStats& iv : intervals) {
        const std::string k = std::to_string(iv.index);
        for (const auto& [sid, s] : iv.sensors) {
            const std::string subject = "sensor:" + std::to_string(sid);
            if (s.mr) {
                row(k, subject, "MR", *s.mr, "", "");
                mr_series[sid].push_back(*s.mr);
            }
            if (s.uor) {
                row(k, subject, "UOR", *s.uor, "", "");
                uor_series[sid].push_back(*s.uor);
            }
        }
        for (int b = 0; b < static_cast<int>(iv.bin_p_sum.size()); ++b) {
            if (const auto m = iv.bin_mean(b)) {
                row(k, "bin:" + std::to_string(b), "p_exists", *m, "", "");
                bin_series[b].push_back(*m);
            }
        }
    }
    auto aggregate = [&](const std::string& subject, const std::string& metric,
                         const std::vector<double>& values) {
        if (values.size() < 2) return;
        const Interval95 ci = confidence_interval(values);
        row("all", subject, metric, ci.mean, std::to_string(ci.low()), std::to_string(ci.high()));
    };
    for (const auto& [sid, v] : mr_series) aggregate("sensor:" + std::to_string(sid), "MR", v);
    for (const auto& [sid, v] : uor_series) aggregate("sensor:" + std::to_string(sid), "UOR", v);
    for (const auto& [b, v] : bin_series) aggregate("bin:" + std::to_string(b), "p_exists", v);
    return os.str();
}

inline const char* metric_name(MetricKind m) { return m == MetricKind::MR ? "MR" : "UOR"; }

inline std::string report_json(const DiagnosisReport& report) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["intervals"] = report.intervals;
    j["fault_detected"] = report.fault_detected();
    j["fault_class"] = report.fault_class;
    if (report.affected_sensor) j["affected_sensor"] = *report.affected_sensor;
    auto stats_json = [](const std::map<SensorId, Interval95>& stats) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& [sid, ci] : stats) {
            out.push_back({{"sensor", sid},
                           {"mean", ci.mean},
                           {"ci_low", ci.low()},
                           {"ci_high", ci.high()},
                           {"intervals", ci.n}});
        }
        return out;
    };
    j["mr"] = stats_json(report.mr);
    j["uor"] = stats_json(report.uor);
    j["flags"] = nlohmann::json::array();
    for (const MetricFlag& f : report.flags) {
        j["flags"].push_back({{"sensor", f.sensor},
                              {"metric", metric_name(f.metric)},
                              {"direction", f.direction > 0 ? "high" : "low"},
                              {"mean", f.value.mean},
                              {"ci_low", f.value.low()},
                              {"ci_high", f.value.high()},
                              {"baseline_mean", f.baseline.mean},
                              {"baseline_ci_low", f.baseline.low()},
                              {"baseline_ci_high", f.baseline.high()}});
    }
    j["p_exists_low_bins"] = nlohmann::json::array();
    for (const BinFlag& b : report.p_low_bins) {
        j["p_exists_low_bins"].push_back({{"bin", b.bin},
                                          {"mean", b.value.mean},
                                          {"reference_mean", b.reference.mean},
                                          {"reference_ci_low", b.reference.low()}});
    }
    return j.dump(2) + "\n";
}

inline std::string manifest_json(uint64_t config_hash, uint64_t seed, double elapsed_s,
                                 const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["schema_version"] = 1;
    std::ostringstream hex;
    hex << std::hex << std::setfill('0') << std::setw(16) << config_hash;
    j["config_hash"] = hex.str();
    j["seed"] = seed;
    j["tool_version"] = kToolVersion;
    j["elapsed_s"] = elapsed_s;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

/// Structured-text rendering of a binary recording, one JSON document per
/// line: a header object followed by one object per step.
inline void dump_recording(const Recording& rec, std::ostream& os) {
    nlohmann::json header;
    header["schema_version"] = rec.schema_version;
    header["seed"] = rec.seed;
    header["sample_period_s"] = rec.sample_period;
    header["scenario"] = rec.kind == ScenarioKind::Highway ? "highway" : "intersection";
    header["steps"] = rec.steps.size();
    header["sensors"] = nlohmann::json::array();
    for (const SensorMeta& s : rec.sensors)
        header["sensors"].push_back({{"id", s.sensor_id},
                                     {"mount", {s.mount.x(), s.mount.y(), s.mount.z()}},
                                     {"yaw_deg", rad2deg(s.yaw)},
                                     {"range_m", s.fov.range}});
    os << header.dump() << "\n";
    for (const StepRecord& step : rec.steps) {
        nlohmann::json j;
        j["t"] = step.time;
        j["truth_count"] = step.truth.size();
        j["local_tracks"] = step.locals.total();
        j["ledger"] = nlohmann::json::array();
        for (const auto& [sid, c] : step.ledger.per_sensor)
            j["ledger"].push_back({{"sensor", sid},
                                   {"regular", c.regular},
                                   {"unexpected", c.unexpected},
                                   {"misses", c.misses},
                                   {"irrelevant", c.irrelevant}});
        j["systems"] = nlohmann::json::array();
        for (const SystemObject& o : step.systems) {
            nlohmann::json so = {{"gid", o.global_id},
                                 {"x", o.state.x},
                                 {"y", o.state.y},
                                 {"z", o.state.z},
                                 {"p_exists", o.p_exists},
                                 {"s_exists", o.s_exists},
                                 {"coasting", o.status.coasting}};
            so["contributors"] = o.contributors;
            j["systems"].push_back(so);
        }
        if (!step.diagnostics.empty()) j["diagnostics"] = step.diagnostics;
        os << j.dump() << "\n";
    }
}

}  // namespace credence
