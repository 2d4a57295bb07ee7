#pragma once

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "credence/sim/recording.hpp"

namespace credence {

/// Framed little-endian binary log: fixed header, then one length-prefixed
/// record per step. Readers reject unknown magic or schema versions.
namespace recio {

constexpr char kMagic[8] = {'C', 'R', 'D', 'R', 'E', 'C', '0', '1'};

class Writer {
  public:
    explicit Writer(std::ostream& os) : os_(os) {}

    template <typename T>
    void pod(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        char buf[sizeof(T)];
        std::memcpy(buf, &v, sizeof(T));
        os_.write(buf, sizeof(T));
    }
    void str(const std::string& s) {
        pod<uint32_t>(static_cast<uint32_t>(s.size()));
        os_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

  private:
    std::ostream& os_;
};

class Reader {
  public:
    explicit Reader(std::istream& is) : is_(is) {}

    template <typename T>
    T pod() {
        static_assert(std::is_trivially_copyable_v<T>);
        char buf[sizeof(T)];
        is_.read(buf, sizeof(T));
        if (!is_) throw std::runtime_error("recording truncated");
        T v;
        std::memcpy(&v, buf, sizeof(T));
        return v;
    }
    std::string str() {
        const uint32_t n = pod<uint32_t>();
        if (n > (1u << 24)) throw std::runtime_error("recording corrupt: oversized string");
        std::string s(n, '\0');
        is_.read(s.data(), n);
        if (!is_) throw std::runtime_error("recording truncated");
        return s;
    }

  private:
    std::istream& is_;
};

inline void put_state(Writer& w, const StateVector& s) {
    w.pod(s.x); w.pod(s.y); w.pod(s.z);
    w.pod(s.vx); w.pod(s.vy); w.pod(s.vz);
}
inline StateVector get_state(Reader& r) {
    StateVector s;
    s.x = r.pod<double>(); s.y = r.pod<double>(); s.z = r.pod<double>();
    s.vx = r.pod<double>(); s.vy = r.pod<double>(); s.vz = r.pod<double>();
    return s;
}
inline void put_dims(Writer& w, const Dimensions& d) {
    w.pod(d.length); w.pod(d.width); w.pod(d.height); w.pod(d.heading);
}
inline Dimensions get_dims(Reader& r) {
    Dimensions d;
    d.length = r.pod<double>(); d.width = r.pod<double>();
    d.height = r.pod<double>(); d.heading = r.pod<double>();
    return d;
}
inline void put_mat(Writer& w, const Mat6& m) {
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) w.pod(m(i, j));
}
inline Mat6 get_mat(Reader& r) {
    Mat6 m;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) m(i, j) = r.pod<double>();
    return m;
}

}  // namespace recio

inline void write_recording(const Recording& rec, std::ostream& os) {
    using namespace recio;
    os.write(kMagic, sizeof(kMagic));
    Writer w(os);
    w.pod<uint32_t>(rec.schema_version);
    w.pod<uint64_t>(rec.config_hash);
    w.pod<uint64_t>(rec.seed);
    w.pod<double>(rec.sample_period);
    w.pod<uint8_t>(rec.kind == ScenarioKind::Highway ? 0 : 1);

    w.pod<uint32_t>(static_cast<uint32_t>(rec.sensors.size()));
    for (const SensorMeta& s : rec.sensors) {
        w.pod<int32_t>(s.sensor_id);
        w.pod(s.mount.x()); w.pod(s.mount.y()); w.pod(s.mount.z());
        w.pod(s.yaw); w.pod(s.pitch);
        w.pod(s.fov.range); w.pod(s.fov.horizontal); w.pod(s.fov.vertical);
        w.pod(s.trust); w.pod(s.detection_prob); w.pod(s.false_alarm_rate);
        w.pod(s.confirm_threshold); w.pod(s.deletion_threshold);
        w.pod(s.over_range.range_factor); w.pod(s.over_range.detection_prob);
        w.pod(s.over_range.azimuth);
    }
    w.pod<double>(rec.analysis.interval_s);
    w.pod<uint8_t>(rec.analysis.bins.kind == BinSpec::Kind::LongitudinalX ? 0 : 1);
    w.pod(rec.analysis.bins.x0); w.pod(rec.analysis.bins.x1);
    w.pod(rec.analysis.bins.y0); w.pod(rec.analysis.bins.y1);
    w.pod(rec.analysis.bins.size);
    w.pod<uint32_t>(static_cast<uint32_t>(rec.analysis.stat_sensors.size()));
    for (SensorId id : rec.analysis.stat_sensors) w.pod<int32_t>(id);

    w.pod<uint32_t>(static_cast<uint32_t>(rec.steps.size()));
    for (const StepRecord& step : rec.steps) {
        std::ostringstream buf(std::ios::binary);
        Writer sw(buf);
        sw.pod<double>(step.time);
        sw.pod<uint32_t>(static_cast<uint32_t>(step.truth.size()));
        for (const TruthEntry& e : step.truth) {
            sw.pod<int32_t>(e.id);
            sw.pod<uint8_t>(static_cast<uint8_t>(e.cls));
            put_state(sw, e.state);
            put_dims(sw, e.dims);
        }
        sw.pod<double>(step.locals.timestamp);
        sw.pod<uint32_t>(static_cast<uint32_t>(step.locals.sensors.size()));
        for (const auto& [sid, objs] : step.locals.sensors) {
            sw.pod<int32_t>(sid);
            sw.pod<uint32_t>(static_cast<uint32_t>(objs.size()));
            for (const LocalObject& o : objs) {
                sw.pod<int64_t>(o.track_id);
                sw.pod<double>(o.timestamp);
                put_state(sw, o.state);
                put_mat(sw, o.covariance);
                put_dims(sw, o.dims);
                sw.pod<double>(o.status.score);
                sw.pod<uint8_t>(o.status.confirmed ? 1 : 0);
                sw.pod<uint8_t>(o.status.coasting ? 1 : 0);
            }
        }
        sw.pod<uint32_t>(static_cast<uint32_t>(step.ledger.per_sensor.size()));
        for (const auto& [sid, c] : step.ledger.per_sensor) {
            sw.pod<int32_t>(sid);
            sw.pod<int32_t>(c.regular);
            sw.pod<int32_t>(c.unexpected);
            sw.pod<int32_t>(c.misses);
            sw.pod<int32_t>(c.irrelevant);
        }
        sw.pod<uint32_t>(static_cast<uint32_t>(step.systems.size()));
        for (const SystemObject& o : step.systems) {
            sw.pod<int64_t>(o.global_id);
            sw.pod<double>(o.timestamp);
            put_state(sw, o.state);
            put_mat(sw, o.covariance);
            put_dims(sw, o.dims);
            sw.pod<double>(o.status.score);
            sw.pod<uint8_t>(o.status.confirmed ? 1 : 0);
            sw.pod<uint8_t>(o.status.coasting ? 1 : 0);
            sw.pod<double>(o.p_exists);
            sw.pod<double>(o.s_exists);
            sw.pod<uint32_t>(static_cast<uint32_t>(o.contributors.size()));
            for (SensorId sid : o.contributors) sw.pod<int32_t>(sid);
        }
        sw.pod<uint32_t>(static_cast<uint32_t>(step.diagnostics.size()));
        for (const std::string& d : step.diagnostics) sw.str(d);

        const std::string payload = buf.str();
        w.pod<uint32_t>(static_cast<uint32_t>(payload.size()));
        os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    }
}

inline Recording read_recording(std::istream& is) {
    using namespace recio;
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a recording file (bad magic)");
    Reader r(is);
    Recording rec;
    rec.schema_version = r.pod<uint32_t>();
    if (rec.schema_version != Recording::kSchemaVersion)
        throw std::runtime_error("unsupported recording schema version " +
                                 std::to_string(rec.schema_version));
    rec.config_hash = r.pod<uint64_t>();
    rec.seed = r.pod<uint64_t>();
    rec.sample_period = r.pod<double>();
    rec.kind = r.pod<uint8_t>() == 0 ? ScenarioKind::Highway : ScenarioKind::Intersection;

    const uint32_t n_sensors = r.pod<uint32_t>();
    for (uint32_t i = 0; i < n_sensors; ++i) {
        SensorMeta s;
        s.sensor_id = r.pod<int32_t>();
        s.mount.x() = r.pod<double>(); s.mount.y() = r.pod<double>(); s.mount.z() = r.pod<double>();
        s.yaw = r.pod<double>(); s.pitch = r.pod<double>();
        s.fov.range = r.pod<double>(); s.fov.horizontal = r.pod<double>();
        s.fov.vertical = r.pod<double>();
        s.trust = r.pod<double>(); s.detection_prob = r.pod<double>();
        s.false_alarm_rate = r.pod<double>();
        s.confirm_threshold = r.pod<double>(); s.deletion_threshold = r.pod<double>();
        s.over_range.range_factor = r.pod<double>();
        s.over_range.detection_prob = r.pod<double>();
        s.over_range.azimuth = r.pod<double>();
        rec.sensors.push_back(s);
    }
    rec.analysis.interval_s = r.pod<double>();
    rec.analysis.bins.kind =
        r.pod<uint8_t>() == 0 ? BinSpec::Kind::LongitudinalX : BinSpec::Kind::GridXY;
    rec.analysis.bins.x0 = r.pod<double>(); rec.analysis.bins.x1 = r.pod<double>();
    rec.analysis.bins.y0 = r.pod<double>(); rec.analysis.bins.y1 = r.pod<double>();
    rec.analysis.bins.size = r.pod<double>();
    const uint32_t n_stat = r.pod<uint32_t>();
    for (uint32_t i = 0; i < n_stat; ++i) rec.analysis.stat_sensors.push_back(r.pod<int32_t>());

    const uint32_t n_steps = r.pod<uint32_t>();
    for (uint32_t k = 0; k < n_steps; ++k) {
        (void)r.pod<uint32_t>();  // payload length, sequential read
        StepRecord step;
        step.time = r.pod<double>();
        const uint32_t n_truth = r.pod<uint32_t>();
        for (uint32_t i = 0; i < n_truth; ++i) {
            TruthEntry e;
            e.id = r.pod<int32_t>();
            e.cls = static_cast<ObjectClass>(r.pod<uint8_t>());
            e.state = get_state(r);
            e.dims = get_dims(r);
            step.truth.push_back(e);
        }
        step.locals.timestamp = r.pod<double>();
        const uint32_t n_groups = r.pod<uint32_t>();
        for (uint32_t g = 0; g < n_groups; ++g) {
            const SensorId sid = r.pod<int32_t>();
            const uint32_t n_objs = r.pod<uint32_t>();
            auto& vec = step.locals.sensors[sid];
            for (uint32_t i = 0; i < n_objs; ++i) {
                LocalObject o;
                o.sensor_id = sid;
                o.track_id = r.pod<int64_t>();
                o.timestamp = r.pod<double>();
                o.state = get_state(r);
                o.covariance = get_mat(r);
                o.dims = get_dims(r);
                o.status.score = r.pod<double>();
                o.status.confirmed = r.pod<uint8_t>() != 0;
                o.status.coasting = r.pod<uint8_t>() != 0;
                vec.push_back(std::move(o));
            }
        }
        const uint32_t n_ledger = r.pod<uint32_t>();
        for (uint32_t i = 0; i < n_ledger; ++i) {
            const SensorId sid = r.pod<int32_t>();
            LedgerCounts c;
            c.regular = r.pod<int32_t>();
            c.unexpected = r.pod<int32_t>();
            c.misses = r.pod<int32_t>();
            c.irrelevant = r.pod<int32_t>();
            step.ledger.per_sensor[sid] = c;
        }
        const uint32_t n_sys = r.pod<uint32_t>();
        for (uint32_t i = 0; i < n_sys; ++i) {
            SystemObject o;
            o.global_id = r.pod<int64_t>();
            o.timestamp = r.pod<double>();
            o.state = get_state(r);
            o.covariance = get_mat(r);
            o.dims = get_dims(r);
            o.status.score = r.pod<double>();
            o.status.confirmed = r.pod<uint8_t>() != 0;
            o.status.coasting = r.pod<uint8_t>() != 0;
            o.p_exists = r.pod<double>();
            o.s_exists = r.pod<double>();
            const uint32_t n_contrib = r.pod<uint32_t>();
            for (uint32_t c = 0; c < n_contrib; ++c) o.contributors.insert(r.pod<int32_t>());
            step.systems.push_back(std::move(o));
        }
        const uint32_t n_diag = r.pod<uint32_t>();
        for (uint32_t i = 0; i < n_diag; ++i) step.diagnostics.push_back(r.str());
        rec.steps.push_back(std::move(step));
    }
    return rec;
}

inline void save_recording(const Recording& rec, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_recording(rec, os);
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline Recording load_recording(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open recording: " + path);
    return read_recording(is);
}

}  // namespace credence
