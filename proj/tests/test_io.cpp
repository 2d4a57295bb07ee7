#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "credence/analysis/diagnose.hpp"
#include "credence/io/config_json.hpp"
#include "credence/io/hash.hpp"
#include "credence/io/recording_io.hpp"
#include "credence/io/writers.hpp"

using namespace credence;

namespace {

Recording random_recording(uint64_t seed) {
    std::mt19937 rng(static_cast<uint32_t>(seed));
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    Recording rec;
    rec.config_hash = 0xfeedface;
    rec.seed = seed;
    rec.sample_period = 0.1;
    rec.kind = ScenarioKind::Highway;
    for (int k = 0; k < 3; ++k) {
        SensorMeta s;
        s.sensor_id = k;
        s.mount = {u(rng), u(rng), 1.0};
        s.yaw = 0.1 * k;
        s.fov = {90.0, deg2rad(30.0), deg2rad(8.0)};
        s.confirm_threshold = 20.0;
        s.deletion_threshold = 11.0;
        s.over_range = {1.1, 0.3, deg2rad(10.0)};
        rec.sensors.push_back(s);
        rec.analysis.stat_sensors.push_back(k);
    }
    rec.analysis.interval_s = 0.5;
    rec.analysis.bins = {BinSpec::Kind::LongitudinalX, 0.0, 300.0, 0.0, 0.0, 25.0};
    for (int step = 0; step < 7; ++step) {
        StepRecord s;
        s.time = 0.1 * step;
        for (int i = 0; i < 2; ++i) {
            TruthEntry e;
            e.id = i;
            e.cls = ObjectClass::Truck;
            e.state = {u(rng), u(rng), 1.9, 25.0, 0.0, 0.0};
            e.dims = {12.0, 2.5, 3.8, 0.1};
            s.truth.push_back(e);
        }
        s.locals.timestamp = s.time;
        LocalObject o;
        o.sensor_id = 1;
        o.track_id = 17;
        o.timestamp = s.time;
        o.state = {u(rng), u(rng), 0.9, 24.0, 0.1, 0.0};
        o.covariance = Mat6::Identity() * 0.4;
        o.dims = {4.1, 1.8, 1.5, 0.02};
        o.status = {21.5, true, step % 2 == 1};
        s.locals.sensors[1].push_back(o);
        LedgerCounts c{3, 1, 2, 0};
        s.ledger.per_sensor[1] = c;
        SystemObject sys;
        sys.global_id = 5;
        sys.timestamp = s.time;
        sys.state = o.state;
        sys.covariance = o.covariance;
        sys.dims = o.dims;
        sys.status = o.status;
        sys.p_exists = 0.91;
        sys.s_exists = 0.05;
        sys.contributors = {1, 2};
        s.systems.push_back(sys);
        if (step == 3) s.diagnostics.push_back("sample diagnostic");
        rec.steps.push_back(std::move(s));
    }
    return rec;
}

std::string to_bytes(const Recording& rec) {
    std::ostringstream os(std::ios::binary);
    write_recording(rec, os);
    return os.str();
}

const char* kMinimalConfig = R"json({
  "schema_version": 1,
  "scenario": "highway",
  "duration_s": 5,
  "warmup_s": 1,
  "seed": 3,
  "sensors": [
    {"id": 0, "mount": [0, 7, 0.9],
     "fov": {"range_m": 90, "horizontal_deg": 30, "vertical_deg": 8}}
  ],
  "analysis": {"interval_s": 5, "bins": {"kind": "longitudinal", "x0": 0, "x1": 100, "size_m": 25}}
})json";

}  // namespace

TEST_CASE("recording round trip is exact and stable") {
    const Recording rec = random_recording(7);
    const std::string bytes = to_bytes(rec);
    std::istringstream is(bytes);
    const Recording back = read_recording(is);
    CHECK(to_bytes(back) == bytes);
    CHECK(back.seed == rec.seed);
    CHECK(back.sensors.size() == rec.sensors.size());
    CHECK(back.steps.size() == rec.steps.size());
    CHECK(back.steps[3].diagnostics == rec.steps[3].diagnostics);
    CHECK(back.steps[0].systems[0].contributors == std::set<SensorId>{1, 2});
    CHECK(back.steps[0].locals.sensors.at(1)[0].covariance ==
          rec.steps[0].locals.sensors.at(1)[0].covariance);
}

TEST_CASE("reader rejects foreign or newer files") {
    const Recording rec = random_recording(9);
    std::string bytes = to_bytes(rec);
    SUBCASE("bad magic") {
        bytes[0] = 'X';
        std::istringstream is(bytes);
        CHECK_THROWS_WITH_AS(read_recording(is), doctest::Contains("bad magic"),
                             std::runtime_error);
    }
    SUBCASE("unknown schema version") {
        bytes[8] = 42;  // first byte of the little-endian version field
        std::istringstream is(bytes);
        CHECK_THROWS_WITH_AS(read_recording(is), doctest::Contains("schema version"),
                             std::runtime_error);
    }
    SUBCASE("truncated payload") {
        std::istringstream is(bytes.substr(0, bytes.size() / 2));
        CHECK_THROWS_AS(read_recording(is), std::runtime_error);
    }
}

TEST_CASE("scenario config parsing") {
    SUBCASE("minimal document with defaults") {
        uint64_t hash = 0;
        const ScenarioConfig cfg = parse_scenario_config(kMinimalConfig, &hash);
        CHECK(cfg.kind == ScenarioKind::Highway);
        CHECK(cfg.sensors.size() == 1);
        CHECK(cfg.sensors[0].fov.range == 90.0);
        CHECK(cfg.sensors[0].fov.horizontal == doctest::Approx(deg2rad(30.0)));
        // derived defaults
        CHECK(cfg.sensors[0].confirm_threshold ==
              doctest::Approx(1.5 * std::log(0.9 / 1e-6)));
        CHECK(cfg.analysis.stat_sensors == std::vector<SensorId>{0});
        CHECK(hash == fnv1a64(kMinimalConfig));
    }
    SUBCASE("parse errors carry context") {
        CHECK_THROWS_AS(parse_scenario_config("{ not json"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_scenario_config("{}"),
                             doctest::Contains("schema_version"), ConfigError);
        CHECK_THROWS_WITH_AS(
            parse_scenario_config(R"({"schema_version": 1, "scenario": "highway"})"),
            doctest::Contains("sensors"), ConfigError);
    }
    SUBCASE("field validation points at the sensor") {
        std::string bad = kMinimalConfig;
        const auto pos = bad.find("\"range_m\": 90");
        bad.replace(pos, 13, "\"range_m\": -5");
        CHECK_THROWS_WITH_AS(parse_scenario_config(bad), doctest::Contains("sensors[0]"),
                             ConfigError);
    }
    SUBCASE("single fault hypothesis is enforced") {
        nlohmann::json j = nlohmann::json::parse(kMinimalConfig);
        j["faults"] = nlohmann::json::array();
        j["faults"].push_back({{"type", "misorientation"}, {"sensor_id", 0},
                               {"delta_yaw_deg", 4.0}});
        j["faults"].push_back({{"type", "blind_spot"}, {"sensor_id", 0},
                               {"center_deg", 0.0}, {"width_deg", 40.0}});
        CHECK_THROWS_WITH_AS(parse_scenario_config(j.dump()),
                             doctest::Contains("single fault"), ConfigError);
        j["faults"].erase(1);
        const ScenarioConfig cfg = parse_scenario_config(j.dump());
        CHECK(cfg.faults.size() == 1);
        CHECK(cfg.faults[0].kind == FaultSpec::Kind::Misorientation);
        CHECK(cfg.faults[0].delta_yaw == doctest::Approx(deg2rad(4.0)));
    }
    SUBCASE("threshold fault factor resolves against the sensor") {
        nlohmann::json j = nlohmann::json::parse(kMinimalConfig);
        j["faults"] = nlohmann::json::array();
        j["faults"].push_back({{"type", "tracker_threshold"}, {"sensor_id", 0},
                               {"threshold_factor", 1.0 / 3.0}});
        const ScenarioConfig cfg = parse_scenario_config(j.dump());
        REQUIRE(cfg.faults.size() == 1);
        CHECK(cfg.faults[0].faulty_threshold ==
              doctest::Approx(0.5 * std::log(0.9 / 1e-6)));
    }
}

TEST_CASE("writers") {
    const Recording rec = random_recording(4);
    SUBCASE("metrics table carries the expected columns") {
        const std::string table = metrics_table(rec);
        CHECK(table.find("interval,subject,metric,mean,ci_low,ci_high") != std::string::npos);
        CHECK(table.find("sensor:1,MR") != std::string::npos);
    }
    SUBCASE("report and manifest are valid json with schema versions") {
        DiagnosisReport report;
        report.intervals = 30;
        report.fault_class = "no fault";
        const auto parsed = nlohmann::json::parse(report_json(report));
        CHECK(parsed.at("schema_version") == kReportSchemaVersion);
        CHECK(parsed.at("fault_detected") == false);
        const auto manifest =
            nlohmann::json::parse(manifest_json(0xabc, 7, 1.5, {"recording.bin"}));
        CHECK(manifest.at("schema_version") == 1);
        CHECK(manifest.at("seed") == 7);
    }
    SUBCASE("dump emits one json document per step") {
        std::ostringstream os;
        dump_recording(rec, os);
        std::istringstream is(os.str());
        std::string line;
        int lines = 0;
        while (std::getline(is, line)) {
            CHECK_NOTHROW(nlohmann::json::parse(line));
            ++lines;
        }
        CHECK(lines == static_cast<int>(rec.steps.size()) + 1);
    }
}

TEST_CASE("fnv hash is stable") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("credence") == fnv1a64("credence"));
    CHECK(fnv1a64("a") != fnv1a64("b"));
}
