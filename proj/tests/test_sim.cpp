#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "credence/io/recording_io.hpp"
#include "credence/sim/runner.hpp"
#include "credence/sim/scenario.hpp"
#include "credence/sim/sensor_model.hpp"
#include "credence/sim/traffic.hpp"

using namespace credence;

namespace {

ScenarioConfig desk_highway(double duration = 10.0, uint64_t seed = 1) {
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::Highway;
    cfg.highway = {4, 3.5, 350.0, 80.0};
    cfg.duration = duration;
    cfg.warmup = 10.0;
    cfg.seed = seed;
    cfg.traffic.arrival_rate = 0.10;
    for (int k = 0; k < 6; ++k) {
        SensorMeta s;
        s.sensor_id = k;
        s.mount = {50.0 * k, 7.0, 0.9};
        s.yaw = 0.0;
        s.fov = {90.0, deg2rad(30.0), deg2rad(8.0)};
        s.trust = 0.9;
        s.detection_prob = 0.9;
        s.false_alarm_rate = 1e-6;
        s.over_range = {100.0 / 90.0, 0.3, deg2rad(10.0)};
        cfg.sensors.push_back(s);
    }
    cfg.analysis.interval_s = 5.0;
    cfg.analysis.bins = {BinSpec::Kind::LongitudinalX, 50.0, 350.0, 0.0, 0.0, 25.0};
    cfg.analysis.stat_sensors = {1, 2, 3, 4};
    return cfg;
}

std::string serialized(const Recording& rec) {
    std::ostringstream os(std::ios::binary);
    write_recording(rec, os);
    return os.str();
}

SensorMeta test_sensor() {
    SensorMeta s;
    s.sensor_id = 5;
    s.mount = {0.0, 0.0, 1.0};
    s.fov = {90.0, deg2rad(30.0), deg2rad(8.0)};
    s.detection_prob = 1.0;
    s.false_alarm_rate = 1e-12;
    return s;
}

TruthEntry car_at(int id, double x, double y, double vx = 25.0) {
    TruthEntry e;
    e.id = id;
    e.state = {x, y, 0.75, vx, 0.0, 0.0};
    e.dims = {4.5, 1.9, 1.5, 0.0};
    return e;
}

const NoiseSpec kNoNoise{0.0, 0.0, 0.0, 0.0};

ClutterSpec no_clutter() {
    ClutterSpec c;
    c.resolution_cells = 0.0;
    return c;
}

DigitalMap flat_map() {
    DigitalMap map(-150.0, -150.0, 1.0, 300, 300);
    map.mark_road_rect(-150.0, -150.0, 150.0, 150.0);
    return map;
}

}  // namespace

TEST_CASE("trajectory kinematics") {
    GroundTruthObject car;
    car.id = 1;
    car.dims = class_dims(ObjectClass::Car);
    car.times = {0.0, 10.0};
    car.points = {Vec3(0.0, 1.75, 0.75), Vec3(250.0, 1.75, 0.75)};
    const auto p0 = car.pose_at(1.0);
    const auto p1 = car.pose_at(1.1);
    REQUIRE(p0);
    REQUIRE(p1);
    CHECK((p1->position - p0->position).norm() == doctest::Approx(2.5));
    CHECK(p0->velocity.x() == doctest::Approx(25.0));
    CHECK_FALSE(car.pose_at(-1.0));
    CHECK_FALSE(car.pose_at(11.0));
}

TEST_CASE("traffic generation") {
    SUBCASE("zero arrival rate, empty scene forever") {
        ScenarioConfig cfg = desk_highway(5.0);
        cfg.traffic.arrival_rate = 1e-12;
        const auto objs = generate_highway_traffic(cfg);
        CHECK(objs.empty());
    }
    SUBCASE("same seed, bit-identical trajectories") {
        const ScenarioConfig cfg = desk_highway(20.0, 42);
        const auto a = generate_highway_traffic(cfg);
        const auto b = generate_highway_traffic(cfg);
        REQUIRE(a.size() == b.size());
        CHECK(!a.empty());
        for (size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].id == b[i].id);
            REQUIRE(a[i].times.size() == b[i].times.size());
            for (size_t k = 0; k < a[i].times.size(); ++k) {
                CHECK(a[i].times[k] == b[i].times[k]);
                CHECK((a[i].points[k] - b[i].points[k]).norm() == 0.0);
            }
        }
    }
    SUBCASE("positions stay continuous at waypoints") {
        ScenarioConfig cfg = desk_highway(20.0, 7);
        cfg.kind = ScenarioKind::Intersection;
        cfg.traffic.arrival_rate = 0.1;
        cfg.traffic.pedestrian_rate = 0.05;
        const auto objs = generate_intersection_traffic(cfg);
        CHECK(!objs.empty());
        for (const auto& g : objs) {
            for (double t = g.spawn_time(); t < g.despawn_time() - 0.01; t += 0.01) {
                const auto a = g.pose_at(t);
                const auto b = g.pose_at(t + 0.01);
                if (!a || !b) continue;
                CHECK((b->position - a->position).norm() < 0.25);  // <= vmax * dt
            }
        }
    }
}

TEST_CASE("sense") {
    const DigitalMap map = flat_map();

    SUBCASE("perfect sensor sees exactly the visible object at its position") {
        const SensorMeta s = test_sensor();
        const std::vector<TruthEntry> truth{car_at(1, 40.0, 0.0)};
        RngStream rng(1, rng_purpose::kSense, 0, 0);
        const auto dets = sense(truth, s, nullptr, kNoNoise, no_clutter(), map, rng, 0.0);
        REQUIRE(dets.size() == 1);
        const Mat3 rot = yaw_pitch_rotation(s.yaw, s.pitch);
        const Vec3 global = s.mount + rot * dets[0].position;
        CHECK((global - Vec3(40.0, 0.0, 0.75)).norm() < 1e-12);
        CHECK((rot * dets[0].velocity - Vec3(25.0, 0.0, 0.0)).norm() < 1e-12);
    }
    SUBCASE("objects outside the cone are not detected") {
        const SensorMeta s = test_sensor();
        const std::vector<TruthEntry> truth{car_at(1, -40.0, 0.0)};
        RngStream rng(1, rng_purpose::kSense, 0, 0);
        CHECK(sense(truth, s, nullptr, kNoNoise, no_clutter(), map, rng, 0.0).empty());
    }
    SUBCASE("misorientation reports positions rotated the opposite way") {
        const SensorMeta s = test_sensor();
        FaultSpec fault;
        fault.kind = FaultSpec::Kind::Misorientation;
        fault.sensor_id = s.sensor_id;
        fault.delta_yaw = deg2rad(4.0);
        const Vec3 truth_pos(40.0, 0.0, 0.75);
        const std::vector<TruthEntry> truth{car_at(1, truth_pos.x(), truth_pos.y())};
        RngStream rng(1, rng_purpose::kSense, 0, 0);
        const auto dets = sense(truth, s, &fault, kNoNoise, no_clutter(), map, rng, 0.0);
        REQUIRE(dets.size() == 1);
        // The fusion side converts with the nominal pose.
        const Mat3 nominal = yaw_pitch_rotation(s.yaw, s.pitch);
        const Vec3 reported = s.mount + nominal * dets[0].position;
        const Mat3 back = yaw_pitch_rotation(-fault.delta_yaw, 0.0);
        const Vec3 expected = s.mount + back * (truth_pos - s.mount);
        CHECK((reported - expected).norm() < 1e-12);
    }
    SUBCASE("misorientation of zero degrees is a no-op") {
        ScenarioConfig base = desk_highway(5.0, 9);
        ScenarioConfig faulty = base;
        FaultSpec f;
        f.kind = FaultSpec::Kind::Misorientation;
        f.sensor_id = 3;
        f.delta_yaw = 0.0;
        faulty.faults.push_back(f);
        CHECK(serialized(run_scenario(base)) == serialized(run_scenario(faulty)));
    }
    SUBCASE("blind spot never detects inside the wedge") {
        SensorMeta s = test_sensor();
        s.fov = {80.0, 2.0 * kPi, deg2rad(28.0)};
        FaultSpec fault;
        fault.kind = FaultSpec::Kind::BlindSpot;
        fault.sensor_id = s.sensor_id;
        fault.blind_center = 0.0;
        fault.blind_width = deg2rad(40.0);
        for (int k = 0; k < 200; ++k) {
            RngStream rng(7, rng_purpose::kSense, static_cast<uint64_t>(k), 0);
            const double az = deg2rad(-19.0 + 38.0 * (k % 20) / 19.0);
            const std::vector<TruthEntry> truth{
                car_at(1, 40.0 * std::cos(az), 40.0 * std::sin(az))};
            CHECK(sense(truth, s, &fault, kNoNoise, no_clutter(), map, rng, 0.0).empty());
        }
        // outside the wedge detection still works
        RngStream rng(7, rng_purpose::kSense, 1000, 0);
        const std::vector<TruthEntry> truth{
            car_at(1, 40.0 * std::cos(deg2rad(30.0)), 40.0 * std::sin(deg2rad(30.0)))};
        CHECK(sense(truth, s, &fault, kNoNoise, no_clutter(), map, rng, 0.0).size() == 1);
    }
    SUBCASE("over-range responds at the reduced rate inside the main lobe") {
        SensorMeta s = test_sensor();
        s.over_range = {100.0 / 90.0, 0.3, deg2rad(10.0)};
        int hits = 0;
        const int trials = 2000;
        for (int k = 0; k < trials; ++k) {
            RngStream rng(11, rng_purpose::kSense, static_cast<uint64_t>(k), 0);
            const std::vector<TruthEntry> truth{car_at(1, 97.0, 0.0)};
            hits += static_cast<int>(
                sense(truth, s, nullptr, kNoNoise, no_clutter(), map, rng, 0.0).size());
        }
        CHECK(hits > trials * 0.25);
        CHECK(hits < trials * 0.35);
        // beyond the over-range extension nothing responds
        RngStream rng(11, rng_purpose::kSense, 5000, 0);
        const std::vector<TruthEntry> far{car_at(1, 105.0, 0.0)};
        CHECK(sense(far, s, nullptr, kNoNoise, no_clutter(), map, rng, 0.0).empty());
    }
    SUBCASE("occluded objects are never detected") {
        const SensorMeta s = test_sensor();
        std::vector<TruthEntry> truth{car_at(1, 60.0, 0.0)};
        TruthEntry wall = car_at(2, 30.0, 0.0);
        wall.dims = {4.0, 10.0, 8.0, 0.0};
        truth.push_back(wall);
        for (int k = 0; k < 100; ++k) {
            RngStream rng(3, rng_purpose::kSense, static_cast<uint64_t>(k), 0);
            const auto dets = sense(truth, s, nullptr, kNoNoise, no_clutter(), map, rng, 0.0);
            REQUIRE(dets.size() == 1);  // only the wall itself
            const Vec3 global =
                s.mount + yaw_pitch_rotation(s.yaw, s.pitch) * dets[0].position;
            CHECK(std::abs(global.x() - 30.0) < 1e-9);
        }
    }
    SUBCASE("false alarms follow the configured rate and stay on the corridor") {
        SensorMeta s = test_sensor();
        ClutterSpec clutter;
        clutter.resolution_cells = 131072.0;
        s.false_alarm_rate = 1e-4;  // boosted so the count is testable
        DigitalMap strip(-10.0, -5.0, 1.0, 120, 10);
        strip.mark_road_rect(-10.0, -2.0, 110.0, 2.0);
        int count = 0;
        const int trials = 300;
        for (int k = 0; k < trials; ++k) {
            RngStream rng(23, rng_purpose::kSense, static_cast<uint64_t>(k), 0);
            const auto dets =
                sense({}, s, nullptr, kNoNoise, clutter, strip, rng, 0.0);
            count += static_cast<int>(dets.size());
            for (const Detection& d : dets) {
                const Vec3 global =
                    s.mount + yaw_pitch_rotation(s.yaw, s.pitch) * d.position;
                CHECK(strip.road_at(global.x(), global.y()));
                CHECK(global.z() >= clutter.z_min - 1e-9);
                CHECK(global.z() <= clutter.z_max + 1e-9);
            }
        }
        const double expected = 131072.0 * 1e-4;  // per scan
        CHECK(count > trials * expected * 0.8);
        CHECK(count < trials * expected * 1.2);
    }
}

TEST_CASE("run_scenario") {
    SUBCASE("zero duration records nothing") {
        ScenarioConfig cfg = desk_highway(0.0);
        cfg.warmup = 0.0;
        const Recording rec = run_scenario(cfg);
        CHECK(rec.steps.empty());
    }
    SUBCASE("identical config and seed give byte-identical recordings") {
        const ScenarioConfig cfg = desk_highway(5.0, 99);
        CHECK(serialized(run_scenario(cfg)) == serialized(run_scenario(cfg)));
    }
    SUBCASE("different seeds differ") {
        CHECK(serialized(run_scenario(desk_highway(5.0, 1))) !=
              serialized(run_scenario(desk_highway(5.0, 2))));
    }
    SUBCASE("a lowered confirmation threshold floods confirmed tracks") {
        ScenarioConfig cfg = desk_highway(20.0, 5);
        ScenarioConfig faulty = cfg;
        FaultSpec f;
        f.kind = FaultSpec::Kind::TrackerThreshold;
        f.sensor_id = 3;
        f.faulty_threshold = 0.5 * std::log(0.9 / 1e-6);
        faulty.faults.push_back(f);
        const Recording healthy_rec = run_scenario(cfg);
        const Recording faulty_rec = run_scenario(faulty);
        auto count_tracks = [](const Recording& rec, SensorId sid) {
            size_t n = 0;
            for (const StepRecord& s : rec.steps) {
                const auto it = s.locals.sensors.find(sid);
                if (it != s.locals.sensors.end()) n += it->second.size();
            }
            return n;
        };
        const size_t before = count_tracks(healthy_rec, 3);
        const size_t after = count_tracks(faulty_rec, 3);
        CHECK(after > before);
        // and it reports more than either neighbor in the faulty run
        CHECK(after > count_tracks(faulty_rec, 2));
        CHECK(after > count_tracks(faulty_rec, 4));
    }
}
