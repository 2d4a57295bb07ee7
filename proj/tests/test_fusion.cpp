#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "credence/core/map.hpp"
#include "credence/fusion/cluster.hpp"
#include "credence/fusion/merge.hpp"
#include "credence/fusion/pipeline.hpp"

using namespace credence;

namespace {

LocalObject confirmed_track(SensorId sid, TrackId tid, double x, double y, double vx,
                            double var = 0.25, double score = 30.0) {
    LocalObject o;
    o.sensor_id = sid;
    o.track_id = tid;
    o.state = {x, y, 0.9, vx, 0.0, 0.0};
    o.covariance = Mat6::Identity() * var;
    o.dims = {4.0, 2.0, 1.5, 0.0};
    o.status = {score, true, false};
    return o;
}

SensorMeta forward_sensor(SensorId id, double x) {
    SensorMeta s;
    s.sensor_id = id;
    s.mount = {x, 7.0, 0.9};
    s.fov = {90.0, deg2rad(30.0), deg2rad(8.0)};
    s.trust = 0.9;
    s.detection_prob = 0.9;
    s.false_alarm_rate = 1e-6;
    s.confirm_threshold = 1.5 * std::log(0.9 / 1e-6);
    return s;
}

DigitalMap road_map() {
    DigitalMap map(-50.0, -2.0, 1.0, 500, 20);
    map.mark_road_rect(-50.0, 0.0, 450.0, 14.0);
    return map;
}

double pair_distance(const LocalObject& a, const LocalObject& b) {
    const Mat6 S = a.covariance + b.covariance;
    const Vec6 d = a.state.as_vec() - b.state.as_vec();
    return d.dot(S.inverse() * d);
}

/// Exhaustive clustering oracle: enumerates every partition with at most one
/// track per sensor per cluster; the score counts (distance - gate) for each
/// intra-cluster pair, so links within the gate are rewarded.
void best_partition(const std::vector<LocalObject>& objs, double gate,
                    std::vector<int>& best_label) {
    const int n = static_cast<int>(objs.size());
    std::vector<int> label(n, -1);
    double best_cost = std::numeric_limits<double>::infinity();
    auto cost_of = [&](const std::vector<int>& lab) {
        double cost = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (lab[i] != lab[j]) continue;
                if (objs[i].sensor_id == objs[j].sensor_id)
                    return std::numeric_limits<double>::infinity();
                cost += pair_distance(objs[i], objs[j]) - gate;
            }
        return cost;
    };
    auto rec = [&](auto&& self, int i, int used) -> void {
        if (i == n) {
            const double c = cost_of(label);
            if (c < best_cost) {
                best_cost = c;
                best_label = label;
            }
            return;
        }
        for (int g = 0; g <= used; ++g) {
            label[i] = g;
            self(self, i + 1, std::max(used, g + 1));
        }
    };
    rec(rec, 0, 0);
}

std::set<std::set<std::pair<SensorId, TrackId>>> as_groups(
    const std::vector<TrackCluster>& clusters) {
    std::set<std::set<std::pair<SensorId, TrackId>>> out;
    for (const TrackCluster& c : clusters) {
        std::set<std::pair<SensorId, TrackId>> group;
        for (const LocalObject& o : c.members) group.insert({o.sensor_id, o.track_id});
        out.insert(std::move(group));
    }
    return out;
}

}  // namespace

TEST_CASE("clustering") {
    const double gate = 16.812;
    SUBCASE("two sensors, identical target: one cluster") {
        LocalObjectList objects;
        objects.sensors[1] = {confirmed_track(1, 1, 50.0, 5.0, 25.0)};
        objects.sensors[2] = {confirmed_track(2, 1, 50.0, 5.0, 25.0)};
        const auto clusters = cluster(objects, gate);
        REQUIRE(clusters.size() == 1);
        CHECK(clusters[0].members.size() == 2);
    }
    SUBCASE("tracks beyond the gate stay singletons") {
        LocalObjectList objects;
        objects.sensors[1] = {confirmed_track(1, 1, 50.0, 5.0, 25.0)};
        objects.sensors[2] = {confirmed_track(2, 1, 80.0, 5.0, 25.0)};
        const auto clusters = cluster(objects, gate);
        CHECK(clusters.size() == 2);
    }
    SUBCASE("tentative tracks do not participate") {
        LocalObjectList objects;
        LocalObject tentative = confirmed_track(1, 1, 50.0, 5.0, 25.0);
        tentative.status.confirmed = false;
        objects.sensors[1] = {tentative};
        CHECK(cluster(objects, gate).empty());
    }
    SUBCASE("three sensors, two targets: matches the exhaustive optimum") {
        LocalObjectList objects;
        std::vector<LocalObject> flat;
        for (SensorId s : {1, 2, 3}) {
            std::vector<LocalObject> objs;
            for (int target = 0; target < 2; ++target) {
                LocalObject o = confirmed_track(s, target + 1, 50.0 + 60.0 * target,
                                                5.0 + 0.2 * s, 25.0);
                objs.push_back(o);
                flat.push_back(o);
            }
            objects.sensors[s] = objs;
        }
        const auto clusters = cluster(objects, gate);
        REQUIRE(clusters.size() == 2);
        for (const TrackCluster& c : clusters) CHECK(c.members.size() == 3);

        std::vector<int> labels;
        best_partition(flat, gate, labels);
        std::map<int, std::set<std::pair<SensorId, TrackId>>> oracle_groups;
        for (size_t i = 0; i < flat.size(); ++i)
            oracle_groups[labels[i]].insert({flat[i].sensor_id, flat[i].track_id});
        std::set<std::set<std::pair<SensorId, TrackId>>> oracle;
        for (auto& [k, v] : oracle_groups) oracle.insert(v);
        CHECK(oracle == as_groups(clusters));
    }
    SUBCASE("no cluster ever holds two tracks of one sensor") {
        std::mt19937 rng(77);
        std::uniform_real_distribution<double> u(0.0, 120.0);
        for (int trial = 0; trial < 100; ++trial) {
            LocalObjectList objects;
            for (SensorId s : {1, 2, 3}) {
                std::vector<LocalObject> objs;
                const int n = 1 + static_cast<int>(rng() % 4);
                for (int k = 0; k < n; ++k)
                    objs.push_back(confirmed_track(s, k + 1, u(rng), u(rng) / 10.0, 25.0));
                objects.sensors[s] = objs;
            }
            size_t total = 0;
            for (const TrackCluster& c : cluster(objects, gate)) {
                std::set<SensorId> seen;
                for (const LocalObject& o : c.members) CHECK(seen.insert(o.sensor_id).second);
                total += c.members.size();
            }
            CHECK(total == objects.total());
        }
    }
}

TEST_CASE("merge") {
    SUBCASE("singleton passes through unchanged") {
        const LocalObject o = confirmed_track(1, 1, 50.0, 5.0, 25.0);
        const MergedTrack m = merge({{o}});
        CHECK(m.state.as_vec() == o.state.as_vec());
        CHECK((m.covariance - o.covariance).norm() == 0.0);
    }
    SUBCASE("equal covariances average states and halve the covariance") {
        LocalObject a = confirmed_track(1, 1, 50.0, 5.0, 25.0, 0.25);
        LocalObject b = confirmed_track(2, 1, 52.0, 6.0, 26.0, 0.25);
        const MergedTrack m = merge({{a, b}});
        CHECK(m.state.x == doctest::Approx(51.0));
        CHECK(m.state.y == doctest::Approx(5.5));
        CHECK(m.state.vx == doctest::Approx(25.5));
        CHECK((m.covariance - 0.125 * Mat6::Identity()).norm() < 1e-9);
    }
    SUBCASE("coasting only when every member coasts") {
        LocalObject a = confirmed_track(1, 1, 50.0, 5.0, 25.0);
        LocalObject b = confirmed_track(2, 1, 50.0, 5.0, 25.0);
        a.status.coasting = true;
        CHECK_FALSE(merge({{a, b}}).status.coasting);
        b.status.coasting = true;
        CHECK(merge({{a, b}}).status.coasting);
    }
    SUBCASE("heading fuses across the seam, extents take the maximum") {
        LocalObject a = confirmed_track(1, 1, 50.0, 5.0, 25.0);
        LocalObject b = confirmed_track(2, 1, 50.0, 5.0, 25.0);
        a.dims.heading = kPi - 0.05;
        b.dims.heading = -kPi + 0.05;
        b.dims.length = 6.0;
        const MergedTrack m = merge({{a, b}});
        CHECK(std::abs(std::abs(m.dims.heading) - kPi) < 0.051);
        CHECK(m.dims.length == 6.0);
        CHECK_THROWS_AS(merge(TrackCluster{}), std::invalid_argument);
    }
}

TEST_CASE("fuse_step") {
    const DigitalMap map = road_map();
    FusionConfig config;

    SUBCASE("empty input, empty output") {
        std::map<SensorId, SensorMeta> sensors{{1, forward_sensor(1, 0.0)}};
        FusionState state;
        LocalObjectList objects;
        objects.timestamp = 0.0;
        const FusionStepResult r = fuse_step(objects, sensors, map, config, state);
        CHECK(r.objects.empty());
        int total = 0;
        for (const auto& [sid, c] : r.ledger.per_sensor)
            total += c.regular + c.unexpected + c.misses;
        CHECK(total == 0);
    }
    SUBCASE("single confirmed on-road track at the confirmation score") {
        std::map<SensorId, SensorMeta> sensors{{1, forward_sensor(1, 0.0)}};
        FusionState state;
        LocalObjectList objects;
        objects.timestamp = 0.0;
        const double conf = sensors[1].confirm_threshold;
        objects.sensors[1] = {confirmed_track(1, 1, 40.0, 7.0, 25.0, 0.25, conf)};
        const FusionStepResult r = fuse_step(objects, sensors, map, config, state);
        REQUIRE(r.objects.size() == 1);
        CHECK(r.objects[0].p_exists == doctest::Approx(0.941).epsilon(1e-6));
        CHECK(r.objects[0].s_exists == doctest::Approx(0.05).epsilon(1e-6));
        CHECK(r.ledger.per_sensor.at(1).regular == 1);
        CHECK(r.ledger.per_sensor.at(1).misses == 0);
    }
    SUBCASE("a second concurring sensor reinforces existence") {
        std::map<SensorId, SensorMeta> one{{1, forward_sensor(1, 0.0)}};
        std::map<SensorId, SensorMeta> two{{1, forward_sensor(1, 0.0)},
                                           {2, forward_sensor(2, -20.0)}};
        const double conf = one[1].confirm_threshold;
        LocalObjectList single;
        single.timestamp = 0.0;
        single.sensors[1] = {confirmed_track(1, 1, 40.0, 7.0, 25.0, 0.25, conf)};
        FusionState s1;
        const double p_single = fuse_step(single, one, map, config, s1).objects[0].p_exists;

        LocalObjectList both = single;
        both.sensors[2] = {confirmed_track(2, 1, 40.0, 7.0, 25.0, 0.25, conf)};
        FusionState s2;
        const FusionStepResult r = fuse_step(both, two, map, config, s2);
        REQUIRE(r.objects.size() == 1);
        CHECK(r.objects[0].p_exists > p_single);
        CHECK(r.objects[0].contributors == std::set<SensorId>{1, 2});
    }
    SUBCASE("withheld detection registers a miss with the distrust mass") {
        std::map<SensorId, SensorMeta> sensors{{1, forward_sensor(1, 0.0)},
                                               {2, forward_sensor(2, -20.0)}};
        FusionState state;
        LocalObjectList objects;
        objects.timestamp = 0.0;
        const double conf = sensors[1].confirm_threshold;
        // Sensor 2 would see (40, 7) clearly at 60 m range but reports nothing.
        objects.sensors[1] = {confirmed_track(1, 1, 40.0, 7.0, 25.0, 0.25, conf)};
        const FusionStepResult r = fuse_step(objects, sensors, map, config, state);
        REQUIRE(r.objects.size() == 1);
        REQUIRE(r.clusters.size() == 1);
        const auto& contributions = r.clusters[0].contributions;
        const auto it = std::find_if(contributions.begin(), contributions.end(),
                                     [](const SensorContribution& c) { return c.sensor_id == 2; });
        REQUIRE(it != contributions.end());
        CHECK(it->contribution.kind == ContributionKind::Miss);
        CHECK(it->mass.m_exists == 0.0);
        CHECK(it->mass.m_not_exists == doctest::Approx(0.9));
        CHECK(it->mass.m_unknown == doctest::Approx(0.1));
        CHECK(r.ledger.per_sensor.at(2).misses == 1);
        CHECK(r.objects[0].p_exists < 0.941);
    }
    SUBCASE("global ids persist for a moving object and restart fresh") {
        std::map<SensorId, SensorMeta> sensors{{1, forward_sensor(1, 0.0)}};
        FusionState state;
        GlobalId gid = -1;
        for (int k = 0; k < 5; ++k) {
            LocalObjectList objects;
            objects.timestamp = 0.1 * k;
            objects.sensors[1] = {
                confirmed_track(1, 1, 40.0 + 2.5 * k, 7.0, 25.0, 0.25, 30.0)};
            const FusionStepResult r = fuse_step(objects, sensors, map, config, state);
            REQUIRE(r.objects.size() == 1);
            if (k == 0) gid = r.objects[0].global_id;
            CHECK(r.objects[0].global_id == gid);
        }
        // far-away newcomer gets a fresh id
        LocalObjectList objects;
        objects.timestamp = 0.5;
        objects.sensors[1] = {confirmed_track(1, 2, 80.0, 3.5, 25.0, 0.25, 30.0)};
        const FusionStepResult r = fuse_step(objects, sensors, map, config, state);
        REQUIRE(r.objects.size() == 1);
        CHECK(r.objects[0].global_id != gid);
    }
    SUBCASE("ledger conservation on random scenes") {
        std::mt19937 rng(13);
        std::uniform_real_distribution<double> ux(20.0, 80.0);
        std::uniform_real_distribution<double> uy(0.0, 14.0);
        std::map<SensorId, SensorMeta> sensors{{1, forward_sensor(1, 0.0)},
                                               {2, forward_sensor(2, -30.0)},
                                               {3, forward_sensor(3, 30.0)}};
        for (int trial = 0; trial < 50; ++trial) {
            FusionState state;
            LocalObjectList objects;
            objects.timestamp = 0.1 * trial;
            std::map<SensorId, int> reported;
            for (SensorId s : {1, 2, 3}) {
                std::vector<LocalObject> objs;
                const int n = static_cast<int>(rng() % 4);
                for (int k = 0; k < n; ++k) {
                    LocalObject o = confirmed_track(s, k + 1, ux(rng), uy(rng), 25.0);
                    o.status.coasting = (rng() % 4) == 0;
                    objs.push_back(o);
                }
                reported[s] = n;
                objects.sensors[s] = objs;
            }
            const FusionStepResult r = fuse_step(objects, sensors, map, FusionConfig{}, state);
            for (SensorId s : {1, 2, 3}) {
                const auto it = r.ledger.per_sensor.find(s);
                const int obs = it == r.ledger.per_sensor.end() ? 0 : it->second.observations();
                CHECK(obs == reported[s]);
            }
            for (const SystemObject& o : r.objects) {
                CHECK(o.p_exists >= -1e-12);
                CHECK(o.p_exists <= 1.0 + 1e-12);
                CHECK(o.p_exists - o.s_exists >= -1e-9);
                CHECK(o.p_exists + o.s_exists <= 1.0 + 1e-9);
            }
        }
    }
}
