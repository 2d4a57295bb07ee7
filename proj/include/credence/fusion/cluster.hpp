#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "credence/core/types.hpp"
#include "credence/tracker/assignment.hpp"

namespace credence {

/// Group of local objects referring to one physical object, at most one
/// member per sensor.
struct TrackCluster {
    std::vector<LocalObject> members;
};

namespace detail {

/// Track-to-track statistical distance: Mahalanobis on position+velocity
/// under the summed covariances.
inline double t2t_distance(const LocalObject& a, const LocalObject& b) {
    const Mat6 S = a.covariance + b.covariance;
    const Vec6 d = a.state.as_vec() - b.state.as_vec();
    return d.dot(S.inverse() * d);
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

/// Clusters synchronous confirmed local objects across sensors. For every
/// sensor pair a gated optimal assignment proposes links; links are chained
/// transitively by ascending distance, skipping any link that would place two
/// tracks of one sensor in the same cluster. Singletons are allowed.
inline std::vector<TrackCluster> cluster(const LocalObjectList& objects, double gate) {
    std::vector<const LocalObject*> all;
    std::vector<SensorId> sensor_of;
    std::vector<std::pair<SensorId, std::vector<int>>> per_sensor;
    for (const auto& [sid, objs] : objects.sensors) {
        std::vector<int> idx;
        for (const LocalObject& o : objs) {
            if (!o.status.confirmed) continue;
            idx.push_back(static_cast<int>(all.size()));
            all.push_back(&o);
            sensor_of.push_back(sid);
        }
        per_sensor.emplace_back(sid, std::move(idx));
    }
    const int n = static_cast<int>(all.size());

    struct Link {
        double dist;
        int a, b;
    };
    std::vector<Link> links;
    for (size_t si = 0; si < per_sensor.size(); ++si) {
        for (size_t sj = si + 1; sj < per_sensor.size(); ++sj) {
            const auto& ia = per_sensor[si].second;
            const auto& ib = per_sensor[sj].second;
            if (ia.empty() || ib.empty()) continue;
            Eigen::MatrixXd cost(ia.size(), ib.size());
            for (size_t r = 0; r < ia.size(); ++r)
                for (size_t c = 0; c < ib.size(); ++c)
                    cost(r, c) = detail::t2t_distance(*all[ia[r]], *all[ib[c]]);
            const std::vector<int> match = solve_gated_assignment(cost, gate);
            for (size_t r = 0; r < ia.size(); ++r)
                if (match[r] >= 0)
                    links.push_back({cost(r, match[r]), ia[r], ib[static_cast<size_t>(match[r])]});
        }
    }
    std::sort(links.begin(), links.end(), [](const Link& x, const Link& y) {
        return std::tie(x.dist, x.a, x.b) < std::tie(y.dist, y.a, y.b);
    });

    detail::UnionFind uf(n);
    std::vector<std::vector<SensorId>> sensors_in(n);
    for (int i = 0; i < n; ++i) sensors_in[i] = {sensor_of[i]};
    for (const Link& l : links) {
        const int ra = uf.find(l.a);
        const int rb = uf.find(l.b);
        if (ra == rb) continue;
        const auto& sa = sensors_in[ra];
        const auto& sb = sensors_in[rb];
        const bool conflict = std::any_of(sa.begin(), sa.end(), [&](SensorId s) {
            return std::find(sb.begin(), sb.end(), s) != sb.end();
        });
        if (conflict) continue;
        uf.unite(ra, rb);
        const int root = uf.find(ra);
        const int other = root == ra ? rb : ra;
        sensors_in[root].insert(sensors_in[root].end(), sensors_in[other].begin(),
                                sensors_in[other].end());
    }

    std::map<int, TrackCluster> grouped;
    for (int i = 0; i < n; ++i) grouped[uf.find(i)].members.push_back(*all[i]);
    std::vector<TrackCluster> out;
    out.reserve(grouped.size());
    for (auto& [root, c] : grouped) out.push_back(std::move(c));
    return out;
}

}  // namespace credence
