#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace credence {

/// Globally optimal gated one-to-one assignment, minimizing total cost.
///
/// Entries above the gate are never matched: every row owns a virtual
/// unassigned slot priced at the gate, so a pairing is made exactly when it
/// beats leaving both sides unmatched. Returns, per row, the matched column
/// or -1. Jonker-Volgenant style shortest augmenting paths, O(n^2 m).
inline std::vector<int> solve_gated_assignment(const Eigen::MatrixXd& cost, double gate) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    std::vector<int> match(n, -1);
    if (n == 0) return match;

    // Augmented columns [m, m+n) are the per-row unassigned slots.
    const int cols = m + n;
    auto entry = [&](int i, int j) {
        if (j >= m) return gate;
        const double c = cost(i, j);
        return (c <= gate) ? c : 2.0 * gate + 1.0;
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(cols + 1, 0.0);
    std::vector<int> owner(cols + 1, 0), way(cols + 1, 0);
    for (int i = 1; i <= n; ++i) {
        owner[0] = i;
        int j0 = 0;
        std::vector<double> minv(cols + 1, inf);
        std::vector<char> used(cols + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = owner[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= cols; ++j) {
                if (used[j]) continue;
                const double cur = entry(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= cols; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (owner[j0] != 0);
        do {
            const int j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    for (int j = 1; j <= cols; ++j) {
        if (owner[j] != 0 && j <= m) {
            const int i = owner[j] - 1;
            if (cost(i, j - 1) <= gate) match[i] = j - 1;
        }
    }
    return match;
}

}  // namespace credence
