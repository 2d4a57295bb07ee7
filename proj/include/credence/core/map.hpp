#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "credence/core/types.hpp"

namespace credence {

/// Binary occupancy grid of the monitored area: 1 = road, 0 = non-road.
/// Cell (ix, iy) covers [origin + i*cell, origin + (i+1)*cell).
class DigitalMap {
  public:
    DigitalMap() = default;
    DigitalMap(double origin_x, double origin_y, double cell_size, int nx, int ny,
               int lane_count = 0, double lane_width = 3.5)
        : origin_x_(origin_x), origin_y_(origin_y), cell_(cell_size), nx_(nx), ny_(ny),
          lane_count_(lane_count), lane_width_(lane_width), cells_(static_cast<size_t>(nx) * ny, 0) {
        if (!(cell_size > 0.0)) throw std::invalid_argument("map cell size must be > 0");
        if (nx <= 0 || ny <= 0) throw std::invalid_argument("map grid must be non-empty");
    }

    void set_road(int ix, int iy, bool road = true) {
        cells_.at(index(ix, iy)) = road ? 1 : 0;
        if (road) ++road_count_;
    }

    /// Marks every cell whose center falls into the axis-aligned rectangle.
    void mark_road_rect(double x0, double y0, double x1, double y1) {
        for (int iy = 0; iy < ny_; ++iy)
            for (int ix = 0; ix < nx_; ++ix) {
                const double cx = origin_x_ + (ix + 0.5) * cell_;
                const double cy = origin_y_ + (iy + 0.5) * cell_;
                if (cx >= x0 && cx <= x1 && cy >= y0 && cy <= y1 && !cells_[index(ix, iy)]) {
                    cells_[index(ix, iy)] = 1;
                    ++road_count_;
                }
            }
    }

    bool road_at(double x, double y) const {
        const int ix = static_cast<int>(std::floor((x - origin_x_) / cell_));
        const int iy = static_cast<int>(std::floor((y - origin_y_) / cell_));
        if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_) return false;
        return cells_[index(ix, iy)] != 0;
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double cell_size() const { return cell_; }
    double origin_x() const { return origin_x_; }
    double origin_y() const { return origin_y_; }
    int lane_count() const { return lane_count_; }
    double lane_width() const { return lane_width_; }
    std::size_t road_cells() const { return road_count_; }
    bool cell_road(int ix, int iy) const { return cells_[index(ix, iy)] != 0; }
    Vec3 cell_center(int ix, int iy) const {
        return {origin_x_ + (ix + 0.5) * cell_, origin_y_ + (iy + 0.5) * cell_, 0.0};
    }

  private:
    size_t index(int ix, int iy) const { return static_cast<size_t>(iy) * nx_ + ix; }

    double origin_x_ = 0.0, origin_y_ = 0.0;
    double cell_ = 1.0;
    int nx_ = 0, ny_ = 0;
    int lane_count_ = 0;
    double lane_width_ = 3.5;
    std::vector<uint8_t> cells_;
    std::size_t road_count_ = 0;
};

/// Euclidean distance [m] from the measured position to the road. Zero inside
/// a road cell; otherwise the distance to the nearest road-cell center minus
/// half a cell diagonal (so on-road positions at cell edges still score 0),
/// clamped at zero.
inline double map_distance(const StateVector& state, const DigitalMap& map) {
    if (map.road_cells() == 0) throw std::invalid_argument("digital map has no road cells");
    const double x = state.x;
    const double y = state.y;
    if (map.road_at(x, y)) return 0.0;

    const double cell = map.cell_size();
    const int cx = static_cast<int>(std::floor((x - map.origin_x()) / cell));
    const int cy = static_cast<int>(std::floor((y - map.origin_y()) / cell));
    const int max_ring = std::max({map.nx(), map.ny(),
                                   std::abs(cx) + map.nx(), std::abs(cy) + map.ny()});

    double best = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring <= max_ring; ++ring) {
        // Once a candidate is found, rings beyond best/cell + 1 cannot improve it.
        if (std::isfinite(best) && (ring - 1) * cell > best) break;
        auto visit = [&](int ix, int iy) {
            if (ix < 0 || iy < 0 || ix >= map.nx() || iy >= map.ny()) return;
            if (!map.cell_road(ix, iy)) return;
            const Vec3 c = map.cell_center(ix, iy);
            best = std::min(best, std::hypot(x - c.x(), y - c.y()));
        };
        for (int ix = cx - ring; ix <= cx + ring; ++ix) {
            visit(ix, cy - ring);
            if (ring > 0) visit(ix, cy + ring);
        }
        for (int iy = cy - ring + 1; iy <= cy + ring - 1; ++iy) {
            visit(cx - ring, iy);
            visit(cx + ring, iy);
        }
    }
    const double half_diag = 0.5 * cell * std::numbers::sqrt2;
    return std::max(0.0, best - half_diag);
}

}  // namespace credence
