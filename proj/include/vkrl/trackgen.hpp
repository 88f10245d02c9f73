#ifndef VKRL_TRACKGEN_HPP
#define VKRL_TRACKGEN_HPP

// Synthetic track construction: shipped desk-scale maps and test fixtures.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vkrl/trackmap.hpp"

namespace vkrl::trackgen {

inline OccupancyGrid grid_from_predicate(int width, int height, double resolution, Vec2 origin,
                                         const std::function<bool(Vec2)>& drivable) {
    OccupancyGrid g;
    g.width = width;
    g.height = height;
    g.resolution = resolution;
    g.origin = origin;
    g.cells.resize(static_cast<std::size_t>(width) * height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) g.cells[g.index(c, r)] = drivable(g.cell_center(c, r)) ? 1 : 0;
    return g;
}

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const double vx = b.x - a.x;
    const double vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

/// Closed centerline as a dense polyline plus the track drawn around it.
struct TrackShape {
    std::vector<Vec2> path;  // closed, counterclockwise, path[0] is the start
    double width = 1.4;
};

/// Rasterizes a corridor of the given width around a closed path, with
/// `margin` meters of wall around the bounding box.
inline OccupancyGrid rasterize(const TrackShape& shape, double resolution, double margin) {
    double xmin = std::numeric_limits<double>::infinity();
    double ymin = xmin;
    double xmax = -xmin;
    double ymax = -xmin;
    for (const auto& p : shape.path) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double half = shape.width / 2.0;
    const Vec2 origin{std::floor((xmin - half - margin) / resolution) * resolution,
                      std::floor((ymin - half - margin) / resolution) * resolution};
    const int w = static_cast<int>(std::ceil((xmax + half + margin - origin.x) / resolution));
    const int h = static_cast<int>(std::ceil((ymax + half + margin - origin.y) / resolution));
    const std::size_t n = shape.path.size();
    return grid_from_predicate(w, h, resolution, origin, [&](Vec2 p) {
        for (std::size_t i = 0; i < n; ++i)
            if (segment_distance(p, shape.path[i], shape.path[(i + 1) % n]) <= half) return true;
        return false;
    });
}

/// Rounded rectangle traversed counterclockwise from the middle of the bottom
/// straight. `half_x`/`half_y` are centerline half-extents.
inline std::vector<Vec2> rounded_rectangle(double half_x, double half_y, double corner_radius, double step = 0.01) {
    std::vector<Vec2> pts;
    auto straight = [&](Vec2 a, Vec2 b) {
        const double len = distance(a, b);
        const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
        for (int i = 0; i < n; ++i) pts.push_back({a.x + (b.x - a.x) * i / n, a.y + (b.y - a.y) * i / n});
    };
    auto arc = [&](Vec2 c, double a0) {
        const int n = std::max(1, static_cast<int>(std::ceil(corner_radius * kPi / 2 / step)));
        for (int i = 0; i < n; ++i) {
            const double a = a0 + (kPi / 2) * i / n;
            pts.push_back({c.x + corner_radius * std::cos(a), c.y + corner_radius * std::sin(a)});
        }
    };
    const double ax = half_x - corner_radius;
    const double by = half_y - corner_radius;
    straight({0, -half_y}, {ax, -half_y});
    arc({ax, -by}, -kPi / 2);
    straight({half_x, -by}, {half_x, by});
    arc({ax, by}, 0.0);
    straight({ax, half_y}, {-ax, half_y});
    arc({-ax, by}, kPi / 2);
    straight({-half_x, by}, {-half_x, -by});
    arc({-ax, -by}, kPi);
    straight({-ax, -half_y}, {0, -half_y});
    return pts;
}

/// Rounded rectangle whose top straight carries an inward S-bend of depth
/// `depth` over `length` meters centered on x = 0.
inline std::vector<Vec2> chicane_loop(double half_x, double half_y, double corner_radius, double depth, double length) {
    auto pts = rounded_rectangle(half_x, half_y, corner_radius);
    for (auto& p : pts) {
        if (p.y > half_y - 1e-9 && std::abs(p.x) < length / 2) {
            const double u = (p.x + length / 2) / length;
            p.y -= depth * 0.5 * (1.0 - std::cos(kTwoPi * u));
        }
    }
    return pts;
}

inline constexpr double kShippedResolution = 0.05;
inline constexpr double kShippedInflation = 0.15;
inline constexpr double kShippedWidth = 1.4;

/// The shipped training loop: 24.4 m centerline, 1.4 m wide.
inline TrackMap shipped_loop() {
    TrackShape shape{rounded_rectangle(4.5, 2.25, 1.5), kShippedWidth};
    auto grid = rasterize(shape, kShippedResolution, 0.5);
    TrackMeta meta;
    meta.resolution = grid.resolution;
    meta.origin = grid.origin;
    meta.inflation = kShippedInflation;
    meta.start_x = 0.0;
    meta.start_y = -2.25;
    meta.start_theta = 0.0;
    return TrackMap(std::move(grid), meta);
}

/// The shipped chicane: loop with an S-bend, centerline supplied explicitly.
inline TrackMap shipped_chicane() {
    TrackShape shape{chicane_loop(4.5, 2.25, 1.5, 0.5, 4.0), kShippedWidth};
    auto grid = rasterize(shape, kShippedResolution, 0.5);
    TrackMeta meta;
    meta.resolution = grid.resolution;
    meta.origin = grid.origin;
    meta.inflation = kShippedInflation;
    meta.start_x = 0.0;
    meta.start_y = -2.25;
    meta.start_theta = 0.0;
    auto line = detail::resample_closed(Centerline(shape.path), kCenterlineSpacing);
    return TrackMap(std::move(grid), meta, std::move(line));
}

/// Circle polyline of the given radius, counterclockwise from angle -pi/2.
inline std::vector<Vec2> circle(double radius, Vec2 center = {}, int n = 720) {
    std::vector<Vec2> pts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double a = -kPi / 2 + kTwoPi * i / n;
        pts[static_cast<std::size_t>(i)] = {center.x + radius * std::cos(a), center.y + radius * std::sin(a)};
    }
    return pts;
}

}  // namespace vkrl::trackgen

#endif  // VKRL_TRACKGEN_HPP
