#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "vkrl/trackgen.hpp"

namespace fixtures {

using vkrl::TrackMap;
using vkrl::TrackMeta;
using vkrl::Vec2;

inline TrackMeta meta_for(const vkrl::OccupancyGrid& g, double inflation, Vec2 start, double theta) {
    TrackMeta m;
    m.resolution = g.resolution;
    m.origin = g.origin;
    m.inflation = inflation;
    m.start_x = start.x;
    m.start_y = start.y;
    m.start_theta = theta;
    return m;
}

/// Ring centered at the origin, driven counterclockwise from (0, -r_mean).
inline TrackMap annulus(double r_mean, double width, double res = 0.05, double inflation = 0.15,
                        bool explicit_centerline = false) {
    const double r_out = r_mean + width / 2;
    const double r_in = r_mean - width / 2;
    const double ext = r_out + 0.3;
    const int n = static_cast<int>(std::ceil(2 * ext / res));
    auto g = vkrl::trackgen::grid_from_predicate(n, n, res, {-n * res / 2, -n * res / 2}, [&](Vec2 p) {
        const double r = std::hypot(p.x, p.y);
        return r >= r_in && r <= r_out;
    });
    auto m = meta_for(g, inflation, {0.0, -r_mean}, 0.0);
    if (explicit_centerline) return TrackMap(std::move(g), m, vkrl::Centerline(vkrl::trackgen::circle(r_mean)));
    return TrackMap(std::move(g), m);
}

/// Rectangular room [0, w] x [0, h] with one-cell walls outside it. A ring
/// centerline keeps the TrackMap constructor happy.
inline TrackMap room(double w, double h, double res = 0.05, double inflation = 0.0) {
    const int nx = static_cast<int>(std::lround(w / res)) + 2;
    const int ny = static_cast<int>(std::lround(h / res)) + 2;
    auto g = vkrl::trackgen::grid_from_predicate(nx, ny, res, {-res, -res}, [&](Vec2 p) {
        return p.x > 0 && p.x < w && p.y > 0 && p.y < h;
    });
    auto m = meta_for(g, inflation, {w / 2, h / 2}, 0.0);
    const double r = 0.25 * std::min(w, h);
    return TrackMap(std::move(g), m, vkrl::Centerline(vkrl::trackgen::circle(r, {w / 2, h / 2})));
}

/// Rounded-rectangle loop symmetric about the x-axis.
inline TrackMap small_loop(double width = 1.4, double res = 0.05) {
    vkrl::trackgen::TrackShape shape{vkrl::trackgen::rounded_rectangle(2.5, 1.5, 1.2), width};
    auto g = vkrl::trackgen::rasterize(shape, res, 0.5);
    auto m = meta_for(g, 0.15, {0.0, -1.5}, 0.0);
    return TrackMap(std::move(g), m);
}

/// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("vkrl_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace fixtures
