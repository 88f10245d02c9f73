#ifndef VKRL_SENSOR_HPP
#define VKRL_SENSOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "vkrl/dynamics.hpp"
#include "vkrl/trackmap.hpp"

namespace vkrl {

struct LidarConfig {
    double fov = 4.7;            // total field of view, radians
    int num_rays_full = 1080;    // raw beams, spread evenly over fov including both ends
    int num_beams_obs = 20;      // beams kept in the observation
    double max_range = 10.0;     // meters

    void validate() const {
        if (num_rays_full < 1 || num_beams_obs < 1) throw Error("lidar beam counts must be positive");
        if (num_beams_obs > num_rays_full) throw Error("more observation beams than raw rays");
        if (!(max_range > 0.0)) throw Error("max_range must be positive");
    }

    double beam_angle(int i) const {
        if (num_rays_full == 1) return 0.0;
        return -fov / 2 + fov * static_cast<double>(i) / (num_rays_full - 1);
    }
};

/// Normalized range readings, each in [0, 1].
struct Observation {
    std::vector<double> values;
};

/// Distance from `origin` along `angle` to the first blocked cell of the map,
/// by grid traversal. Blocked means not drivable or inside the inflation margin.
inline double cast_ray(const TrackMap& map, Vec2 origin, double angle, double max_range) {
    const auto& g = map.grid();
    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    const double gx = (origin.x - g.origin.x) / g.resolution;
    const double gy = (origin.y - g.origin.y) / g.resolution;
    int col = static_cast<int>(std::floor(gx));
    int row = static_cast<int>(std::floor(gy));
    const int step_c = dx > 0 ? 1 : -1;
    const int step_r = dy > 0 ? 1 : -1;
    constexpr double kInf = std::numeric_limits<double>::infinity();
    // parametric distance (in cells) to the next vertical / horizontal boundary
    const double t_delta_c = dx != 0.0 ? 1.0 / std::abs(dx) : kInf;
    const double t_delta_r = dy != 0.0 ? 1.0 / std::abs(dy) : kInf;
    double t_next_c = dx > 0 ? (col + 1 - gx) * t_delta_c : dx < 0 ? (gx - col) * t_delta_c : kInf;
    double t_next_r = dy > 0 ? (row + 1 - gy) * t_delta_r : dy < 0 ? (gy - row) * t_delta_r : kInf;
    const double limit = max_range / g.resolution;
    while (true) {
        double t;
        if (t_next_c < t_next_r) {
            t = t_next_c;
            t_next_c += t_delta_c;
            col += step_c;
        } else {
            t = t_next_r;
            t_next_r += t_delta_r;
            row += step_r;
        }
        if (t >= limit) return max_range;
        if (!map.cell_free(col, row)) return t * g.resolution;
    }
}

/// Full simulated scan centered on the vehicle heading.
inline std::vector<double> cast_scan(const TrackMap& map, const VehicleState& pose, const LidarConfig& cfg) {
    if (!map.is_on_track(pose.position())) throw Error("cannot scan from occupied cell");
    std::vector<double> out(static_cast<std::size_t>(cfg.num_rays_full));
    for (int i = 0; i < cfg.num_rays_full; ++i)
        out[static_cast<std::size_t>(i)] = cast_ray(map, pose.position(), pose.theta + cfg.beam_angle(i), cfg.max_range);
    return out;
}

/// Indices of the observation beams within the raw scan, floor(k (N-1) / (M-1)).
inline std::vector<int> observation_indices(const LidarConfig& cfg) {
    std::vector<int> idx(static_cast<std::size_t>(cfg.num_beams_obs));
    const int m = cfg.num_beams_obs;
    const long long n1 = cfg.num_rays_full - 1;
    for (int k = 0; k < m; ++k) idx[static_cast<std::size_t>(k)] = m == 1 ? 0 : static_cast<int>((k * n1) / (m - 1));
    return idx;
}

inline Observation observe(std::span<const double> scan, const LidarConfig& cfg) {
    if (scan.size() != static_cast<std::size_t>(cfg.num_rays_full)) throw Error("scan length does not match lidar config");
    Observation obs;
    obs.values.reserve(static_cast<std::size_t>(cfg.num_beams_obs));
    for (int i : observation_indices(cfg))
        obs.values.push_back(std::clamp(scan[static_cast<std::size_t>(i)] / cfg.max_range, 0.0, 1.0));
    return obs;
}

/// Casts only the observation beams; equal to observe(cast_scan(...)).
inline Observation sense(const TrackMap& map, const VehicleState& pose, const LidarConfig& cfg) {
    if (!map.is_on_track(pose.position())) throw Error("cannot scan from occupied cell");
    Observation obs;
    obs.values.reserve(static_cast<std::size_t>(cfg.num_beams_obs));
    for (int i : observation_indices(cfg)) {
        const double d = cast_ray(map, pose.position(), pose.theta + cfg.beam_angle(i), cfg.max_range);
        obs.values.push_back(std::clamp(d / cfg.max_range, 0.0, 1.0));
    }
    return obs;
}

}  // namespace vkrl

#endif  // VKRL_SENSOR_HPP
