#ifndef VKRL_PLANNER_HPP
#define VKRL_PLANNER_HPP

#include <algorithm>
#include <cmath>

#include "vkrl/dynamics.hpp"
#include "vkrl/trackmap.hpp"

namespace vkrl {

struct PurePursuitConfig {
    double lookahead = 1.0;
    double wheelbase = 0.33;

    /// Half a second of travel ahead: 1.0 m at 2 m/s.
    static PurePursuitConfig for_speed(double speed, double wheelbase) {
        return {std::max(0.05, 0.5 * speed), wheelbase};
    }
};

/// Steers the rear axle onto the arc through the centerline point one
/// lookahead (in arclength) past the nearest centerline point.
inline ControlAction pure_pursuit(const VehicleState& s, const Centerline& line, const PurePursuitConfig& cfg,
                                  const VehicleParams& params) {
    if (line.empty()) throw Error("pure pursuit needs a non-empty centerline");
    if (!(cfg.lookahead > 0.0)) throw Error("lookahead must be positive");
    const std::size_t i = line.nearest_index(s.position());
    const Vec2 target = line.point_at(line.cumulative_arclength()[i] + cfg.lookahead);
    const double alpha = std::atan2(target.y - s.y, target.x - s.x) - s.theta;
    const double delta = std::atan(2.0 * cfg.wheelbase * std::sin(alpha) / cfg.lookahead);
    return {std::clamp(delta, -params.delta_max, params.delta_max), params.fixed_speed};
}

}  // namespace vkrl

#endif  // VKRL_PLANNER_HPP
