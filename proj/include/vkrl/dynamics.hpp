#ifndef VKRL_DYNAMICS_HPP
#define VKRL_DYNAMICS_HPP

#include <algorithm>
#include <cmath>

#include "vkrl/common.hpp"

namespace vkrl {

/// Pose of the rear-axle reference point. theta is kept in [-pi, pi).
struct VehicleState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Vec2 position() const { return {x, y}; }
};

/// Steering (positive = left turn) and forward speed.
struct ControlAction {
    double steering = 0.0;
    double speed = 0.0;
};

struct VehicleParams {
    double wheelbase = 0.33;
    double delta_max = 0.4;
    double fixed_speed = 2.0;
    double timestep = 0.1;
    bool hold_speed = true;  // replace commanded speed with fixed_speed

    void validate() const {
        if (!(wheelbase > 0.0)) throw Error("wheelbase must be positive");
        if (!(delta_max > 0.0)) throw Error("delta_max must be positive");
        if (!(timestep > 0.0)) throw Error("timestep must be positive");
        if (!(fixed_speed >= 0.0)) throw Error("fixed_speed must be non-negative");
    }
};

/// Kinematic single-track model referenced at the rear axle, integrated in
/// closed form along the constant-curvature arc.
inline VehicleState step(const VehicleState& s, const ControlAction& a, double dt, const VehicleParams& p) {
    const double omega = a.speed * std::tan(a.steering) / p.wheelbase;
    const double half_turn = 0.5 * omega * dt;
    // chord length of the arc; 2 sin(h)/omega -> dt as omega -> 0
    const double chord = std::abs(half_turn) < 1e-9 ? a.speed * dt : a.speed * dt * std::sin(half_turn) / half_turn;
    const double mid = s.theta + half_turn;
    return {s.x + chord * std::cos(mid), s.y + chord * std::sin(mid), wrap_angle(s.theta + omega * dt)};
}

inline VehicleState step(const VehicleState& s, const ControlAction& a, const VehicleParams& p) {
    return step(s, a, p.timestep, p);
}

/// Saturates steering and applies the fixed-speed policy.
inline ControlAction clamp(const ControlAction& a, const VehicleParams& p) {
    if (!std::isfinite(a.steering) || !std::isfinite(a.speed)) throw Error("non-finite control action");
    ControlAction out;
    out.steering = std::clamp(a.steering, -p.delta_max, p.delta_max);
    out.speed = p.hold_speed ? p.fixed_speed : std::max(0.0, a.speed);
    return out;
}

}  // namespace vkrl

#endif  // VKRL_DYNAMICS_HPP
