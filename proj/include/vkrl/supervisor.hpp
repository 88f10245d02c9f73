#ifndef VKRL_SUPERVISOR_HPP
#define VKRL_SUPERVISOR_HPP

#include <cmath>
#include <optional>

#include "vkrl/dynamics.hpp"
#include "vkrl/kernel.hpp"
#include "vkrl/planner.hpp"
#include "vkrl/trackmap.hpp"

namespace vkrl {

struct SupervisorDecision {
    ControlAction implemented;
    bool intervened = false;
    ControlAction agent_action;
    double reward = 0.0;
    bool episode_done = false;
    VehicleState next_state;  // successor under `implemented`
};

/// Throws unless the kernel was built for this vehicle, speed and timestep.
inline void check_kernel_params(const SafetyKernel& kernel, const VehicleParams& params) {
    auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
    if (!same(kernel.spec.speed, params.fixed_speed) || !same(kernel.spec.dt, params.timestep) ||
        !same(kernel.wheelbase, params.wheelbase) || !same(kernel.delta_max, params.delta_max))
        throw Error("kernel was built for different vehicle parameters (speed/timestep/wheelbase/steering)");
}

/// Runtime shield. Passes the agent's action through when its one-step
/// successor is in the kernel; otherwise substitutes pure pursuit, falling
/// back to the control mode nearest pure pursuit whose successor is safe.
inline SupervisorDecision supervise(const VehicleState& state, const ControlAction& agent_action, const SafetyKernel& kernel,
                                    const TrackMap& map, const PurePursuitConfig& pp_cfg, const VehicleParams& params) {
    check_kernel_matches(kernel, map);
    check_kernel_params(kernel, params);
    SupervisorDecision d;
    d.agent_action = agent_action;
    const ControlAction proposed = clamp(agent_action, params);
    const VehicleState next = step(state, proposed, params.timestep, params);
    if (kernel.contains(discretize(next, kernel.spec, kernel.grid))) {
        d.implemented = proposed;
        d.next_state = next;
        return d;
    }
    d.intervened = true;
    d.reward = -1.0;
    d.episode_done = true;

    const ControlAction pp = pure_pursuit(state, map.centerline(), pp_cfg, params);
    const VehicleState pp_next = step(state, pp, params.timestep, params);
    if (kernel.contains(discretize(pp_next, kernel.spec, kernel.grid))) {
        d.implemented = pp;
        d.next_state = pp_next;
        return d;
    }
    const auto modes = control_modes(params, kernel.spec);
    std::optional<ControlAction> best;
    VehicleState best_next;
    double best_gap = 0.0;
    for (double delta : modes.deltas) {
        const ControlAction a{delta, params.fixed_speed};
        const VehicleState n = step(state, a, params.timestep, params);
        if (!kernel.contains(discretize(n, kernel.spec, kernel.grid))) continue;
        const double gap = std::abs(delta - pp.steering);
        if (!best || gap < best_gap || (gap == best_gap && std::abs(delta) < std::abs(best->steering))) {
            best = a;
            best_gap = gap;
            best_next = n;
        }
    }
    if (!best) throw Error("recursive feasibility violated");
    d.implemented = *best;
    d.next_state = best_next;
    return d;
}

}  // namespace vkrl

#endif  // VKRL_SUPERVISOR_HPP
