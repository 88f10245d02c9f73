#ifndef VKRL_AUDIT_HPP
#define VKRL_AUDIT_HPP

// Kernel audits: fixed-point check, per-member successor audit, and random
// shielded rollouts.

#include <cstdint>
#include <random>
#include <vector>

#include "vkrl/kernel.hpp"
#include "vkrl/planner.hpp"
#include "vkrl/supervisor.hpp"

namespace vkrl {

struct KernelAudit {
    std::size_t members = 0;
    std::size_t removed_by_extra_sweep = 0;
    std::size_t members_without_safe_mode = 0;
};

inline KernelAudit audit_kernel(const SafetyKernel& k, const VehicleParams& params, int workers = 1) {
    KernelAudit a;
    a.members = k.member_count();
    const auto table = build_transition_table(k.spec, control_modes(params, k.spec), params);
    std::vector<std::uint8_t> next;
    a.removed_by_extra_sweep = kernel_sweep(k.membership, next, k.grid, k.spec.num_theta, table, workers);
    for (int ix = 0; ix < k.grid.nx; ++ix)
        for (int iy = 0; iy < k.grid.ny; ++iy)
            for (int it = 0; it < k.spec.num_theta; ++it) {
                if (!k.membership[k.index(ix, iy, it)]) continue;
                bool any = false;
                for (int m = 0; m < table.num_modes() && !any; ++m) {
                    const Transition& t = table.at(it, m);
                    bool all = true;
                    for (int s = 0; s < t.count && all; ++s) {
                        const auto& tg = t.targets[static_cast<std::size_t>(s)];
                        all = k.contains(ix + tg.dx, iy + tg.dy, tg.theta);
                    }
                    any = all;
                }
                if (!any) ++a.members_without_safe_mode;
            }
    return a;
}

struct RolloutCheckConfig {
    int episodes = 1000;
    int steps = 200;
    std::uint64_t seed = 0;
};

struct RolloutCheckResult {
    int episodes = 0;
    long long steps = 0;
    long long interventions = 0;
    long long off_track = 0;             // successor poses outside the drivable area
    long long feasibility_failures = 0;  // shield found no safe action
};

/// Starts each episode at a uniformly random pose inside a uniformly chosen
/// kernel member state and drives a uniform random steering policy through
/// the shield.
inline RolloutCheckResult rollout_check(const SafetyKernel& kernel, const TrackMap& map, const VehicleParams& params,
                                        const RolloutCheckConfig& cfg) {
    check_kernel_matches(kernel, map);
    check_kernel_params(kernel, params);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < kernel.membership.size(); ++i)
        if (kernel.membership[i]) members.push_back(i);
    if (members.empty()) throw Error("kernel is empty");

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto pp = PurePursuitConfig::for_speed(params.fixed_speed, params.wheelbase);
    const double cs = kernel.spec.cell_size();
    const double bw = kernel.spec.theta_bin_width();
    const int nt = kernel.spec.num_theta;

    RolloutCheckResult r;
    for (int e = 0; e < cfg.episodes; ++e) {
        const std::size_t idx = members[pick(rng)];
        const int it = static_cast<int>(idx % static_cast<std::size_t>(nt));
        const int iy = static_cast<int>((idx / static_cast<std::size_t>(nt)) % static_cast<std::size_t>(kernel.grid.ny));
        const int ix = static_cast<int>(idx / (static_cast<std::size_t>(nt) * kernel.grid.ny));
        VehicleState s{kernel.grid.origin.x + (ix + unit(rng)) * cs, kernel.grid.origin.y + (iy + unit(rng)) * cs,
                       -kPi + (it + unit(rng)) * bw};
        // guard against the draw rounding into a neighbouring cell or bin
        if (!kernel.contains(discretize(s, kernel.spec, kernel.grid))) {
            s = {kernel.grid.origin.x + (ix + 0.5) * cs, kernel.grid.origin.y + (iy + 0.5) * cs, kernel.spec.theta_center(it)};
        }
        ++r.episodes;
        for (int t = 0; t < cfg.steps; ++t) {
            const ControlAction a{(2.0 * unit(rng) - 1.0) * params.delta_max, params.fixed_speed};
            SupervisorDecision d;
            try {
                d = supervise(s, a, kernel, map, pp, params);
            } catch (const Error&) {
                ++r.feasibility_failures;
                break;
            }
            ++r.steps;
            r.interventions += d.intervened ? 1 : 0;
            s = d.next_state;
            if (!map.is_on_track(s.position())) {
                ++r.off_track;
                break;
            }
        }
    }
    return r;
}

}  // namespace vkrl

#endif  // VKRL_AUDIT_HPP
