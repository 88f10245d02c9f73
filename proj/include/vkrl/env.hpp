#ifndef VKRL_ENV_HPP
#define VKRL_ENV_HPP

#include <algorithm>
#include <string>

#include "vkrl/dynamics.hpp"
#include "vkrl/kernel.hpp"
#include "vkrl/planner.hpp"
#include "vkrl/sensor.hpp"
#include "vkrl/supervisor.hpp"
#include "vkrl/trackmap.hpp"

namespace vkrl {

enum class TrainingMode { Supervised, Baseline };

inline std::string to_string(TrainingMode m) { return m == TrainingMode::Supervised ? "supervised" : "baseline"; }

inline TrainingMode parse_mode(const std::string& s) {
    if (s == "supervised") return TrainingMode::Supervised;
    if (s == "baseline") return TrainingMode::Baseline;
    throw Error("unknown training mode '" + s + "' (expected supervised|baseline)");
}

struct EnvConfig {
    TrainingMode mode = TrainingMode::Supervised;
    VehicleParams vehicle;
    LidarConfig lidar;
    PurePursuitConfig pure_pursuit = PurePursuitConfig::for_speed(2.0, 0.33);
};

struct StepInfo {
    bool intervened = false;
    bool crashed = false;
    bool lap_complete = false;
    ControlAction agent_action;
    ControlAction implemented;
    double progress_delta = 0.0;  // unwrapped, in laps
};

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

/// Simulated vehicle on a track. In supervised mode every action goes
/// through the shield and `done` marks interventions only; the pose is never
/// reset. In baseline mode actions are applied directly and crashes or
/// completed laps end the episode until reset().
class RacingEnv {
public:
    RacingEnv(const TrackMap& map, const SafetyKernel* kernel, EnvConfig cfg) : map_(map), kernel_(kernel), cfg_(cfg) {
        cfg_.vehicle.validate();
        cfg_.lidar.validate();
        if (cfg_.mode == TrainingMode::Supervised) {
            if (!kernel_) throw Error("supervised mode needs a safety kernel");
            check_kernel_matches(*kernel_, map_);
            check_kernel_params(*kernel_, cfg_.vehicle);
        }
    }

    VehicleState start_pose() const { return {map_.start_position().x, map_.start_position().y, wrap_angle(map_.start_heading())}; }

    Observation reset() { return reset(start_pose()); }

    Observation reset(const VehicleState& pose) {
        if (!map_.is_on_track(pose.position())) throw Error("reset pose is off track");
        if (cfg_.mode == TrainingMode::Supervised && !is_safe(*kernel_, map_, pose))
            throw Error("reset pose is outside the safety kernel");
        state_ = pose;
        lap_ = LapProgress(map_.progress_unchecked(pose.position()));
        finished_ = false;
        started_ = true;
        return sense(map_, state_, cfg_.lidar);
    }

    StepResult step(double normalized_action) {
        if (!started_) throw Error("environment stepped before reset()");
        if (finished_) throw Error("episode finished; reset() before stepping again");
        const double a = std::clamp(normalized_action, -1.0, 1.0);
        const ControlAction proposed{a * cfg_.vehicle.delta_max, cfg_.vehicle.fixed_speed};
        StepResult r;
        r.info.agent_action = proposed;
        if (cfg_.mode == TrainingMode::Supervised) {
            const auto d = supervise(state_, proposed, *kernel_, map_, cfg_.pure_pursuit, cfg_.vehicle);
            state_ = d.next_state;
            r.info.implemented = d.implemented;
            r.info.intervened = d.intervened;
            r.reward = d.reward;
            r.done = d.episode_done;
            if (!map_.is_on_track(state_.position())) throw Error("boundary collision under supervision");
            r.info.progress_delta = lap_.update(map_.progress_unchecked(state_.position()));
            if (lap_.cumulative() >= 1.0) {
                r.info.lap_complete = true;
                lap_ = LapProgress(lap_.last());
            }
            r.observation = sense(map_, state_, cfg_.lidar);
            return r;
        }

        const ControlAction applied = clamp(proposed, cfg_.vehicle);
        r.info.implemented = applied;
        state_ = vkrl::step(state_, applied, cfg_.vehicle.timestep, cfg_.vehicle);
        if (!map_.is_on_track(state_.position())) {
            r.info.crashed = true;
            r.reward = -1.0;
            r.done = true;
            finished_ = true;
            r.observation.values.assign(static_cast<std::size_t>(cfg_.lidar.num_beams_obs), 0.0);
            return r;
        }
        const double before = lap_.cumulative();
        const double delta = lap_.update(map_.progress_unchecked(state_.position()));
        r.info.progress_delta = delta;
        if (lap_.cumulative() >= 1.0) {
            // credit progress only up to the start line, plus the completion bonus
            r.reward = (1.0 - before) + 1.0;
            r.info.lap_complete = true;
            r.done = true;
            finished_ = true;
        } else {
            r.reward = delta;
        }
        r.observation = sense(map_, state_, cfg_.lidar);
        return r;
    }

    const VehicleState& state() const { return state_; }
    bool finished() const { return finished_; }
    const EnvConfig& config() const { return cfg_; }
    const TrackMap& map() const { return map_; }

private:
    const TrackMap& map_;
    const SafetyKernel* kernel_;
    EnvConfig cfg_;
    VehicleState state_;
    LapProgress lap_;
    bool finished_ = false;
    bool started_ = false;
};

}  // namespace vkrl

#endif  // VKRL_ENV_HPP
