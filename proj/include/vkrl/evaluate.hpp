#ifndef VKRL_EVALUATE_HPP
#define VKRL_EVALUATE_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "vkrl/env.hpp"
#include "vkrl/rl/mlp.hpp"

namespace vkrl {

/// Sum of |heading change| / |displacement| over consecutive poses, 1/m.
/// Zero-length segments are skipped.
inline double total_curvature(std::span<const VehicleState> poses) {
    if (poses.size() < 3) throw Error("total curvature needs at least 3 poses");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < poses.size(); ++i) {
        const double ds = distance(poses[i].position(), poses[i + 1].position());
        if (ds < 1e-9) continue;
        sum += std::abs(wrap_angle(poses[i + 1].theta - poses[i].theta)) / ds;
    }
    return sum;
}

/// Steering command in radians for the current pose and observation.
using SteeringPolicy = std::function<double(const VehicleState&, const Observation&)>;

/// Wraps an actor network: steering = actor(obs) * delta_max.
inline SteeringPolicy actor_policy(const rl::Mlp& actor, double delta_max) {
    return [&actor, delta_max](const VehicleState&, const Observation& obs) {
        const rl::Matrix in = Eigen::Map<const rl::Matrix>(obs.values.data(), static_cast<Eigen::Index>(obs.values.size()), 1);
        return std::clamp(actor.forward(in)(0, 0), -1.0, 1.0) * delta_max;
    };
}

struct EvalConfig {
    int laps = 20;
    VehicleParams vehicle;
    LidarConfig lidar;
    double lap_budget_factor = 3.0;  // attempt fails after this many centerline-lap durations
};

struct TrajectorySample {
    double t = 0.0;
    VehicleState pose;
    double steering = 0.0;
    double speed = 0.0;
    bool intervened = false;
};

struct LapRecord {
    bool success = false;
    bool crashed = false;
    int steps = 0;
    double lap_time = 0.0;
    double distance = 0.0;
    double mean_abs_steering = 0.0;
    double total_curvature = 0.0;
    VehicleState start;
    std::vector<TrajectorySample> trajectory;  // pose after each step
};

struct EvalMetrics {
    double success_rate = 0.0;
    double mean_lap_time = 0.0;        // completed laps only; 0 if none
    double normalized_lap_time = 0.0;  // mean lap time / (centerline length / speed)
    double distance_driven = 0.0;      // representative lap
    double mean_abs_steering = 0.0;    // representative lap
    double total_curvature = 0.0;      // representative lap
    int laps_attempted = 0;
    int laps_completed = 0;
    int representative_lap = -1;  // first completed lap, else the longest attempt
    std::vector<LapRecord> laps;
};

/// Drives `cfg.laps` lap attempts back to back from the map's start pose with
/// no exploration. A completed lap hands its end pose to the next attempt; a
/// crash or an exhausted budget counts as a failure and restarts from the start
/// pose. With `kernel` set, actions go through the shield (off by default).
inline EvalMetrics evaluate(const TrackMap& map, const SteeringPolicy& policy, const EvalConfig& cfg,
                            const SafetyKernel* kernel = nullptr) {
    EnvConfig ecfg;
    ecfg.mode = kernel ? TrainingMode::Supervised : TrainingMode::Baseline;
    ecfg.vehicle = cfg.vehicle;
    ecfg.lidar = cfg.lidar;
    ecfg.pure_pursuit = PurePursuitConfig::for_speed(cfg.vehicle.fixed_speed, cfg.vehicle.wheelbase);
    RacingEnv env(map, kernel, ecfg);

    const double ref_time = map.centerline().total_length() / cfg.vehicle.fixed_speed;
    const int budget = static_cast<int>(std::ceil(cfg.lap_budget_factor * ref_time / cfg.vehicle.timestep));

    EvalMetrics m;
    Observation obs = env.reset();
    for (int lap = 0; lap < cfg.laps; ++lap) {
        LapRecord rec;
        rec.start = env.state();
        double steer_sum = 0.0;
        bool ended = false;
        while (!ended) {
            const double delta = policy(env.state(), obs);
            if (!std::isfinite(delta)) throw Error("policy returned a non-finite steering angle");
            StepResult r = env.step(delta / cfg.vehicle.delta_max);
            ++rec.steps;
            steer_sum += std::abs(r.info.implemented.steering);
            rec.trajectory.push_back({rec.steps * cfg.vehicle.timestep, env.state(), r.info.implemented.steering,
                                      r.info.implemented.speed, r.info.intervened});
            obs = std::move(r.observation);
            if (r.info.lap_complete) {
                rec.success = true;
                ended = true;
            } else if (r.info.crashed) {
                rec.crashed = true;
                ended = true;
            } else if (rec.steps >= budget) {
                ended = true;
            }
        }
        rec.lap_time = rec.steps * cfg.vehicle.timestep;
        rec.mean_abs_steering = steer_sum / rec.steps;
        std::vector<VehicleState> poses{rec.start};
        for (const auto& s : rec.trajectory) poses.push_back(s.pose);
        for (std::size_t i = 0; i + 1 < poses.size(); ++i) rec.distance += distance(poses[i].position(), poses[i + 1].position());
        rec.total_curvature = poses.size() >= 3 ? total_curvature(poses) : 0.0;

        // baseline-mode env keeps going after a lap; restart explicitly after failures
        if (!rec.success) obs = env.reset();
        else if (env.finished()) {
            const VehicleState end = env.state();
            obs = env.reset(end);
        }
        m.laps.push_back(std::move(rec));
    }

    m.laps_attempted = static_cast<int>(m.laps.size());
    double time_sum = 0.0;
    for (std::size_t i = 0; i < m.laps.size(); ++i) {
        if (!m.laps[i].success) continue;
        ++m.laps_completed;
        time_sum += m.laps[i].lap_time;
        if (m.representative_lap < 0) m.representative_lap = static_cast<int>(i);
    }
    if (m.representative_lap < 0 && !m.laps.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < m.laps.size(); ++i)
            if (m.laps[i].distance > m.laps[best].distance) best = i;
        m.representative_lap = static_cast<int>(best);
    }
    m.success_rate = m.laps_attempted ? static_cast<double>(m.laps_completed) / m.laps_attempted : 0.0;
    if (m.laps_completed > 0) {
        m.mean_lap_time = time_sum / m.laps_completed;
        m.normalized_lap_time = m.mean_lap_time / ref_time;
    }
    if (m.representative_lap >= 0) {
        const auto& rep = m.laps[static_cast<std::size_t>(m.representative_lap)];
        m.distance_driven = rep.distance;
        m.mean_abs_steering = rep.mean_abs_steering;
        m.total_curvature = rep.total_curvature;
    }
    return m;
}

inline nlohmann::ordered_json metrics_json(const EvalMetrics& m) {
    nlohmann::ordered_json j;
    j["success_rate"] = m.success_rate;
    j["mean_lap_time_s"] = m.mean_lap_time;
    j["normalized_lap_time"] = m.normalized_lap_time;
    j["distance_driven_m"] = m.distance_driven;
    j["mean_abs_steering_rad"] = m.mean_abs_steering;
    j["total_curvature_per_m"] = m.total_curvature;
    j["laps_attempted"] = m.laps_attempted;
    j["laps_completed"] = m.laps_completed;
    j["representative_lap"] = m.representative_lap;
    return j;
}

inline void write_metrics_json(const std::string& path, const EvalMetrics& m) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write metrics '" + path + "'");
    out << metrics_json(m).dump(2) << "\n";
}

/// One row per simulation step; `lap` numbers the attempt.
inline void write_trajectory_csv(const std::string& path, const EvalMetrics& m) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write trajectory '" + path + "'");
    out.precision(9);
    out << "t_s,x_m,y_m,theta_rad,delta_rad,v_mps,intervened,lap\n";
    for (std::size_t l = 0; l < m.laps.size(); ++l)
        for (const auto& s : m.laps[l].trajectory)
            out << s.t << ',' << s.pose.x << ',' << s.pose.y << ',' << s.pose.theta << ',' << s.steering << ',' << s.speed
                << ',' << (s.intervened ? 1 : 0) << ',' << l << '\n';
}

}  // namespace vkrl

#endif  // VKRL_EVALUATE_HPP
