#ifndef VKRL_TRAINING_HPP
#define VKRL_TRAINING_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vkrl/env.hpp"
#include "vkrl/rl/td3.hpp"

namespace vkrl {

/// What the agent does during the first `warmup_steps` steps.
enum class WarmupActions { Uniform, PolicyWithNoise };

struct TrainConfig {
    TrainingMode mode = TrainingMode::Supervised;
    int total_steps = 10000;
    int chunk_size = 20;
    int updates_per_chunk = 20;
    std::uint64_t seed = 0;
    VehicleParams vehicle;
    LidarConfig lidar;
    rl::Td3Config td3;
    WarmupActions warmup = WarmupActions::Uniform;

    void validate() const {
        if (total_steps <= 0) throw Error("total steps must be positive");
        if (chunk_size < 1) throw Error("chunk size must be >= 1");
        if (updates_per_chunk < 0) throw Error("updates per chunk must be >= 0");
        vehicle.validate();
        lidar.validate();
        td3.validate();
    }
};

enum class TerminalCause { Intervention, Crash, LapComplete, Budget };

inline const char* to_string(TerminalCause c) {
    switch (c) {
        case TerminalCause::Intervention: return "intervention";
        case TerminalCause::Crash: return "crash";
        case TerminalCause::LapComplete: return "lap-complete";
        case TerminalCause::Budget: return "budget";
    }
    return "?";
}

struct EpisodeRecord {
    int start_step = 0;
    int length = 0;
    TerminalCause cause = TerminalCause::Budget;
    double total_reward = 0.0;
};

/// One data-collection chunk and the update burst that follows it.
struct ChunkLog {
    int index = 0;
    double reward_sum = 0.0;
    int interventions = 0;
    int crashes = 0;
    int laps = 0;
    int updates = 0;
    double critic_loss = std::numeric_limits<double>::quiet_NaN();  // mean over the burst
};

struct TrainResult {
    rl::Td3Agent agent;
    std::vector<ChunkLog> chunks;
    std::vector<EpisodeRecord> episodes;
    int total_crashes = 0;
    int total_interventions = 0;
    int laps_completed = 0;
    int update_bursts = 0;
    std::vector<double> step_rewards;
    std::vector<std::uint8_t> step_interventions;
};

/// Collect `chunk_size` steps, then stop and run `updates_per_chunk` TD3
/// updates (skipped while the buffer holds less than one batch). The first
/// `warmup_steps` actions are uniform random.
inline TrainResult run_training(const TrackMap& map, const SafetyKernel* kernel, const TrainConfig& cfg,
                                const std::function<void(const ChunkLog&)>& on_chunk = {}) {
    cfg.validate();
    EnvConfig ecfg;
    ecfg.mode = cfg.mode;
    ecfg.vehicle = cfg.vehicle;
    ecfg.lidar = cfg.lidar;
    ecfg.pure_pursuit = PurePursuitConfig::for_speed(cfg.vehicle.fixed_speed, cfg.vehicle.wheelbase);
    RacingEnv env(map, kernel, ecfg);

    TrainResult res{rl::Td3Agent(cfg.td3, cfg.lidar.num_beams_obs, cfg.seed), {}, {}, 0, 0, 0, 0, {}, {}};
    rl::ReplayBuffer buffer(cfg.td3.buffer_capacity, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    auto& agent = res.agent;
    res.step_rewards.reserve(static_cast<std::size_t>(cfg.total_steps));
    res.step_interventions.reserve(static_cast<std::size_t>(cfg.total_steps));

    Observation obs = env.reset();
    EpisodeRecord episode;
    ChunkLog chunk;
    for (int t = 0; t < cfg.total_steps; ++t) {
        const bool uniform = t < cfg.td3.warmup_steps && cfg.warmup == WarmupActions::Uniform;
        const double action = uniform ? agent.random_action() : agent.act(obs.values, true);
        StepResult r = env.step(action);

        if (cfg.mode == TrainingMode::Supervised && r.info.crashed) throw Error("crash detected during supervised training");
        buffer.push({obs.values, action, r.reward, r.observation.values, r.done});
        res.step_rewards.push_back(r.reward);
        res.step_interventions.push_back(r.info.intervened ? 1 : 0);
        chunk.reward_sum += r.reward;
        chunk.interventions += r.info.intervened ? 1 : 0;
        chunk.crashes += r.info.crashed ? 1 : 0;
        chunk.laps += r.info.lap_complete ? 1 : 0;
        res.total_crashes += r.info.crashed ? 1 : 0;
        res.total_interventions += r.info.intervened ? 1 : 0;
        res.laps_completed += r.info.lap_complete ? 1 : 0;
        episode.length += 1;
        episode.total_reward += r.reward;
        obs = std::move(r.observation);

        if (r.done) {
            episode.cause = r.info.intervened ? TerminalCause::Intervention
                          : r.info.crashed    ? TerminalCause::Crash
                                              : TerminalCause::LapComplete;
            res.episodes.push_back(episode);
            episode = EpisodeRecord{t + 1, 0, TerminalCause::Budget, 0.0};
            if (cfg.mode == TrainingMode::Baseline) obs = env.reset();
        }

        if ((t + 1) % cfg.chunk_size == 0) {
            ++res.update_bursts;
            if (buffer.size() >= static_cast<std::size_t>(cfg.td3.batch_size)) {
                double loss = 0.0;
                for (int u = 0; u < cfg.updates_per_chunk; ++u) loss += agent.update(buffer).critic_loss;
                chunk.updates = cfg.updates_per_chunk;
                if (cfg.updates_per_chunk > 0) chunk.critic_loss = loss / cfg.updates_per_chunk;
            }
            res.chunks.push_back(chunk);
            if (on_chunk) on_chunk(chunk);
            chunk = ChunkLog{static_cast<int>(res.chunks.size())};
        }
    }
    if (episode.length > 0) res.episodes.push_back(episode);
    if (cfg.total_steps % cfg.chunk_size != 0) res.chunks.push_back(chunk);  // trailing partial chunk, no burst
    return res;
}

inline TrainResult run_supervised_training(const TrackMap& map, const SafetyKernel& kernel, TrainConfig cfg,
                                           const std::function<void(const ChunkLog&)>& on_chunk = {}) {
    cfg.mode = TrainingMode::Supervised;
    return run_training(map, &kernel, cfg, on_chunk);
}

inline TrainResult run_baseline_training(const TrackMap& map, TrainConfig cfg,
                                         const std::function<void(const ChunkLog&)>& on_chunk = {}) {
    cfg.mode = TrainingMode::Baseline;
    return run_training(map, nullptr, cfg, on_chunk);
}

}  // namespace vkrl

#endif  // VKRL_TRAINING_HPP
