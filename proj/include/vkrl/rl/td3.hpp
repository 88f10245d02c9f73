#ifndef VKRL_RL_TD3_HPP
#define VKRL_RL_TD3_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "vkrl/rl/adam.hpp"
#include "vkrl/rl/mlp.hpp"
#include "vkrl/rl/replay_buffer.hpp"

namespace vkrl::rl {

struct Td3Config {
    double gamma = 0.99;
    double tau = 0.005;
    int policy_delay = 2;
    double exploration_noise = 0.1;
    double target_noise = 0.2;
    double noise_clip = 0.5;
    int batch_size = 100;
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    int warmup_steps = 300;
    std::size_t buffer_capacity = 200000;
    int hidden = 100;
    double actor_final_scale = 0.01;

    void validate() const {
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("gamma must be in [0, 1]");
        if (!(tau > 0.0 && tau <= 1.0)) throw Error("tau must be in (0, 1]");
        if (policy_delay < 1) throw Error("policy delay must be >= 1");
        if (batch_size < 1 || hidden < 1 || buffer_capacity < 1) throw Error("sizes must be positive");
        if (exploration_noise < 0 || target_noise < 0 || noise_clip < 0) throw Error("noise scales must be non-negative");
        if (!(actor_lr > 0 && critic_lr > 0)) throw Error("learning rates must be positive");
        if (warmup_steps < 0) throw Error("warmup must be non-negative");
    }
};

struct UpdateDiagnostics {
    double critic_loss = 0.0;
    std::optional<double> actor_loss;
};

/// Twin-critic actor-critic with target policy smoothing and delayed actor
/// and target updates. Action dimension is 1 (normalized steering).
class Td3Agent {
public:
    Td3Agent(const Td3Config& cfg, int obs_dim, std::uint64_t seed) : cfg_(cfg), obs_dim_(obs_dim), rng_(seed) {
        cfg_.validate();
        const int h = cfg_.hidden;
        actor_ = Mlp({obs_dim, h, h, 1}, OutputActivation::Tanh);
        critic1_ = Mlp({obs_dim + 1, h, h, 1}, OutputActivation::Identity);
        critic2_ = critic1_;
        actor_.initialize(rng_, cfg_.actor_final_scale);
        critic1_.initialize(rng_);
        critic2_.initialize(rng_);
        actor_target_ = actor_;
        critic1_target_ = critic1_;
        critic2_target_ = critic2_;
        actor_opt_ = Adam(actor_, {cfg_.actor_lr});
        critic1_opt_ = Adam(critic1_, {cfg_.critic_lr});
        critic2_opt_ = Adam(critic2_, {cfg_.critic_lr});
    }

    /// Normalized steering in [-1, 1]. Exploration adds clipped Gaussian noise.
    double act(std::span<const double> observation, bool explore) {
        if (static_cast<int>(observation.size()) != obs_dim_) throw Error("observation has wrong size");
        const Matrix in = Eigen::Map<const Matrix>(observation.data(), obs_dim_, 1);
        double a = actor_.forward(in)(0, 0);
        if (explore) a += cfg_.exploration_noise * normal_(rng_);
        return std::clamp(a, -1.0, 1.0);
    }

    /// Uniform random action for the warmup phase, drawn from the agent's rng.
    double random_action() { return std::uniform_real_distribution<double>(-1.0, 1.0)(rng_); }

    /// y = r + gamma (1 - done) min(Q1'(s', a'), Q2'(s', a')) with
    /// a' = clip(actor'(s') + clip(noise, +-c), [-1, 1]).
    Matrix critic_targets(const Batch& b) {
        Matrix next_a = actor_target_.forward(b.next_observations);
        for (Eigen::Index j = 0; j < next_a.cols(); ++j) {
            const double eps = std::clamp(cfg_.target_noise * normal_(rng_), -cfg_.noise_clip, cfg_.noise_clip);
            next_a(0, j) = std::clamp(next_a(0, j) + eps, -1.0, 1.0);
        }
        Matrix in(obs_dim_ + 1, b.size());
        in << b.next_observations, next_a;
        const Matrix q = critic1_target_.forward(in).cwiseMin(critic2_target_.forward(in));
        return b.rewards.array() + cfg_.gamma * (1.0 - b.dones.array()) * q.array();
    }

    UpdateDiagnostics update(ReplayBuffer& buffer) {
        if (buffer.size() < static_cast<std::size_t>(cfg_.batch_size)) throw Error("insufficient replay buffer for update");
        return update_on_batch(buffer.sample_batch(static_cast<std::size_t>(cfg_.batch_size)));
    }

    UpdateDiagnostics update_on_batch(const Batch& b) {
        UpdateDiagnostics diag;
        const Matrix y = critic_targets(b);
        Matrix in(obs_dim_ + 1, b.size());
        in << b.observations, b.actions;
        Gradients g;
        diag.critic_loss = mse_gradients(critic1_, in, y, g);
        critic1_opt_.step(critic1_, g);
        diag.critic_loss += mse_gradients(critic2_, in, y, g);
        critic2_opt_.step(critic2_, g);

        ++updates_;
        if (updates_ % static_cast<std::uint64_t>(cfg_.policy_delay) == 0) {
            diag.actor_loss = actor_gradients(actor_, critic1_, b.observations, g);
            actor_opt_.step(actor_, g);
            actor_target_.soft_update_from(actor_, cfg_.tau);
            critic1_target_.soft_update_from(critic1_, cfg_.tau);
            critic2_target_.soft_update_from(critic2_, cfg_.tau);
        }
        return diag;
    }

    const Td3Config& config() const { return cfg_; }
    int observation_size() const { return obs_dim_; }
    std::uint64_t update_count() const { return updates_; }

    Mlp& actor() { return actor_; }
    Mlp& actor_target() { return actor_target_; }
    Mlp& critic1() { return critic1_; }
    Mlp& critic2() { return critic2_; }
    Mlp& critic1_target() { return critic1_target_; }
    Mlp& critic2_target() { return critic2_target_; }
    const Mlp& actor() const { return actor_; }
    const Mlp& actor_target() const { return actor_target_; }
    const Mlp& critic1() const { return critic1_; }
    const Mlp& critic2() const { return critic2_; }
    const Mlp& critic1_target() const { return critic1_target_; }
    const Mlp& critic2_target() const { return critic2_target_; }
    Adam& actor_optimizer() { return actor_opt_; }
    Adam& critic1_optimizer() { return critic1_opt_; }
    Adam& critic2_optimizer() { return critic2_opt_; }
    const Adam& actor_optimizer() const { return actor_opt_; }
    const Adam& critic1_optimizer() const { return critic1_opt_; }
    const Adam& critic2_optimizer() const { return critic2_opt_; }
    std::mt19937_64& rng() { return rng_; }
    const std::mt19937_64& rng() const { return rng_; }
    std::normal_distribution<double>& normal() { return normal_; }
    const std::normal_distribution<double>& normal() const { return normal_; }
    void set_update_count(std::uint64_t n) { updates_ = n; }

private:
    Td3Config cfg_;
    int obs_dim_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    Mlp actor_, actor_target_;
    Mlp critic1_, critic2_, critic1_target_, critic2_target_;
    Adam actor_opt_, critic1_opt_, critic2_opt_;
    std::uint64_t updates_ = 0;
};

}  // namespace vkrl::rl

#endif  // VKRL_RL_TD3_HPP
