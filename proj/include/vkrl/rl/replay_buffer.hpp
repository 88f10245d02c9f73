#ifndef VKRL_RL_REPLAY_BUFFER_HPP
#define VKRL_RL_REPLAY_BUFFER_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "vkrl/common.hpp"
#include "vkrl/rl/mlp.hpp"

namespace vkrl::rl {

struct Transition {
    std::vector<double> observation;
    double action = 0.0;  // normalized steering in [-1, 1]
    double reward = 0.0;
    std::vector<double> next_observation;
    bool done = false;
};

/// Column-stacked minibatch.
struct Batch {
    Matrix observations;       // obs_dim x n
    Matrix actions;            // 1 x n
    Matrix rewards;            // 1 x n
    Matrix next_observations;  // obs_dim x n
    Matrix dones;              // 1 x n, 1.0 for terminal

    Eigen::Index size() const { return actions.cols(); }
};

inline Batch make_batch(const std::vector<const Transition*>& items) {
    if (items.empty()) throw Error("empty batch");
    const auto n = static_cast<Eigen::Index>(items.size());
    const auto d = static_cast<Eigen::Index>(items.front()->observation.size());
    Batch b{Matrix(d, n), Matrix(1, n), Matrix(1, n), Matrix(d, n), Matrix(1, n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        const Transition& t = *items[static_cast<std::size_t>(j)];
        if (static_cast<Eigen::Index>(t.observation.size()) != d || static_cast<Eigen::Index>(t.next_observation.size()) != d)
            throw Error("transition observation size mismatch");
        for (Eigen::Index i = 0; i < d; ++i) {
            b.observations(i, j) = t.observation[static_cast<std::size_t>(i)];
            b.next_observations(i, j) = t.next_observation[static_cast<std::size_t>(i)];
        }
        b.actions(0, j) = t.action;
        b.rewards(0, j) = t.reward;
        b.dones(0, j) = t.done ? 1.0 : 0.0;
    }
    return b;
}

/// Fixed-capacity FIFO of transitions with its own seeded sampler.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity, std::uint64_t seed = 0) : capacity_(capacity), rng_(seed) {
        if (capacity_ == 0) throw Error("replay buffer capacity must be positive");
    }

    void push(Transition t) {
        if (items_.size() < capacity_) {
            items_.push_back(std::move(t));
        } else {
            items_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }

    /// i-th oldest transition.
    const Transition& at(std::size_t i) const { return items_[(head_ + i) % items_.size()]; }

    /// Uniform sample with replacement.
    std::vector<const Transition*> sample(std::size_t n) {
        if (items_.empty()) throw Error("cannot sample from an empty replay buffer");
        std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
        std::vector<const Transition*> out(n);
        for (auto& p : out) p = &items_[pick(rng_)];
        return out;
    }

    Batch sample_batch(std::size_t n) { return make_batch(sample(n)); }

private:
    std::size_t capacity_;
    std::vector<Transition> items_;
    std::size_t head_ = 0;  // oldest element once full
    std::mt19937_64 rng_;
};

}  // namespace vkrl::rl

#endif  // VKRL_RL_REPLAY_BUFFER_HPP
