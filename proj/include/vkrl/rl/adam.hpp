#ifndef VKRL_RL_ADAM_HPP
#define VKRL_RL_ADAM_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "vkrl/rl/mlp.hpp"

namespace vkrl::rl {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class Adam {
public:
    Adam() = default;
    Adam(const Mlp& net, AdamConfig cfg) : cfg_(cfg) {
        for (const auto& l : net.layers()) {
            m_.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
            v_.layers.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
        }
    }

    /// Descends along `grads`.
    void step(Mlp& net, const Gradients& grads) {
        ++t_;
        const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        const double lr = cfg_.learning_rate * std::sqrt(c2) / c1;
        auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
            m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
            v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
            // epsilon scaled to match the bias-corrected form
            param.array() -= lr * m.array() / (v.array().sqrt() + cfg_.epsilon * std::sqrt(c2));
        };
        for (std::size_t l = 0; l < net.layers().size(); ++l) {
            auto& layer = net.layers()[l];
            update(layer.weight, m_.layers[l].weight, v_.layers[l].weight, grads.layers[l].weight);
            update(layer.bias, m_.layers[l].bias, v_.layers[l].bias, grads.layers[l].bias);
        }
    }

    const AdamConfig& config() const { return cfg_; }
    std::uint64_t steps() const { return t_; }
    Gradients& first_moment() { return m_; }
    Gradients& second_moment() { return v_; }
    const Gradients& first_moment() const { return m_; }
    const Gradients& second_moment() const { return v_; }
    void set_steps(std::uint64_t t) { t_ = t; }

private:
    AdamConfig cfg_;
    Gradients m_;
    Gradients v_;
    std::uint64_t t_ = 0;
};

}  // namespace vkrl::rl

#endif  // VKRL_RL_ADAM_HPP
