#ifndef VKRL_RL_MLP_HPP
#define VKRL_RL_MLP_HPP

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "vkrl/common.hpp"

namespace vkrl::rl {

using Matrix = Eigen::MatrixXd;  // features x batch; one sample per column
using Vector = Eigen::VectorXd;

enum class OutputActivation { Identity, Tanh };

struct DenseLayer {
    Matrix weight;  // out x in
    Vector bias;    // out
};

/// Per-layer parameter gradients, shaped like the network.
struct Gradients {
    std::vector<DenseLayer> layers;

    void scale(double s) {
        for (auto& l : layers) {
            l.weight *= s;
            l.bias *= s;
        }
    }
};

/// Fully connected network: affine + ReLU on hidden layers, affine + output
/// activation on the last.
class Mlp {
public:
    /// Intermediate values kept for backpropagation.
    struct Cache {
        std::vector<Matrix> inputs;  // input to each layer
        Matrix output;               // after the output activation
    };

    Mlp() = default;
    Mlp(std::vector<int> sizes, OutputActivation out) : sizes_(std::move(sizes)), out_act_(out) {
        if (sizes_.size() < 2) throw Error("network needs at least an input and an output size");
        for (int s : sizes_)
            if (s < 1) throw Error("layer sizes must be positive");
        for (std::size_t i = 0; i + 1 < sizes_.size(); ++i)
            layers_.push_back({Matrix::Zero(sizes_[i + 1], sizes_[i]), Vector::Zero(sizes_[i + 1])});
    }

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases; the last
    /// layer is additionally multiplied by `last_layer_scale`.
    void initialize(std::mt19937_64& rng, double last_layer_scale = 1.0) {
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(layers_[l].weight.cols()));
            std::uniform_real_distribution<double> u(-bound, bound);
            const double s = l + 1 == layers_.size() ? last_layer_scale : 1.0;
            for (Eigen::Index i = 0; i < layers_[l].weight.size(); ++i) layers_[l].weight.data()[i] = s * u(rng);
            for (Eigen::Index i = 0; i < layers_[l].bias.size(); ++i) layers_[l].bias[i] = s * u(rng);
        }
    }

    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    const std::vector<int>& sizes() const { return sizes_; }
    OutputActivation output_activation() const { return out_act_; }
    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    Matrix forward(const Matrix& input) const {
        Cache c;
        return forward(input, c);
    }

    Matrix forward(const Matrix& input, Cache& cache) const {
        if (input.rows() != input_size()) throw Error("network input has wrong size");
        cache.inputs.resize(layers_.size());
        Matrix a = input;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            cache.inputs[l] = a;
            Matrix z = layers_[l].weight * a;
            z.colwise() += layers_[l].bias;
            if (l + 1 < layers_.size()) {
                a = z.cwiseMax(0.0);
            } else {
                a = out_act_ == OutputActivation::Tanh ? Matrix(z.array().tanh()) : z;
            }
        }
        cache.output = a;
        return a;
    }

    /// Backpropagates dL/d(output) through the cached pass. Writes parameter
    /// gradients into `grads` (overwriting) and returns dL/d(input).
    Matrix backward(const Cache& cache, const Matrix& grad_output, Gradients& grads) const {
        grads.layers.resize(layers_.size());
        Matrix g = grad_output;
        if (out_act_ == OutputActivation::Tanh) g = g.array() * (1.0 - cache.output.array().square());
        for (std::size_t l = layers_.size(); l-- > 0;) {
            grads.layers[l].weight = g * cache.inputs[l].transpose();
            grads.layers[l].bias = g.rowwise().sum();
            Matrix gin = layers_[l].weight.transpose() * g;
            if (l > 0) gin = (cache.inputs[l].array() > 0.0).select(gin, 0.0);  // ReLU of the previous layer
            g = std::move(gin);
        }
        return g;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
        return n;
    }

    /// Parameters in layer order: weight (row-major) then bias.
    std::vector<double> flat_parameters() const {
        std::vector<double> out;
        out.reserve(parameter_count());
        for (const auto& l : layers_) {
            for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
                for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(l.weight(r, c));
            for (Eigen::Index i = 0; i < l.bias.size(); ++i) out.push_back(l.bias[i]);
        }
        return out;
    }

    void set_flat_parameters(std::span<const double> p) {
        if (p.size() != parameter_count()) throw Error("parameter vector has wrong length");
        std::size_t k = 0;
        for (auto& l : layers_) {
            for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
                for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = p[k++];
            for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = p[k++];
        }
    }

    bool all_finite() const {
        for (const auto& l : layers_)
            if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
        return true;
    }

    /// target <- tau * source + (1 - tau) * target
    void soft_update_from(const Mlp& source, double tau) {
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            if (tau == 1.0) {
                layers_[l] = source.layers_[l];
            } else if (tau != 0.0) {
                layers_[l].weight = tau * source.layers_[l].weight + (1.0 - tau) * layers_[l].weight;
                layers_[l].bias = tau * source.layers_[l].bias + (1.0 - tau) * layers_[l].bias;
            }
        }
    }

private:
    std::vector<int> sizes_;
    OutputActivation out_act_ = OutputActivation::Identity;
    std::vector<DenseLayer> layers_;
};

inline std::vector<double> flatten(const Gradients& g) {
    std::vector<double> out;
    for (const auto& l : g.layers) {
        for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out.push_back(l.weight(r, c));
        for (Eigen::Index i = 0; i < l.bias.size(); ++i) out.push_back(l.bias[i]);
    }
    return out;
}

/// Mean-squared-error regression of a scalar-output network onto `targets`
/// (1 x batch). Returns the loss times `loss_scale`; gradients are of that.
inline double mse_gradients(const Mlp& net, const Matrix& inputs, const Matrix& targets, Gradients& grads,
                            double loss_scale = 1.0) {
    Mlp::Cache cache;
    const Matrix pred = net.forward(inputs, cache);
    const Matrix diff = pred - targets;
    const double n = static_cast<double>(diff.size());
    const double loss = loss_scale * diff.squaredNorm() / n;
    if (!std::isfinite(loss)) throw Error("non-finite critic loss");
    net.backward(cache, (2.0 * loss_scale / n) * diff, grads);
    return loss;
}

/// Deterministic policy-gradient objective: loss = -mean Q(s, actor(s)). The
/// critic takes [observation; action] and is held fixed. Returns the loss.
inline double actor_gradients(const Mlp& actor, const Mlp& critic, const Matrix& observations, Gradients& grads,
                              double loss_scale = 1.0) {
    Mlp::Cache actor_cache;
    const Matrix actions = actor.forward(observations, actor_cache);
    Matrix critic_in(observations.rows() + actions.rows(), observations.cols());
    critic_in << observations, actions;
    Mlp::Cache critic_cache;
    const Matrix q = critic.forward(critic_in, critic_cache);
    const double n = static_cast<double>(q.cols());
    const double loss = -loss_scale * q.sum() / n;
    if (!std::isfinite(loss)) throw Error("non-finite actor loss");
    Gradients critic_grads;
    const Matrix dq = Matrix::Constant(1, q.cols(), -loss_scale / n);
    const Matrix d_in = critic.backward(critic_cache, dq, critic_grads);
    actor.backward(actor_cache, d_in.bottomRows(actions.rows()), grads);
    return loss;
}

}  // namespace vkrl::rl

#endif  // VKRL_RL_MLP_HPP
