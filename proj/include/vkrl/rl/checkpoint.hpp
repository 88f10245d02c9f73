#ifndef VKRL_RL_CHECKPOINT_HPP
#define VKRL_RL_CHECKPOINT_HPP

// Agent checkpoint: magic, version, kind, config, flat parameter arrays, then
// (full checkpoints only) targets, optimizer moments and rng state. Every
// number is little-endian; a trailing FNV-1a digest covers the whole body.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "vkrl/common.hpp"
#include "vkrl/rl/td3.hpp"

namespace vkrl::rl {

inline constexpr char kAgentMagic[8] = {'V', 'K', 'R', 'L', 'A', 'G', 'N', 'T'};
inline constexpr std::uint32_t kAgentVersion = 1;

enum class CheckpointKind : std::uint32_t { FullAgent = 1, PolicyOnly = 2 };

namespace detail {

inline void write_config(std::ostream& os, const Td3Config& c) {
    io::write_le(os, c.gamma);
    io::write_le(os, c.tau);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(c.policy_delay));
    io::write_le(os, c.exploration_noise);
    io::write_le(os, c.target_noise);
    io::write_le(os, c.noise_clip);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(c.batch_size));
    io::write_le(os, c.actor_lr);
    io::write_le(os, c.critic_lr);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(c.warmup_steps));
    io::write_le<std::uint64_t>(os, c.buffer_capacity);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(c.hidden));
    io::write_le(os, c.actor_final_scale);
}

inline Td3Config read_config(std::istream& is) {
    Td3Config c;
    c.gamma = io::read_le<double>(is, "config");
    c.tau = io::read_le<double>(is, "config");
    c.policy_delay = static_cast<int>(io::read_le<std::uint32_t>(is, "config"));
    c.exploration_noise = io::read_le<double>(is, "config");
    c.target_noise = io::read_le<double>(is, "config");
    c.noise_clip = io::read_le<double>(is, "config");
    c.batch_size = static_cast<int>(io::read_le<std::uint32_t>(is, "config"));
    c.actor_lr = io::read_le<double>(is, "config");
    c.critic_lr = io::read_le<double>(is, "config");
    c.warmup_steps = static_cast<int>(io::read_le<std::uint32_t>(is, "config"));
    c.buffer_capacity = io::read_le<std::uint64_t>(is, "config");
    c.hidden = static_cast<int>(io::read_le<std::uint32_t>(is, "config"));
    c.actor_final_scale = io::read_le<double>(is, "config");
    return c;
}

inline void write_net(std::ostream& os, const Mlp& net) {
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(net.sizes().size()));
    for (int s : net.sizes()) io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s));
    io::write_le<std::uint8_t>(os, net.output_activation() == OutputActivation::Tanh ? 1 : 0);
    const auto p = net.flat_parameters();
    io::write_f64_array(os, p);
}

inline Mlp read_net(std::istream& is) {
    const auto n = io::read_le<std::uint32_t>(is, "network shape");
    if (n < 2 || n > 64) throw Error("corrupt network shape in checkpoint");
    std::vector<int> sizes(n);
    for (auto& s : sizes) {
        s = static_cast<int>(io::read_le<std::uint32_t>(is, "network shape"));
        if (s < 1 || s > 1 << 16) throw Error("corrupt network shape in checkpoint");
    }
    const auto act = io::read_le<std::uint8_t>(is, "network shape");
    Mlp net(sizes, act ? OutputActivation::Tanh : OutputActivation::Identity);
    std::vector<double> p(net.parameter_count());
    io::read_f64_array(is, p, "network parameters");
    net.set_flat_parameters(p);
    return net;
}

inline void expect_same_shape(const Mlp& a, const Mlp& b) {
    if (a.sizes() != b.sizes() || a.output_activation() != b.output_activation())
        throw Error("checkpoint network shape does not match configuration");
}

inline void write_moments(std::ostream& os, const Adam& opt) {
    io::write_le<std::uint64_t>(os, opt.steps());
    io::write_f64_array(os, flatten(opt.first_moment()));
    io::write_f64_array(os, flatten(opt.second_moment()));
}

inline void read_moments(std::istream& is, Adam& opt, const Mlp& shape) {
    opt.set_steps(io::read_le<std::uint64_t>(is, "optimizer state"));
    for (Gradients* g : {&opt.first_moment(), &opt.second_moment()}) {
        Mlp tmp = shape;
        std::vector<double> p(tmp.parameter_count());
        io::read_f64_array(is, p, "optimizer state");
        tmp.set_flat_parameters(p);
        for (std::size_t l = 0; l < tmp.layers().size(); ++l) {
            g->layers[l].weight = tmp.layers()[l].weight;
            g->layers[l].bias = tmp.layers()[l].bias;
        }
    }
}

inline std::string read_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw Error("agent checkpoint not found: " + path);
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Verifies magic, version and digest; returns a stream positioned after the version.
inline std::istringstream open_body(const std::string& path, std::string& data) {
    data = read_file(path);
    if (data.size() < sizeof(kAgentMagic) + 4 + 8 || !std::equal(kAgentMagic, kAgentMagic + 8, data.begin()))
        throw Error("corrupt agent checkpoint: " + path);
    std::istringstream tail(data.substr(data.size() - 8));
    const auto digest = io::read_le<std::uint64_t>(tail, "checksum");
    Fnv1a h;
    h.update(data.data(), data.size() - 8);
    if (h.digest() != digest) throw Error("corrupt agent checkpoint (checksum mismatch): " + path);
    std::istringstream is(data.substr(0, data.size() - 8));
    is.seekg(sizeof(kAgentMagic));
    const auto version = io::read_le<std::uint32_t>(is, "version");
    if (version != kAgentVersion) throw Error("unsupported agent checkpoint version " + std::to_string(version));
    return is;
}

inline void write_with_digest(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write agent checkpoint '" + path + "'");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    Fnv1a h;
    h.update(body.data(), body.size());
    io::write_le<std::uint64_t>(out, h.digest());
    if (!out) throw Error("failed writing agent checkpoint '" + path + "'");
}

}  // namespace detail

/// Saves everything needed to resume training, or only the actor when
/// `kind` is PolicyOnly.
inline void save_agent(const std::string& path, const Td3Agent& agent, CheckpointKind kind = CheckpointKind::FullAgent) {
    std::ostringstream os(std::ios::binary);
    os.write(kAgentMagic, sizeof(kAgentMagic));
    io::write_le<std::uint32_t>(os, kAgentVersion);
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(kind));
    io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(agent.observation_size()));
    detail::write_config(os, agent.config());
    detail::write_net(os, agent.actor());
    if (kind == CheckpointKind::FullAgent) {
        detail::write_net(os, agent.actor_target());
        detail::write_net(os, agent.critic1());
        detail::write_net(os, agent.critic2());
        detail::write_net(os, agent.critic1_target());
        detail::write_net(os, agent.critic2_target());
        detail::write_moments(os, agent.actor_optimizer());
        detail::write_moments(os, agent.critic1_optimizer());
        detail::write_moments(os, agent.critic2_optimizer());
        io::write_le<std::uint64_t>(os, agent.update_count());
        std::ostringstream rng_text;
        rng_text << agent.rng() << ' ' << agent.normal();
        io::write_string(os, rng_text.str());
    }
    detail::write_with_digest(path, os.str());
}

/// Restores a full training checkpoint.
inline Td3Agent load_agent(const std::string& path) {
    std::string data;
    auto is = detail::open_body(path, data);
    const auto kind = static_cast<CheckpointKind>(io::read_le<std::uint32_t>(is, "kind"));
    if (kind != CheckpointKind::FullAgent) throw Error("checkpoint holds only a policy; cannot resume training: " + path);
    const int obs_dim = static_cast<int>(io::read_le<std::uint32_t>(is, "observation size"));
    if (obs_dim < 1 || obs_dim > 1 << 16) throw Error("corrupt agent checkpoint: " + path);
    Td3Agent agent(detail::read_config(is), obs_dim, 0);
    for (Mlp* net : {&agent.actor(), &agent.actor_target(), &agent.critic1(), &agent.critic2(), &agent.critic1_target(),
                     &agent.critic2_target()}) {
        Mlp loaded = detail::read_net(is);
        detail::expect_same_shape(loaded, *net);
        *net = std::move(loaded);
    }
    detail::read_moments(is, agent.actor_optimizer(), agent.actor());
    detail::read_moments(is, agent.critic1_optimizer(), agent.critic1());
    detail::read_moments(is, agent.critic2_optimizer(), agent.critic2());
    agent.set_update_count(io::read_le<std::uint64_t>(is, "update count"));
    std::istringstream rng_text(io::read_string(is, "rng state"));
    rng_text >> agent.rng() >> agent.normal();
    if (!rng_text) throw Error("corrupt rng state in agent checkpoint: " + path);
    return agent;
}

/// Reads just the actor from either checkpoint kind; all evaluation needs.
inline Mlp load_policy(const std::string& path) {
    std::string data;
    auto is = detail::open_body(path, data);
    const auto kind = io::read_le<std::uint32_t>(is, "kind");
    if (kind != static_cast<std::uint32_t>(CheckpointKind::FullAgent) &&
        kind != static_cast<std::uint32_t>(CheckpointKind::PolicyOnly))
        throw Error("corrupt agent checkpoint: " + path);
    io::read_le<std::uint32_t>(is, "observation size");
    detail::read_config(is);
    Mlp actor = detail::read_net(is);
    if (actor.output_size() != 1 || actor.output_activation() != OutputActivation::Tanh)
        throw Error("checkpoint actor has unexpected output layer: " + path);
    return actor;
}

}  // namespace vkrl::rl

#endif  // VKRL_RL_CHECKPOINT_HPP
