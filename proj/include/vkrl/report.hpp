#ifndef VKRL_REPORT_HPP
#define VKRL_REPORT_HPP

// Training logs and run manifests.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "vkrl/common.hpp"
#include "vkrl/training.hpp"

#ifndef VKRL_CODE_VERSION
#define VKRL_CODE_VERSION "unknown"
#endif

namespace vkrl {

inline std::string code_version() { return VKRL_CODE_VERSION; }

/// FNV-1a 64 of a file's bytes, hex encoded.
inline std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot hash '" + path + "'");
    Fnv1a h;
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof buf);
        h.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return hex64(h.digest());
}

/// critic_loss is empty when the burst ran no updates.
inline void write_chunk_log_csv(const std::string& path, const std::vector<ChunkLog>& chunks) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write chunk log '" + path + "'");
    out.precision(10);
    out << "chunk,reward_sum,interventions,crashes,laps,updates,critic_loss\n";
    for (const auto& c : chunks) {
        out << c.index << ',' << c.reward_sum << ',' << c.interventions << ',' << c.crashes << ',' << c.laps << ','
            << c.updates << ',';
        if (!std::isnan(c.critic_loss)) out << c.critic_loss;
        out << '\n';
    }
}

inline nlohmann::ordered_json to_json(const VehicleParams& p) {
    return {{"wheelbase_m", p.wheelbase}, {"delta_max_rad", p.delta_max}, {"speed_mps", p.fixed_speed},
            {"timestep_s", p.timestep}};
}

inline nlohmann::ordered_json to_json(const rl::Td3Config& c) {
    return {{"gamma", c.gamma},
            {"tau", c.tau},
            {"policy_delay", c.policy_delay},
            {"exploration_noise", c.exploration_noise},
            {"target_noise", c.target_noise},
            {"noise_clip", c.noise_clip},
            {"batch_size", c.batch_size},
            {"actor_lr", c.actor_lr},
            {"critic_lr", c.critic_lr},
            {"warmup_steps", c.warmup_steps},
            {"buffer_capacity", c.buffer_capacity},
            {"hidden", c.hidden}};
}

/// Records what a command ran with: its config, seeds, code version and
/// hashes of every input and output file that exists.
struct RunManifest {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::uint64_t> seeds;
    std::map<std::string, std::string> inputs;   // role -> path
    std::map<std::string, std::string> outputs;  // role -> path

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["code_version"] = code_version();
        j["config"] = config;
        j["seeds"] = seeds;
        auto files = [](const std::map<std::string, std::string>& m) {
            nlohmann::ordered_json f = nlohmann::ordered_json::object();
            for (const auto& [role, path] : m) {
                nlohmann::ordered_json e{{"path", path}};
                e["fnv1a64"] = std::filesystem::is_regular_file(path) ? nlohmann::ordered_json(file_hash(path)) : nullptr;
                f[role] = e;
            }
            return f;
        };
        j["inputs"] = files(inputs);
        j["outputs"] = files(outputs);
        return j;
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw Error("cannot write manifest '" + path + "'");
        out << to_json().dump(2) << "\n";
    }
};

}  // namespace vkrl

#endif  // VKRL_REPORT_HPP
