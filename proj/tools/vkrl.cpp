// vkrl: build kernels, train and evaluate agents, audit the shield.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "vkrl/audit.hpp"
#include "vkrl/evaluate.hpp"
#include "vkrl/report.hpp"
#include "vkrl/rl/checkpoint.hpp"
#include "vkrl/trackgen.hpp"
#include "vkrl/training.hpp"

namespace {

using namespace vkrl;

std::string manifest_path(const std::string& explicit_path, const std::string& primary_output) {
    return explicit_path.empty() ? primary_output + ".manifest.json" : explicit_path;
}

VehicleParams vehicle_at(double speed) {
    VehicleParams p;
    p.fixed_speed = speed;
    p.validate();
    return p;
}

struct BuildKernelArgs {
    std::string map, out, manifest;
    double speed = 2.0;
    int workers = 1;
    bool representative = false;
};

int build_kernel_cmd(const BuildKernelArgs& a) {
    const TrackMap map = load_track_bundle(a.map);
    const VehicleParams params = vehicle_at(a.speed);
    DiscretizationSpec spec;
    spec.speed = a.speed;
    spec.dt = params.timestep;
    spec.conservative = !a.representative;
    KernelBuildOptions opts;
    opts.workers = a.workers;
    opts.on_iteration = [](int i, std::size_t n) { std::fprintf(stderr, "sweep %d: %zu states\n", i, n); };
    const SafetyKernel k = compute_kernel(map, spec, control_modes(params, spec), params, opts);
    save_kernel(a.out, k);
    std::printf("kernel: %zu states, %d sweeps -> %s\n", k.member_count(), k.iterations_to_fixpoint, a.out.c_str());

    RunManifest m;
    m.command = "build-kernel";
    m.config = {{"speed_mps", a.speed},        {"cells_per_meter", spec.cells_per_meter}, {"num_theta", spec.num_theta},
                {"num_modes", spec.num_modes}, {"dt_s", spec.dt},                         {"conservative", spec.conservative},
                {"workers", a.workers},        {"vehicle", to_json(params)}};
    m.inputs = {{"map_image", bundle_stem(a.map) + ".png"}, {"map_meta", bundle_stem(a.map) + ".meta"}};
    m.outputs = {{"kernel", a.out}};
    m.write(manifest_path(a.manifest, a.out));
    return 0;
}

struct TrainArgs {
    std::string mode, map, kernel, out, log, manifest;
    int steps = 10000;
    std::uint64_t seed = 0;
    double speed = 2.0;
    int updates_per_chunk = 20;
    std::string warmup = "uniform";
};

int train_cmd(const TrainArgs& a) {
    TrainConfig cfg;
    cfg.mode = parse_mode(a.mode);
    cfg.total_steps = a.steps;
    cfg.seed = a.seed;
    cfg.vehicle = vehicle_at(a.speed);
    cfg.updates_per_chunk = a.updates_per_chunk;
    cfg.warmup = a.warmup == "uniform" ? WarmupActions::Uniform : WarmupActions::PolicyWithNoise;
    const TrackMap map = load_track_bundle(a.map);
    std::optional<SafetyKernel> kernel;
    if (cfg.mode == TrainingMode::Supervised) kernel = load_kernel(a.kernel, map);

    const auto res = run_training(map, kernel ? &*kernel : nullptr, cfg, [](const ChunkLog& c) {
        if ((c.index + 1) % 50 == 0)
            std::fprintf(stderr, "chunk %d: reward %.3f, interventions %d, crashes %d\n", c.index, c.reward_sum,
                         c.interventions, c.crashes);
    });
    rl::save_agent(a.out, res.agent);
    if (!a.log.empty()) write_chunk_log_csv(a.log, res.chunks);
    std::printf("trained %d steps: %d interventions, %d crashes, %d laps -> %s\n", cfg.total_steps,
                res.total_interventions, res.total_crashes, res.laps_completed, a.out.c_str());

    RunManifest m;
    m.command = "train";
    m.config = {{"mode", to_string(cfg.mode)},
                {"steps", cfg.total_steps},
                {"chunk_size", cfg.chunk_size},
                {"updates_per_chunk", cfg.updates_per_chunk},
                {"warmup_actions", a.warmup},
                {"vehicle", to_json(cfg.vehicle)},
                {"td3", to_json(cfg.td3)}};
    m.seeds = {cfg.seed};
    m.inputs = {{"map_image", bundle_stem(a.map) + ".png"}, {"map_meta", bundle_stem(a.map) + ".meta"}};
    if (kernel) m.inputs["kernel"] = a.kernel;
    m.outputs = {{"agent", a.out}};
    if (!a.log.empty()) m.outputs["chunk_log"] = a.log;
    m.write(manifest_path(a.manifest, a.out));
    return 0;
}

struct EvaluateArgs {
    std::string agent, map, json, traj, kernel, manifest;
    int laps = 20;
    double speed = 2.0;
};

int evaluate_cmd(const EvaluateArgs& a) {
    const rl::Mlp actor = rl::load_policy(a.agent);
    const TrackMap map = load_track_bundle(a.map);
    EvalConfig cfg;
    cfg.laps = a.laps;
    cfg.vehicle = vehicle_at(a.speed);
    std::optional<SafetyKernel> kernel;
    if (!a.kernel.empty()) kernel = load_kernel(a.kernel, map);
    const EvalMetrics m = evaluate(map, actor_policy(actor, cfg.vehicle.delta_max), cfg, kernel ? &*kernel : nullptr);
    if (!a.json.empty()) write_metrics_json(a.json, m);
    if (!a.traj.empty()) write_trajectory_csv(a.traj, m);
    std::printf("%s\n", metrics_json(m).dump(2).c_str());

    RunManifest man;
    man.command = "evaluate";
    man.config = {{"laps", a.laps}, {"supervisor", kernel.has_value()}, {"vehicle", to_json(cfg.vehicle)}};
    man.inputs = {{"agent", a.agent}, {"map_image", bundle_stem(a.map) + ".png"}, {"map_meta", bundle_stem(a.map) + ".meta"}};
    if (kernel) man.inputs["kernel"] = a.kernel;
    if (!a.json.empty()) man.outputs["metrics"] = a.json;
    if (!a.traj.empty()) man.outputs["trajectory"] = a.traj;
    const std::string primary = !a.json.empty() ? a.json : a.agent + ".eval";
    man.write(manifest_path(a.manifest, primary));
    return 0;
}

struct RolloutArgs {
    std::string kernel, map, manifest;
    int episodes = 1000;
    int steps = 200;
    std::uint64_t seed = 0;
    double speed = 2.0;
};

int rollout_cmd(const RolloutArgs& a) {
    const TrackMap map = load_track_bundle(a.map);
    const SafetyKernel k = load_kernel(a.kernel, map);
    const RolloutCheckResult r = rollout_check(k, map, vehicle_at(a.speed), {a.episodes, a.steps, a.seed});
    std::printf("episodes %d, steps %lld, interventions %lld, off-track %lld, feasibility failures %lld\n", r.episodes,
                r.steps, r.interventions, r.off_track, r.feasibility_failures);

    RunManifest m;
    m.command = "rollout-check";
    m.config = {{"episodes", a.episodes}, {"steps", a.steps}, {"speed_mps", a.speed}};
    m.seeds = {a.seed};
    m.inputs = {{"kernel", a.kernel}, {"map_image", bundle_stem(a.map) + ".png"}, {"map_meta", bundle_stem(a.map) + ".meta"}};
    m.config["result"] = {{"steps", r.steps},
                          {"interventions", r.interventions},
                          {"off_track", r.off_track},
                          {"feasibility_failures", r.feasibility_failures}};
    m.write(manifest_path(a.manifest, a.kernel + ".rollout"));
    return r.off_track == 0 && r.feasibility_failures == 0 ? 0 : 2;
}

int make_maps_cmd(const std::string& dir) {
    std::filesystem::create_directories(dir);
    save_track_bundle(dir + "/loop", trackgen::shipped_loop(), false);
    save_track_bundle(dir + "/chicane", trackgen::shipped_chicane(), true);
    std::printf("wrote %s/loop and %s/chicane\n", dir.c_str(), dir.c_str());
    RunManifest m;
    m.command = "make-maps";
    for (const char* name : {"loop", "chicane"}) {
        m.outputs[std::string(name) + "_image"] = dir + "/" + name + ".png";
        m.outputs[std::string(name) + "_meta"] = dir + "/" + name + ".meta";
    }
    m.outputs["chicane_centerline"] = dir + "/chicane.centerline.csv";
    m.write(dir + "/maps.manifest.json");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"viability-kernel shielded racing RL"};
    app.require_subcommand(1);

    BuildKernelArgs bk;
    auto* c_bk = app.add_subcommand("build-kernel", "compute the safety kernel for a map and speed");
    c_bk->add_option("--map", bk.map, "map bundle (stem, .png or .meta)")->required();
    c_bk->add_option("--speed", bk.speed, "speed in m/s");
    c_bk->add_option("--out", bk.out, "output .vk file")->required();
    c_bk->add_option("--workers", bk.workers, "sweep threads")->check(CLI::PositiveNumber);
    c_bk->add_flag("--representative", bk.representative, "one successor sample per state instead of the cell corners");
    c_bk->add_option("--manifest", bk.manifest, "run manifest path (default <out>.manifest.json)");

    TrainArgs tr;
    auto* c_tr = app.add_subcommand("train", "train a TD3 agent");
    c_tr->add_option("--mode", tr.mode, "supervised|baseline")->required()->check(CLI::IsMember({"supervised", "baseline"}));
    c_tr->add_option("--map", tr.map, "map bundle")->required();
    c_tr->add_option("--steps", tr.steps, "environment steps")->check(CLI::PositiveNumber);
    c_tr->add_option("--seed", tr.seed, "random seed");
    c_tr->add_option("--speed", tr.speed, "speed in m/s");
    c_tr->add_option("--updates-per-chunk", tr.updates_per_chunk, "TD3 updates after every 20 steps");
    c_tr->add_option("--warmup", tr.warmup, "warmup actions: uniform|policy")->check(CLI::IsMember({"uniform", "policy"}));
    c_tr->add_option("--kernel", tr.kernel, "safety kernel (.vk), required for supervised mode");
    c_tr->add_option("--out", tr.out, "output agent checkpoint")->required();
    c_tr->add_option("--log", tr.log, "per-chunk CSV log");
    c_tr->add_option("--manifest", tr.manifest, "run manifest path (default <out>.manifest.json)");

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "run deterministic test laps without exploration");
    c_ev->add_option("--agent", ev.agent, "agent checkpoint")->required();
    c_ev->add_option("--map", ev.map, "map bundle")->required();
    c_ev->add_option("--laps", ev.laps, "lap attempts")->check(CLI::PositiveNumber);
    c_ev->add_option("--speed", ev.speed, "speed in m/s");
    c_ev->add_option("--kernel", ev.kernel, "keep the shield on with this kernel");
    c_ev->add_option("--json", ev.json, "metrics JSON output");
    c_ev->add_option("--traj", ev.traj, "trajectory CSV output");
    c_ev->add_option("--manifest", ev.manifest, "run manifest path (default <json>.manifest.json)");

    RolloutArgs ro;
    auto* c_ro = app.add_subcommand("rollout-check", "random-policy shielded rollouts from random kernel states");
    c_ro->add_option("--kernel", ro.kernel, "safety kernel (.vk)")->required();
    c_ro->add_option("--map", ro.map, "map bundle")->required();
    c_ro->add_option("--episodes", ro.episodes, "episodes")->check(CLI::PositiveNumber);
    c_ro->add_option("--steps", ro.steps, "steps per episode")->check(CLI::PositiveNumber);
    c_ro->add_option("--seed", ro.seed, "random seed");
    c_ro->add_option("--speed", ro.speed, "speed in m/s");
    c_ro->add_option("--manifest", ro.manifest, "run manifest path (default <kernel>.rollout.manifest.json)");

    std::string maps_dir = "maps";
    auto* c_mm = app.add_subcommand("make-maps", "regenerate the shipped maps");
    c_mm->add_option("--out-dir", maps_dir, "output directory");

    try {
        app.parse(argc, argv);
        if (c_tr->parsed() && tr.mode == "supervised" && tr.kernel.empty())
            throw CLI::RequiredError("--kernel (required for --mode supervised)");
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (c_bk->parsed()) return build_kernel_cmd(bk);
        if (c_tr->parsed()) return train_cmd(tr);
        if (c_ev->parsed()) return evaluate_cmd(ev);
        if (c_ro->parsed()) return rollout_cmd(ro);
        if (c_mm->parsed()) return make_maps_cmd(maps_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
