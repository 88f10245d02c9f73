#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "vkrl/evaluate.hpp"
#include "vkrl/report.hpp"
#include "vkrl/training.hpp"

using namespace vkrl;

namespace {

struct Loop : ::testing::Test {
    static void SetUpTestSuite() {
        map_ = new TrackMap(fixtures::small_loop());
        DiscretizationSpec spec;
        spec.cells_per_meter = 20;
        kernel_ = new SafetyKernel(compute_kernel(*map_, spec, control_modes(VehicleParams{}, spec), VehicleParams{}));
    }
    static void TearDownTestSuite() {
        delete kernel_;
        delete map_;
    }
    static TrackMap* map_;
    static SafetyKernel* kernel_;

    static EnvConfig env_config(TrainingMode mode) {
        EnvConfig c;
        c.mode = mode;
        return c;
    }
    static TrainConfig train_config(int steps, std::uint64_t seed) {
        TrainConfig c;
        c.total_steps = steps;
        c.seed = seed;
        c.td3.hidden = 24;
        return c;
    }
};

TrackMap* Loop::map_ = nullptr;
SafetyKernel* Loop::kernel_ = nullptr;

SteeringPolicy follow_centerline(const TrackMap& map) {
    const VehicleParams p;
    const auto cfg = PurePursuitConfig::for_speed(p.fixed_speed, p.wheelbase);
    return [&map, p, cfg](const VehicleState& s, const Observation&) { return pure_pursuit(s, map.centerline(), cfg, p).steering; };
}

}  // namespace

TEST_F(Loop, SupervisedSafeStepHasZeroReward) {
    RacingEnv env(*map_, kernel_, env_config(TrainingMode::Supervised));
    env.reset();
    const auto r = env.step(0.0);
    EXPECT_EQ(r.reward, 0.0);
    EXPECT_FALSE(r.done);
    EXPECT_FALSE(r.info.intervened);
    EXPECT_EQ(r.observation.values.size(), 20u);
}

TEST_F(Loop, SupervisedModeNeverResetsPose) {
    RacingEnv env(*map_, kernel_, env_config(TrainingMode::Supervised));
    env.reset();
    int interventions = 0;
    for (int i = 0; i < 300; ++i) {
        const VehicleState before = env.state();
        const auto r = env.step(1.0);  // full left lock the whole time
        interventions += r.info.intervened;
        EXPECT_FALSE(r.info.crashed);
        EXPECT_TRUE(map_->is_on_track(env.state().position()));
        if (r.info.intervened) {
            EXPECT_EQ(r.reward, -1.0);
            EXPECT_TRUE(r.done);
            EXPECT_NE(env.state().x, before.x);
        }
    }
    EXPECT_GT(interventions, 0);
}

TEST_F(Loop, SupervisedModeRequiresMatchingKernel) {
    EXPECT_THROW(RacingEnv(*map_, nullptr, env_config(TrainingMode::Supervised)), Error);
    auto cfg = env_config(TrainingMode::Supervised);
    cfg.vehicle.fixed_speed = 3.0;
    EXPECT_THROW(RacingEnv(*map_, kernel_, cfg), Error);
}

TEST_F(Loop, BaselineCrashEndsEpisode) {
    RacingEnv env(*map_, nullptr, env_config(TrainingMode::Baseline));
    env.reset();
    StepResult r;
    int steps = 0;
    do {
        r = env.step(-1.0);
        ++steps;
    } while (!r.done && steps < 100);
    EXPECT_TRUE(r.info.crashed);
    EXPECT_EQ(r.reward, -1.0);
    try {
        env.step(0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "episode finished; reset() before stepping again");
    }
    env.reset();
    EXPECT_EQ(env.state().x, 0.0);
    EXPECT_EQ(env.state().y, -1.5);
    EXPECT_EQ(env.state().theta, 0.0);
}

TEST_F(Loop, BaselineLapReturnsTwo) {
    RacingEnv env(*map_, nullptr, env_config(TrainingMode::Baseline));
    Observation obs = env.reset();
    const auto policy = follow_centerline(*map_);
    double total = 0.0;
    StepResult r;
    int steps = 0;
    do {
        r = env.step(policy(env.state(), obs) / 0.4);
        obs = r.observation;
        total += r.reward;
        ++steps;
    } while (!r.done && steps < 1000);
    ASSERT_TRUE(r.info.lap_complete);
    EXPECT_NEAR(total, 2.0, 1e-6);
    EXPECT_NEAR(steps * 0.2, map_->centerline().total_length(), 0.5);
}

TEST_F(Loop, ResetRejectsBadPoses) {
    RacingEnv env(*map_, kernel_, env_config(TrainingMode::Supervised));
    EXPECT_THROW(env.step(0.0), Error);
    EXPECT_THROW(env.reset({0.0, 0.0, 0.0}), Error);
    // on track but facing the outer wall from right next to it
    EXPECT_THROW(env.reset({0.0, -2.0, -kPi / 2}), Error);
}

TEST_F(Loop, TrainingIsDeterministic) {
    const auto cfg = train_config(420, 5);
    const auto a = run_baseline_training(*map_, cfg);
    const auto b = run_baseline_training(*map_, cfg);
    EXPECT_EQ(a.agent.actor().flat_parameters(), b.agent.actor().flat_parameters());
    EXPECT_EQ(a.agent.critic1().flat_parameters(), b.agent.critic1().flat_parameters());
    EXPECT_EQ(a.step_rewards, b.step_rewards);
    EXPECT_GT(a.agent.update_count(), 0u);
    const auto c = run_baseline_training(*map_, train_config(420, 6));
    EXPECT_NE(a.agent.actor().flat_parameters(), c.agent.actor().flat_parameters());
}

TEST_F(Loop, UpdateBurstsFollowChunks) {
    auto cfg = train_config(410, 1);
    cfg.td3.batch_size = 50;
    const auto r = run_supervised_training(*map_, *kernel_, cfg);
    EXPECT_EQ(r.update_bursts, 410 / 20);
    ASSERT_EQ(r.chunks.size(), 21u);  // 20 full chunks and a trailing partial one
    int updates = 0;
    for (const auto& c : r.chunks) {
        updates += c.updates;
        EXPECT_TRUE(c.updates == 0 || c.updates == 20);
    }
    // no updates until the buffer holds a batch: bursts after steps 60..400
    EXPECT_EQ(updates, 18 * 20);
    EXPECT_EQ(r.agent.update_count(), 18u * 20u);
    EXPECT_EQ(r.chunks.front().updates, 0);
    EXPECT_EQ(r.chunks.back().updates, 0);
}

TEST_F(Loop, SupervisedTrainingStaysSafe) {
    const auto r = run_supervised_training(*map_, *kernel_, train_config(1000, 2));
    EXPECT_EQ(r.total_crashes, 0);
    int interventions = 0;
    for (const auto& c : r.chunks) {
        EXPECT_LE(c.reward_sum, 0.0);
        EXPECT_GE(c.reward_sum, -20.0);
        EXPECT_EQ(c.reward_sum, -c.interventions);
        interventions += c.interventions;
    }
    EXPECT_EQ(interventions, r.total_interventions);
    for (std::size_t i = 0; i < r.step_rewards.size(); ++i)
        EXPECT_EQ(r.step_rewards[i], r.step_interventions[i] ? -1.0 : 0.0);
}

TEST_F(Loop, BaselineEpisodeReturnsBounded) {
    const auto r = run_baseline_training(*map_, train_config(1500, 3));
    ASSERT_FALSE(r.episodes.empty());
    for (const auto& e : r.episodes) {
        EXPECT_GE(e.total_reward, -1.0 - 1e-9);
        EXPECT_LE(e.total_reward, 2.0 + 1e-9);
        if (e.cause == TerminalCause::LapComplete) {
            EXPECT_NEAR(e.total_reward, 2.0, 1e-6);
        }
    }
}

TEST(TotalCurvature, CircleAndLine) {
    for (int m : {50, 200}) {
        std::vector<VehicleState> poses;
        for (int i = 0; i <= m; ++i) {
            const double a = kTwoPi * i / m;
            poses.push_back({2.0 * std::sin(a), -2.0 * std::cos(a), a});
        }
        // each step turns 2pi/m over a chord of 4 sin(pi/m)
        const double per_step = (kTwoPi / m) / (4.0 * std::sin(kPi / m));
        EXPECT_NEAR(total_curvature(poses), m * per_step, 1e-9);
        EXPECT_NEAR(total_curvature(poses) / m, 0.5, 0.5 * 1e-3);
        std::vector<VehicleState> rev(poses.rbegin(), poses.rend());
        EXPECT_NEAR(total_curvature(rev), total_curvature(poses), 1e-9);
    }
    std::vector<VehicleState> line;
    for (int i = 0; i < 10; ++i) line.push_back({0.2 * i, 1.0, 0.0});
    EXPECT_EQ(total_curvature(line), 0.0);
    line.push_back(line.back());  // zero-length segment is skipped
    EXPECT_EQ(total_curvature(line), 0.0);
    EXPECT_THROW(total_curvature(std::vector<VehicleState>(2)), Error);
}

TEST(Evaluate, CenterlineFollowerCompletesEveryLap) {
    const auto map = fixtures::annulus(3.0, 1.6);
    EvalConfig cfg;
    const auto m = evaluate(map, follow_centerline(map), cfg);
    EXPECT_EQ(m.success_rate, 1.0);
    EXPECT_EQ(m.laps_completed, 20);
    EXPECT_EQ(m.representative_lap, 0);
    EXPECT_NEAR(m.normalized_lap_time, 1.0, 0.05);
    EXPECT_NEAR(m.distance_driven, kTwoPi * 3.0, 0.5);
    // steady turn of radius 3 on a wheelbase of 0.33
    EXPECT_NEAR(m.mean_abs_steering, std::atan(0.33 / 3.0), 0.02);
    EXPECT_NEAR(m.total_curvature, m.laps[0].steps * (1.0 / 3.0), 0.1 * m.laps[0].steps / 3.0);
}

TEST(Evaluate, SpinningIntoWallFails) {
    const auto map = fixtures::annulus(3.0, 1.6);
    EvalConfig cfg;
    cfg.laps = 3;
    for (double d : {-0.4, 0.4}) {
        const auto m = evaluate(map, [d](const VehicleState&, const Observation&) { return d; }, cfg);
        EXPECT_EQ(m.success_rate, 0.0);
        EXPECT_EQ(m.laps_completed, 0);
        EXPECT_EQ(m.mean_lap_time, 0.0);
        EXPECT_LT(m.distance_driven, kTwoPi * 3.0);
        for (const auto& l : m.laps) EXPECT_TRUE(l.crashed);
    }
}

TEST(Evaluate, ShieldKeepsSpinningPolicyOnTrack) {
    const auto map = fixtures::small_loop();
    DiscretizationSpec spec;
    spec.cells_per_meter = 20;
    const auto kernel = compute_kernel(map, spec, control_modes(VehicleParams{}, spec), VehicleParams{});
    EvalConfig cfg;
    cfg.laps = 2;
    const auto m = evaluate(map, [](const VehicleState&, const Observation&) { return -0.4; }, cfg, &kernel);
    for (const auto& l : m.laps) {
        EXPECT_FALSE(l.crashed);
        for (const auto& s : l.trajectory) EXPECT_TRUE(map.is_on_track(s.pose.position()));
    }
}

TEST(Evaluate, BitwiseReproducible) {
    const auto map = fixtures::small_loop();
    rl::Td3Agent agent(rl::Td3Config{}, 20, 17);
    EvalConfig cfg;
    cfg.laps = 3;
    const auto a = evaluate(map, actor_policy(agent.actor(), 0.4), cfg);
    const auto b = evaluate(map, actor_policy(agent.actor(), 0.4), cfg);
    ASSERT_EQ(a.laps.size(), b.laps.size());
    EXPECT_EQ(metrics_json(a).dump(), metrics_json(b).dump());
    for (std::size_t i = 0; i < a.laps.size(); ++i) {
        ASSERT_EQ(a.laps[i].trajectory.size(), b.laps[i].trajectory.size());
        for (std::size_t k = 0; k < a.laps[i].trajectory.size(); ++k) {
            EXPECT_EQ(a.laps[i].trajectory[k].pose.x, b.laps[i].trajectory[k].pose.x);
            EXPECT_EQ(a.laps[i].trajectory[k].steering, b.laps[i].trajectory[k].steering);
        }
    }
}

TEST(Report, FilesAndManifest) {
    fixtures::TempDir dir;
    const auto map = fixtures::annulus(3.0, 1.6);
    EvalConfig cfg;
    cfg.laps = 2;
    const auto m = evaluate(map, follow_centerline(map), cfg);
    write_metrics_json(dir.file("m.json"), m);
    write_trajectory_csv(dir.file("t.csv"), m);
    std::ifstream js(dir.file("m.json"));
    const auto j = nlohmann::json::parse(js);
    EXPECT_EQ(j["success_rate"], 1.0);
    EXPECT_EQ(j["laps_attempted"], 2);
    std::ifstream csv(dir.file("t.csv"));
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "t_s,x_m,y_m,theta_rad,delta_rad,v_mps,intervened,lap");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    EXPECT_EQ(rows, m.laps[0].steps + m.laps[1].steps);

    ChunkLog c0;
    ChunkLog c1{1, -2.0, 2, 0, 0, 20, 0.5};
    write_chunk_log_csv(dir.file("c.csv"), {c0, c1});
    std::ifstream cl(dir.file("c.csv"));
    std::string l0, l1, l2;
    std::getline(cl, l0);
    std::getline(cl, l1);
    std::getline(cl, l2);
    EXPECT_EQ(l0, "chunk,reward_sum,interventions,crashes,laps,updates,critic_loss");
    EXPECT_EQ(l1, "0,0,0,0,0,0,");
    EXPECT_EQ(l2, "1,-2,2,0,0,20,0.5");

    RunManifest man;
    man.command = "evaluate";
    man.seeds = {0, 1};
    man.inputs["metrics"] = dir.file("m.json");
    man.outputs["missing"] = dir.file("nope");
    const auto mj = man.to_json();
    EXPECT_EQ(mj["inputs"]["metrics"]["fnv1a64"], file_hash(dir.file("m.json")));
    EXPECT_TRUE(mj["outputs"]["missing"]["fnv1a64"].is_null());
    EXPECT_EQ(mj["seeds"].size(), 2u);
    EXPECT_FALSE(mj["code_version"].get<std::string>().empty());
}
