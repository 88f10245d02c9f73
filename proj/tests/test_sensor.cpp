#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vkrl/sensor.hpp"

using namespace vkrl;

using oracles::rect_distance;

TEST(Sensor, ForwardBeamHitsWall) {
    const auto room = fixtures::room(10.0, 10.0, 0.05);
    EXPECT_NEAR(cast_ray(room, {5.0, 5.0}, 0.0, 10.0), 5.0, 0.05);
}

TEST(Sensor, OpenAreaReadsMaxRange) {
    const auto room = fixtures::room(30.0, 30.0, 0.1);
    EXPECT_EQ(cast_ray(room, {15.0, 15.0}, 0.3, 10.0), 10.0);
    LidarConfig cfg;
    const auto scan = cast_scan(room, {15.0, 15.0, 1.0}, cfg);
    for (double d : scan) EXPECT_EQ(d, 10.0);
}

TEST(Sensor, MatchesAnalyticRectangle) {
    const double w = 6.0, h = 4.0, res = 0.05;
    const auto room = fixtures::room(w, h, res);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.1, w - 0.1), uy(0.1, h - 0.1), ua(-kPi, kPi);
    for (int i = 0; i < 2000; ++i) {
        const Vec2 p{ux(rng), uy(rng)};
        const double a = ua(rng);
        const double exact = std::min(rect_distance(p, a, w, h), 10.0);
        EXPECT_LE(std::abs(cast_ray(room, p, a, 10.0) - exact), std::sqrt(2.0) * res);
    }
}

TEST(Sensor, RotatedScanIsReversedInSymmetricRoom) {
    const auto room = fixtures::room(6.0, 6.0, 0.05);
    LidarConfig cfg;
    cfg.num_rays_full = 181;
    const auto a = cast_scan(room, {3.0, 3.0, 0.0}, cfg);
    const auto b = cast_scan(room, {3.0, 3.0, kPi}, cfg);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], a[a.size() - 1 - i], std::sqrt(2.0) * 0.05);
}

TEST(Sensor, InflatedCellsBlockBeams) {
    const auto room = fixtures::room(10.0, 10.0, 0.05);
    TrackMeta m = room.meta();
    m.inflation = 0.5;
    const TrackMap inflated(room.grid(), m, room.centerline());
    EXPECT_NEAR(cast_ray(inflated, {5.0, 5.0}, 0.0, 10.0), 4.5, 0.05);
}

TEST(Sensor, ScanFromOccupiedCellFails) {
    const auto room = fixtures::room(4.0, 4.0, 0.05);
    try {
        cast_scan(room, {-5.0, 1.0, 0.0}, LidarConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "cannot scan from occupied cell");
    }
}

TEST(Sensor, ObservationIndicesIncludeBothEnds) {
    LidarConfig cfg;
    cfg.num_rays_full = 108;
    const auto idx = observation_indices(cfg);
    ASSERT_EQ(idx.size(), 20u);
    // oracle: enumerate k * 107 / 19 by repeated addition of exact fractions
    for (int k = 0; k < 20; ++k) {
        int expect = 0;
        while ((expect + 1) * 19 <= k * 107) ++expect;
        EXPECT_EQ(idx[static_cast<std::size_t>(k)], expect);
    }
    EXPECT_EQ(idx.front(), 0);
    EXPECT_EQ(idx.back(), 107);
}

TEST(Sensor, ObserveScalesAndClamps) {
    LidarConfig cfg;
    std::vector<double> scan(1080, 10.0);
    for (double v : observe(scan, cfg).values) EXPECT_EQ(v, 1.0);
    std::fill(scan.begin(), scan.end(), 0.0);
    for (double v : observe(scan, cfg).values) EXPECT_EQ(v, 0.0);
    std::fill(scan.begin(), scan.end(), 25.0);
    for (double v : observe(scan, cfg).values) EXPECT_EQ(v, 1.0);
    EXPECT_EQ(observe(scan, cfg).values.size(), 20u);
    EXPECT_THROW(observe(std::vector<double>(100, 1.0), cfg), Error);
}

TEST(Sensor, ObserveIsMonotone) {
    LidarConfig cfg;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 12.0), bump(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> a(1080), b(1080);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = u(rng);
            b[i] = a[i] + bump(rng);
        }
        const auto oa = observe(a, cfg), ob = observe(b, cfg);
        for (std::size_t i = 0; i < oa.values.size(); ++i) EXPECT_LE(oa.values[i], ob.values[i]);
    }
}

TEST(Sensor, SenseEqualsObserveOfFullScan) {
    const auto map = fixtures::small_loop();
    LidarConfig cfg;
    const VehicleState pose{0.0, -1.5, 0.2};
    EXPECT_EQ(sense(map, pose, cfg).values, observe(cast_scan(map, pose, cfg), cfg).values);
    for (int raw : {20, 108, 1081}) {
        cfg.num_rays_full = raw;
        EXPECT_EQ(sense(map, pose, cfg).values.size(), 20u);
        EXPECT_EQ(observe(cast_scan(map, pose, cfg), cfg).values.size(), 20u);
    }
}
