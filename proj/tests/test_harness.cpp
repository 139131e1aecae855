#include <gtest/gtest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "spherecbf/spherecbf.hpp"
#include "test_support.hpp"

using namespace spherecbf;
using nlohmann::json;

namespace {

bool bitwise_equal(const TrajectoryLog& a, const TrajectoryLog& b) {
    if (a.n_agents != b.n_agents || a.rows.size() != b.rows.size()) return false;
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        const auto x = flatten(a.rows[k]), y = flatten(b.rows[k]);
        if (x.size() != y.size() || std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) != 0) return false;
    }
    return true;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("spherecbf_test_" + name)).string();
}

}  // namespace

TEST(Config, DefaultsMatchFlockParameters) {
    const auto cfg = reference_flock_config(3);
    EXPECT_EQ(cfg.n, 20);
    EXPECT_EQ(cfg.collision_distance, kPi / 150);
    EXPECT_EQ(cfg.awareness_distance, 2 * kPi / 150);
    EXPECT_EQ(cfg.steps(), 20000);
    EXPECT_EQ(cfg.omega_c, Vec3(0.1, 0.2, -0.4));
}

TEST(Config, JsonRoundTrip) {
    auto cfg = reference_flock_config(9);
    cfg.weights.push_back({0, 3, 0.25});
    cfg.omega_max = 4.0;
    const auto back = config_from_json(config_to_json(cfg));
    EXPECT_EQ(config_to_json(back), config_to_json(cfg));
    const auto conic = config_from_json(config_to_json(conic_demo_config()));
    EXPECT_EQ(conic.mode, Mode::single_conic);
    EXPECT_EQ(conic.conic.theta_c, conic_demo_config().conic.theta_c);
}

TEST(Config, ThetaCSetsCollisionAndAwareness) {
    const auto cfg = config_from_json(json{{"mode", "flock"}, {"rho", 2.0}, {"theta_c", 0.05}});
    EXPECT_DOUBLE_EQ(cfg.collision_distance, 0.1);
    EXPECT_DOUBLE_EQ(cfg.awareness_distance, 0.2);
}

TEST(Config, Rejections) {
    EXPECT_THROW(config_from_json(json{{"bogus", 1}}), ConfigError);
    EXPECT_THROW(config_from_json(json{{"mode", "swarm"}}), ConfigError);
    EXPECT_THROW(config_from_json(json{{"awareness_distance", 1.6}}), ConfigError);
    EXPECT_THROW(config_from_json(json{{"dt", 0.0}}), ConfigError);
    EXPECT_THROW(config_from_json(json{{"horizon", -1.0}}), ConfigError);
    EXPECT_THROW(config_from_json(json{{"n", "many"}}), ConfigError);
    EXPECT_THROW(config_from_json(json{{"graph", {{"type", "ring"}}}}), ConfigError);
    EXPECT_THROW(config_from_json(json{{"weights", json::array({{{"i", 0}, {"j", 0}, {"w", 0.5}}})}}), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/spherecbf.json"), ConfigError);
}

TEST(Scenario, SingleBody) {
    auto cfg = conic_demo_config();
    cfg.init.explicit_attitudes = false;
    cfg.seed = 4;
    const auto s = build_scenario(cfg);
    ASSERT_EQ(s.state.size(), 1u);
    EXPECT_GT(s.state.agents[0].position.z(), 0.0);
}

TEST(Scenario, FlockStartsSafeInUpperHemisphere) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto cfg = reference_flock_config(seed);
        const auto s = build_scenario(cfg);
        ASSERT_EQ(s.state.size(), 20u);
        EXPECT_TRUE(is_strongly_connected(s.graph));
        int pairs = 0;
        for (std::size_t i = 0; i < 20; ++i) {
            EXPECT_GT(s.state.agents[i].position.z(), 0.0);
            for (std::size_t j = i + 1; j < 20; ++j) {
                const Rotation rel = relative(s.state.attitude(i), s.state.attitude(j));
                EXPECT_GE(geodesic_distance(rel, 1.0), cfg.collision_distance);
                EXPECT_LT(rotation_angle(rel), kPi);
                ++pairs;
            }
        }
        EXPECT_EQ(pairs, 190);
    }
}

TEST(Scenario, Deterministic) {
    const auto a = build_scenario(reference_flock_config(5));
    const auto b = build_scenario(reference_flock_config(5));
    for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(a.state.attitude(i), b.state.attitude(i));
    EXPECT_EQ(a.graph.edges(), b.graph.edges());
}

TEST(Scenario, Errors) {
    auto crowded = reference_flock_config(0);
    crowded.collision_distance = 1.4;
    crowded.awareness_distance = 1.5;
    crowded.init.max_attempts = 2000;
    EXPECT_THROW(build_scenario(crowded), ConfigError);

    auto unsafe = reference_flock_config(0);
    unsafe.n = 2;
    unsafe.init.explicit_attitudes = true;
    unsafe.init.euler = {EulerXYZ{0, 0, 0}, EulerXYZ{0.001, 0, 0}};
    EXPECT_THROW(build_scenario(unsafe), ConfigError);

    auto disconnected = reference_flock_config(0);
    disconnected.graph.kind = GraphKind::cycle;
    disconnected.awareness_distance = 1.6;
    EXPECT_THROW(build_scenario(disconnected), ConfigError);
}

TEST(Metrics, Examples) {
    const std::vector<Rotation> two{Rotation::identity(), Rotation::about_x(0.37)};
    EXPECT_NEAR(min_geodesic_distance(two, 1.0), 0.37, 1e-15);
    const std::vector<Rotation> same{Rotation::about_y(0.2), Rotation::about_y(0.2)};
    EXPECT_EQ(min_geodesic_distance(same, 1.0), 0.0);
    const std::vector<Rotation> three{Rotation::identity(), Rotation::about_x(0.1), Rotation::about_x(0.3)};
    EXPECT_NEAR(min_geodesic_distance(three, 1.0), 0.1, 1e-15);
    EXPECT_THROW(min_geodesic_distance(std::vector<Rotation>{Rotation::identity()}, 1.0), std::invalid_argument);

    EXPECT_EQ(max_disagreement(same), 0.0);
    const std::vector<Rotation> half{Rotation::identity(), Rotation::about_z(kPi)};
    EXPECT_NEAR(max_disagreement(half), 2.8284271247461903, 1e-15);
    const std::vector<Rotation> tiny{Rotation::identity(), Rotation::about_z(1e-3)};
    EXPECT_NEAR(max_disagreement(tiny), 0.0014142135034475307, 1e-15);
    EXPECT_THROW(max_disagreement(std::vector<Rotation>{}), std::invalid_argument);
}

TEST(Trajectory, Columns) {
    const auto cols = log_columns(2);
    EXPECT_EQ(cols.size(), 1u + 2 * 18 + 3);
    EXPECT_EQ(cols[1], "agent0_R00");
    EXPECT_EQ(cols[19], "agent1_R00");
    EXPECT_EQ(cols.back(), "min_hij");
}

TEST(Trajectory, EmptyLogIsHeaderOnly) {
    TrajectoryLog log;
    log.n_agents = 1;
    std::ostringstream os;
    write_csv(log, os);
    const std::string text = os.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
    std::istringstream is(text);
    const auto back = read_csv(is);
    EXPECT_EQ(back.n_agents, 1);
    EXPECT_TRUE(back.rows.empty());
}

TEST(Trajectory, FileRoundTripsAreExact) {
    auto cfg = reference_flock_config(2);
    cfg.horizon = 0.002;
    const auto log = run(cfg);
    ASSERT_EQ(log.rows.size(), 3u);
    for (auto fmt : {LogFormat::csv, LogFormat::json}) {
        const std::string path = temp_path(fmt == LogFormat::csv ? "rt.csv" : "rt.json");
        export_log(log, path, fmt);
        EXPECT_TRUE(bitwise_equal(load_log(path, fmt), log));
        std::remove(path.c_str());
    }
    auto conic = conic_demo_config();
    conic.horizon = 0.002;
    const auto clog = run(conic);
    const std::string path = temp_path("conic.json");
    export_log(clog, path, LogFormat::json);
    EXPECT_TRUE(bitwise_equal(load_log(path, LogFormat::json), clog));
    std::remove(path.c_str());
    EXPECT_THROW(export_log(log, "/nonexistent/dir/x.csv", LogFormat::csv), std::runtime_error);
}

TEST(Run, RowCountTimeAndDeterminism) {
    auto cfg = reference_flock_config(1);
    cfg.horizon = 0.5;
    const auto a = run(cfg);
    const auto b = run(cfg);
    ASSERT_EQ(a.rows.size(), 501u);
    for (std::size_t k = 1; k < a.rows.size(); ++k) EXPECT_GT(a.rows[k].t, a.rows[k - 1].t);
    EXPECT_TRUE(bitwise_equal(a, b));
    for (const auto& r : a.rows) {
        for (const auto& ag : r.agents) EXPECT_LT(std::abs(ag.position.norm() - cfg.rho), 1e-9);
    }
}

TEST(Run, SyncOnlyThreeCycleConverges) {
    ScenarioConfig cfg;
    cfg.mode = Mode::sync_only;
    cfg.n = 3;
    cfg.graph.kind = GraphKind::cycle;
    cfg.omega_c = Vec3::Zero();
    cfg.seed = 7;
    const auto log = run(cfg);
    EXPECT_LE(log.rows.back().max_frobenius, 1e-3);
}

TEST(Run, NominalOnlyHeadOnViolates) {
    ScenarioConfig cfg;
    cfg.mode = Mode::nominal_only;
    cfg.n = 2;
    cfg.graph.kind = GraphKind::complete;
    cfg.horizon = 2.0;
    cfg.init.explicit_attitudes = true;
    cfg.init.euler = {EulerXYZ{-0.05, 0, 0}, EulerXYZ{0.05, 0, 0}};
    double dmin = 1e9;
    for (const auto& r : run(cfg).rows) dmin = std::min(dmin, r.min_geodesic);
    EXPECT_LT(dmin, cfg.collision_distance);

    cfg.mode = Mode::flock;
    dmin = 1e9;
    for (const auto& r : run(cfg).rows) dmin = std::min(dmin, r.min_geodesic);
    EXPECT_GE(dmin, cfg.collision_distance - 1e-6);
}

TEST(Run, FlockShortHorizonStaysSafe) {
    auto cfg = reference_flock_config(0);
    cfg.horizon = 3.0;
    for (const auto& r : run(cfg).rows) EXPECT_GE(r.min_geodesic, cfg.collision_distance - 1e-6);
}

TEST(Run, CommonBodyVelocityComparison) {
    // Adding omega_c in the body frame conjugates every R_ij by exp(omega_c t):
    // Frobenius disagreement is unchanged up to an O(dt) splitting error,
    // geodesic distances are not.
    auto gaps = [](double dt) {
        ScenarioConfig base;
        base.mode = Mode::sync_only;
        base.n = 5;
        base.seed = 3;
        base.horizon = 5.0;
        base.dt = dt;
        ScenarioConfig with = base;
        with.mode = Mode::nominal_only;
        const auto a = run(base), b = run(with);
        double frob = 0.0, geo = 0.0;
        for (std::size_t k = 0; k < a.rows.size(); ++k) {
            frob = std::max(frob, std::abs(a.rows[k].max_frobenius - b.rows[k].max_frobenius));
            geo = std::max(geo, std::abs(a.rows[k].min_geodesic - b.rows[k].min_geodesic));
        }
        return std::pair{frob, geo};
    };
    const auto [frob_coarse, geo_coarse] = gaps(1e-3);
    const auto [frob_fine, geo_fine] = gaps(1e-4);
    EXPECT_LT(frob_coarse, 1e-4);
    EXPECT_NEAR(frob_coarse / frob_fine, 10.0, 1.5);
    EXPECT_GT(geo_fine, 1e-4);
    EXPECT_NEAR(geo_fine / geo_coarse, 1.0, 0.05);
}

TEST(Run, ConicDemoFilterVersusNominal) {
    auto cfg = conic_demo_config();
    double hf = 1e9, hn = 1e9;
    for (const auto& r : run(cfg).rows) hf = std::min(hf, r.min_barrier);
    cfg.conic.filter = false;
    for (const auto& r : run(cfg).rows) hn = std::min(hn, r.min_barrier);
    EXPECT_GE(hf, -1e-6);
    EXPECT_LT(hn, 0.0);
}
