#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracle.hpp"
#include "support/scenes.hpp"
#include "tailscope/errors.hpp"
#include "tailscope/interaction_metrics.hpp"
#include "tailscope/scene_metrics.hpp"

using namespace tailscope;
using testkit::constant_velocity;
using testkit::make_scene;

TEST_CASE("head-on pair") {
    const auto r = pair_ittc({0, 0}, {5, 0}, {20, 0}, {-5, 0});
    REQUIRE(r);
    CHECK(*r == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("receding pair clamps to zero") {
    CHECK(*pair_ittc({0, 0}, {-5, 0}, {20, 0}, {5, 0}) == 0.0);
    const auto scene = make_scene({constant_velocity("1", {0, 0}, {-5, 0}, 5, 0.1),
                                   constant_velocity("2", {20, 0}, {5, 0}, 5, 0.1)});
    CHECK(ittc_risk(scene).value == 0.0);
}

TEST_CASE("coincident agents are skipped and flagged") {
    CHECK_FALSE(pair_ittc({1, 1}, {1, 0}, {1.001, 1}, {0, 0}));
    const auto scene = make_scene({constant_velocity("1", {0, 0}, {1, 0}, 4, 0.1),
                                   constant_velocity("2", {0, 0}, {1, 0}, 4, 0.1)});
    const auto r = ittc_risk(scene);
    CHECK(r.proximity);
    CHECK(r.value == 0.0);
}

TEST_CASE("no neighbours in radius") {
    const auto scene = make_scene({constant_velocity("1", {0, 0}, {5, 0}, 5, 0.1),
                                   constant_velocity("2", {80, 0}, {-5, 0}, 5, 0.1)});
    CHECK(ittc_risk(scene).value == 0.0);
    CHECK(rss_longitudinal(scene, {}) == 0.0);
    CHECK(rss_lateral(scene, {}) == 0.0);
}

TEST_CASE("longitudinal safe distance") {
    CHECK(rss_longitudinal_distance(20, 20, AgentKind::vehicle, {}) ==
          doctest::Approx(43.15625).epsilon(1e-14));
    // pedestrians and other agents contribute no braking credit
    CHECK(rss_longitudinal_distance(20, 20, AgentKind::pedestrian, {}) ==
          doctest::Approx(68.15625).epsilon(1e-14));
    CHECK(rss_longitudinal_distance(0, 40, AgentKind::vehicle, {}) == 0.0);
}

TEST_CASE("risk curve") {
    CHECK(rss_risk(43.15625, 43.15625, 1, 1) == 0.0);
    CHECK(rss_risk(43.15625, 60, 1, 1) == 0.0);
    CHECK(rss_risk(10, 0, 1, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(rss_risk(0, 0, 1, 1) == 0.0);
    double prev = 0.0;
    for (double gap = 10; gap >= 0; gap -= 1) {
        const double r = rss_risk(10, gap, 2, 0.5);
        CHECK(r >= prev);
        CHECK(r < 1.0);
        prev = r;
    }
}

TEST_CASE("lateral safe distance with no lateral motion") {
    const RssParams p;
    const double own = (0 + 0.45) / 2 * 0.5 + 0.45 * 0.45 / 2.4;
    const double other_vehicle = (0 - 0.45) / 2 * 0.5 - 0.45 * 0.45 / 2.4;
    CHECK(rss_lateral_distance(0, 0, AgentKind::vehicle, p) ==
          doctest::Approx(0.5 + own - other_vehicle).epsilon(1e-14));
    CHECK(rss_lateral_distance(0, 0, AgentKind::vehicle, p) == doctest::Approx(0.89375).epsilon(1e-14));
    CHECK(rss_risk(rss_lateral_distance(0, 0, AgentKind::vehicle, p), 5.0, 1, 1) == 0.0);
}

TEST_CASE("pedestrian lateral distance substitutes its reaction time") {
    RssParams p;
    p.rho_ped = p.rho;
    for (double vi : {-1.0, 0.0, 0.7}) {
        for (double vj : {-0.4, 0.0, 1.3}) {
            const double vjr = vj - p.a_lat_max * p.rho;
            const double veh_term = vjr * vjr / (2 * p.b_lat_min);
            const double veh = rss_lateral_distance(vi, vj, AgentKind::vehicle, p);
            const double ped = rss_lateral_distance(vi, vj, AgentKind::pedestrian, p);
            const double bracket_veh = veh - p.mu_lat;
            if (bracket_veh > 0 && ped - p.mu_lat > 0) {
                CHECK(ped == doctest::Approx(veh - veh_term).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("lateral axis points toward the neighbour") {
    // neighbour on the right, drifting toward the target
    const auto scene = make_scene({constant_velocity("1", {0, 0}, {10, 0}, 3, 0.1),
                                   constant_velocity("2", {0, -1.0}, {10, 0.5}, 3, 0.1)});
    const double r = rss_lateral(scene, {});
    CHECK(r > 0.0);
    CHECK(r < 1.0);
}

TEST_CASE("single-agent scene has no global risk") {
    const auto scene = make_scene({constant_velocity("1", {0, 0}, {3, 1}, 6, 0.1)});
    const auto g = global_scene_risk(scene);
    CHECK(g.r_mac == 0.0);
    CHECK(g.r_ad == 0.0);
    CHECK(g.r_ni == 0.0);
}

TEST_CASE("three static neighbours within 10 m") {
    const auto scene = make_scene({constant_velocity("1", {0, 0}, {0, 0}, 4, 0.1),
                                   constant_velocity("2", {3, 0}, {0, 0}, 4, 0.1),
                                   constant_velocity("3", {0, 5}, {0, 0}, 4, 0.1),
                                   constant_velocity("4", {-6, -6}, {0, 0}, 4, 0.1),
                                   constant_velocity("5", {30, 0}, {0, 0}, 4, 0.1)},
                                  10.0);
    CHECK(global_scene_risk(scene).r_ad == doctest::Approx(3.0 / (100.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(global_scene_risk(scene, 4.0).r_ad ==
          doctest::Approx(1.0 / (16.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(global_scene_risk(scene).r_ni == 0.0);
    CHECK_THROWS_AS((void)global_scene_risk(scene, 0.0), ConfigError);
}

TEST_CASE("invalid RSS parameters are rejected") {
    RssParams p;
    p.b_min = 0.0;
    const auto scene = make_scene({constant_velocity("1", {}, {1, 0}, 3, 0.1)});
    CHECK_THROWS_AS((void)interactive_metrics(scene, {p, {}}), ConfigError);
}

TEST_CASE("random scenes agree with the oracle") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 150; ++trial) {
        const auto scene = testkit::random_scene(rng, 4, 10);
        const auto got = compute_scene_metrics(scene, {}).values();
        const auto want = oracle::metrics(oracle::from_scene(scene));
        for (std::size_t i = 0; i < kMetricCount; ++i) {
            INFO(kMetricNames[i]);
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("relabelling neighbours leaves the metrics unchanged") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto scene = testkit::random_scene(rng, 4, 8);
        Scene::AgentMap renamed;
        std::string new_target;
        for (const auto& [id, traj] : scene.agents()) {
            const std::string name = "z" + std::to_string(100 - std::stoi(id));
            if (id == scene.target_id()) new_target = name;
            renamed.emplace(name, Trajectory(name, traj.states(), traj.dt()));
        }
        const Scene other("r", std::move(renamed), new_target);
        const auto a = compute_scene_metrics(scene, {}).values();
        const auto b = compute_scene_metrics(other, {}).values();
        for (std::size_t i = 0; i < kMetricCount; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    }
}
