#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracle.hpp"
#include "support/scenes.hpp"
#include "tailscope/intrinsic_metrics.hpp"
#include "tailscope/synth_generator.hpp"

using namespace tailscope;

namespace {

Trajectory circle(double radius, double speed, double dt, std::size_t frames) {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::circle;
    spec.radius = radius;
    spec.speed = speed;
    spec.dt = dt;
    spec.frames = frames;
    return generate(spec).scene.target();
}

}  // namespace

TEST_CASE("constant velocity zeroes every intrinsic metric") {
    const auto m = intrinsic_metrics(testkit::constant_velocity("1", {3, 4}, {5, 0}, 20, 0.1));
    for (double x : {m.c_v, m.c_j, m.c_omega, m.c_alpha, m.c_vd, m.c_kappa, m.c_dkappa, m.c_dgamma}) {
        CHECK(std::fabs(x) < 1e-12);
    }
    CHECK_FALSE(m.degenerate);
}

TEST_CASE("circle of radius 10 at 5 m/s") {
    const auto d = kinematic_dynamism(circle(10.0, 5.0, 0.1, 50));
    CHECK(std::fabs(d.c_omega - 0.5) < 1e-9);
    CHECK(std::fabs(d.c_alpha) < 1e-9);
    CHECK(std::fabs(d.c_vd - 0.5) < 1e-9);
}

TEST_CASE("alternating 1-D velocity") {
    const auto traj = testkit::from_velocities("1", {{0, 0}, {1, 0}, {0, 0}, {1, 0}, {0, 0}}, 1.0);
    CHECK(kinematic_dynamism(traj).c_v == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kinematic_dynamism(traj).c_j == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("straight lines have no curvature") {
    for (double speed : {0.5, 5.0, 30.0}) {
        const auto g = geometric_complexity(testkit::constant_velocity("1", {}, {speed, speed}, 15, 0.1));
        CHECK(g.c_kappa == 0.0);
        CHECK(g.c_dkappa == 0.0);
    }
}

TEST_CASE("circle curvature within 1 percent") {
    const auto g = geometric_complexity(circle(20.0, 5.0, 0.1, 100));
    CHECK(std::fabs(g.c_kappa - 0.05) < 0.01 * 0.05);
    CHECK(std::fabs(g.c_dkappa) < 0.01 * 0.05);
}

TEST_CASE("stationary agent is guarded") {
    const auto m = intrinsic_metrics(testkit::constant_velocity("1", {1, 1}, {0, 0}, 10, 0.1));
    CHECK(m.c_kappa == 0.0);
    CHECK(m.c_vd == 0.0);
    CHECK(std::isfinite(m.c_dkappa));
}

TEST_CASE("alternating velocity autocovariance") {
    for (double u : {0.5, 1.0, 3.0}) {
        std::vector<Vec2> vs;
        for (int k = 0; k < 10; ++k) vs.push_back({k % 2 ? -u : u, 0.0});
        const auto r = temporal_irregularity(testkit::from_velocities("1", vs, 0.1));
        CHECK(r.c_dgamma == doctest::Approx(2.0 * u * u).epsilon(1e-12));
        CHECK(r.gamma[0] == doctest::Approx(u * u).epsilon(1e-12));
    }
}

TEST_CASE("velocity impulse matches the double loop") {
    std::vector<Vec2> vs(12, Vec2{4.0, 1.0});
    vs[5] = {9.0, -2.0};
    const auto traj = testkit::from_velocities("1", vs, 0.1);
    const auto scene = testkit::make_scene({traj});
    const auto ref = oracle::intrinsic(oracle::from_scene(scene).agents[0], 0.1);
    CHECK(temporal_irregularity(traj).c_dgamma == doctest::Approx(ref.c_dgamma).epsilon(1e-13));
}

TEST_CASE("short trajectories are flagged degenerate") {
    const auto m = intrinsic_metrics(testkit::from_velocities("1", {{1, 0}, {2, 1}}, 0.1));
    CHECK(m.degenerate);
    CHECK(m.c_j == 0.0);
    CHECK(m.c_alpha == 0.0);
    CHECK(m.c_dkappa == 0.0);
    CHECK(m.c_dgamma == 0.0);
    CHECK(m.c_v > 0.0);
}

TEST_CASE("random trajectories agree with the oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto scene = testkit::random_scene(rng, 1, 12);
        const auto m = intrinsic_metrics(scene.target());
        const auto ref = oracle::intrinsic(oracle::from_scene(scene).agents[0], scene.dt());
        const double got[] = {m.c_v, m.c_j, m.c_omega, m.c_alpha, m.c_vd, m.c_kappa, m.c_dkappa, m.c_dgamma};
        const double want[] = {ref.c_v,     ref.c_j,     ref.c_omega,   ref.c_alpha,
                               ref.c_vd,    ref.c_kappa, ref.c_dkappa, ref.c_dgamma};
        for (int i = 0; i < 8; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("metrics are non-negative and invariant to translation") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto scene = testkit::random_scene(rng, 1, 10);
        const auto& traj = scene.target();
        std::vector<AgentState> shifted = traj.states();
        for (auto& s : shifted) s.p = s.p + Vec2{100.0, -50.0};
        const auto a = intrinsic_metrics(traj);
        const auto b = intrinsic_metrics(Trajectory("1", shifted, traj.dt()));
        for (double x : {a.c_v, a.c_j, a.c_omega, a.c_alpha, a.c_vd, a.c_kappa, a.c_dkappa, a.c_dgamma}) {
            CHECK(x >= 0.0);
        }
        CHECK(a.c_v == b.c_v);
        CHECK(a.c_kappa == b.c_kappa);
        CHECK(a.c_dgamma == b.c_dgamma);
    }
}
