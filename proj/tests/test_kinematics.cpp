#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support/scenes.hpp"
#include "tailscope/kinematics.hpp"

using namespace tailscope;

TEST_CASE("constant velocity has no derivatives") {
    const auto k = derive_kinematics(testkit::constant_velocity("1", {}, {5, 0}, 10, 0.1));
    REQUIRE(k.a.size() == 9);
    REQUIRE(k.j.size() == 8);
    for (const auto& a : k.a) CHECK(norm(a) == 0.0);
    for (const auto& j : k.j) CHECK(norm(j) == 0.0);
    for (double w : k.omega) CHECK(w == 0.0);
}

TEST_CASE("heading differences wrap across the branch cut") {
    std::vector<AgentState> states{{0.0, {}, {1, 0}, 3.1, AgentKind::vehicle},
                                   {1.0, {}, {1, 0}, -3.1, AgentKind::vehicle}};
    const auto k = derive_kinematics(Trajectory("1", states, 1.0));
    REQUIRE(k.omega.size() == 1);
    CHECK(k.omega[0] == doctest::Approx(2.0 * std::numbers::pi - 6.2).epsilon(1e-12));
    CHECK(k.omega[0] > 0.0);
}

TEST_CASE("backward differences of a 1-D velocity") {
    const auto k = derive_kinematics(
        testkit::from_velocities("1", {{0, 0}, {1, 0}, {0, 0}, {1, 0}}, 1.0));
    REQUIRE(k.a.size() == 3);
    CHECK(k.a[0].x == 1.0);
    CHECK(k.a[1].x == -1.0);
    CHECK(k.a[2].x == 1.0);
    REQUIRE(k.j.size() == 2);
    CHECK(k.j[0].x == -2.0);
    CHECK(k.j[1].x == 2.0);
}

TEST_CASE("velocity-direction rate is undefined below the speed floor") {
    const auto k = derive_kinematics(
        testkit::from_velocities("1", {{1, 0}, {0.05, 0}, {0, 1}, {-1, 0}}, 1.0));
    REQUIRE(k.phi_rate_defined.size() == 3);
    CHECK_FALSE(k.phi_rate_defined[0]);
    CHECK_FALSE(k.phi_rate_defined[1]);
    CHECK(k.phi_rate_defined[2]);
    CHECK(k.phi_rate[2] == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
}

TEST_CASE("two states give velocity and one acceleration only") {
    const auto k = derive_kinematics(testkit::from_velocities("1", {{0, 0}, {2, 0}}, 0.5));
    CHECK(k.a.size() == 1);
    CHECK(k.j.empty());
    CHECK(k.alpha.empty());
    CHECK(k.a[0].x == 4.0);
}
