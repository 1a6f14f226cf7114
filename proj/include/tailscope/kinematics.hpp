#pragma once

#include <vector>

#include "tailscope/numeric.hpp"
#include "tailscope/trajectory.hpp"

namespace tailscope {

// Below this speed the movement direction atan2(vy, vx) is treated as undefined.
inline constexpr double kMinSpeed = 0.1;

// Backward-difference derivatives of one trajectory. Series start at the
// first frame where their difference is defined:
//   v, phi           frame 0 ..
//   a, omega, phi_rate  frame 1 ..
//   j, alpha         frame 2 ..
// so a[k] belongs to frame k + 1, j[k] to frame k + 2, and so on.
struct KinematicSeries {
    std::vector<Vec2> v;
    std::vector<Vec2> a;
    std::vector<Vec2> j;
    std::vector<double> omega;
    std::vector<double> alpha;
    std::vector<double> phi;
    std::vector<double> phi_rate;
    // phi_rate[k] is meaningful only when both endpoint speeds reach kMinSpeed.
    std::vector<bool> phi_rate_defined;
};

// Velocities are taken as given; positions are never differentiated.
// Angle differences are wrapped to (-pi, pi] before dividing by dt.
[[nodiscard]] KinematicSeries derive_kinematics(const Trajectory& traj,
                                                double min_speed = kMinSpeed);

}  // namespace tailscope
