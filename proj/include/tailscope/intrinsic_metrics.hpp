#pragma once

#include <vector>

#include "tailscope/kinematics.hpp"
#include "tailscope/trajectory.hpp"

namespace tailscope {

// Translational and rotational volatility of one trajectory. RMS values are
// taken over the frames where each derivative exists.
struct KinematicDynamism {
    double c_v{0.0};      // m/s^2
    double c_j{0.0};      // m/s^3
    double c_omega{0.0};  // rad/s
    double c_alpha{0.0};  // rad/s^2
    double c_vd{0.0};     // rad/s
    bool degenerate{false};  // fewer than 3 states: c_j and c_alpha forced to 0
};

struct GeometricComplexity {
    double c_kappa{0.0};   // 1/m
    double c_dkappa{0.0};  // 1/(m s)
    bool degenerate{false};  // fewer than 3 states: c_dkappa forced to 0
};

struct TemporalIrregularity {
    double c_dgamma{0.0};       // m^2/s^2
    std::vector<double> gamma;  // autocovariance at lags 0 .. T-1
    bool degenerate{false};     // T < 3
};

struct IntrinsicMetrics {
    double c_v{0.0};
    double c_j{0.0};
    double c_omega{0.0};
    double c_alpha{0.0};
    double c_vd{0.0};
    double c_kappa{0.0};
    double c_dkappa{0.0};
    double c_dgamma{0.0};
    bool degenerate{false};
};

[[nodiscard]] KinematicDynamism kinematic_dynamism(const Trajectory& traj);
[[nodiscard]] KinematicDynamism kinematic_dynamism(const KinematicSeries& series);

// Frames slower than kMinSpeed contribute zero curvature.
[[nodiscard]] GeometricComplexity geometric_complexity(const Trajectory& traj);
[[nodiscard]] GeometricComplexity geometric_complexity(const KinematicSeries& series, double dt);

// gamma(tau) uses the dot product of 2-D velocity deviations from the window
// mean, averaged over the T - tau overlapping pairs.
[[nodiscard]] TemporalIrregularity temporal_irregularity(const Trajectory& traj);

[[nodiscard]] IntrinsicMetrics intrinsic_metrics(const Trajectory& traj);

}  // namespace tailscope
