#include <cmath>

#include "tailscope/kinematics.hpp"

namespace tailscope {

KinematicSeries derive_kinematics(const Trajectory& traj, double min_speed) {
    const std::size_t n = traj.size();
    const double dt = traj.dt();
    KinematicSeries k;
    k.v.reserve(n);
    k.phi.reserve(n);
    for (const auto& s : traj.states()) {
        k.v.push_back(s.v);
        k.phi.push_back(std::atan2(s.v.y, s.v.x));
    }
    for (std::size_t t = 1; t < n; ++t) {
        k.a.push_back((k.v[t] - k.v[t - 1]) / dt);
        k.omega.push_back(wrap_angle(traj[t].heading - traj[t - 1].heading) / dt);
        k.phi_rate.push_back(wrap_angle(k.phi[t] - k.phi[t - 1]) / dt);
        k.phi_rate_defined.push_back(norm(k.v[t]) >= min_speed && norm(k.v[t - 1]) >= min_speed);
    }
    for (std::size_t t = 1; t < k.a.size(); ++t) {
        k.j.push_back((k.a[t] - k.a[t - 1]) / dt);
        k.alpha.push_back((k.omega[t] - k.omega[t - 1]) / dt);
    }
    return k;
}

}  // namespace tailscope
