#include "tailscope/intrinsic_metrics.hpp"

#include <cmath>

namespace tailscope {
namespace {

double rms(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x * x;
    return std::sqrt(s / static_cast<double>(xs.size()));
}

double rms_norm(const std::vector<Vec2>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (const auto& x : xs) s += squared_norm(x);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace

KinematicDynamism kinematic_dynamism(const KinematicSeries& series) {
    KinematicDynamism out;
    out.c_v = rms_norm(series.a);
    out.c_omega = rms(series.omega);
    out.c_j = rms_norm(series.j);
    out.c_alpha = rms(series.alpha);
    out.degenerate = series.v.size() < 3;

    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < series.phi_rate.size(); ++k) {
        if (!series.phi_rate_defined[k]) continue;
        s += series.phi_rate[k] * series.phi_rate[k];
        ++count;
    }
    out.c_vd = count ? std::sqrt(s / static_cast<double>(count)) : 0.0;
    return out;
}

KinematicDynamism kinematic_dynamism(const Trajectory& traj) {
    return kinematic_dynamism(derive_kinematics(traj));
}

GeometricComplexity geometric_complexity(const KinematicSeries& series, double dt) {
    GeometricComplexity out;
    // kappa[k] belongs to frame k + 1, where acceleration is first defined
    std::vector<double> kappa;
    kappa.reserve(series.a.size());
    for (std::size_t k = 0; k < series.a.size(); ++k) {
        const Vec2 v = series.v[k + 1];
        const double speed = norm(v);
        if (speed < kMinSpeed) {
            kappa.push_back(0.0);
            continue;
        }
        kappa.push_back(std::fabs(cross(v, series.a[k])) / (speed * speed * speed));
    }
    if (!kappa.empty()) {
        double s = 0.0;
        for (double x : kappa) s += std::fabs(x);
        out.c_kappa = s / static_cast<double>(kappa.size());
    }
    if (kappa.size() >= 2) {
        double s = 0.0;
        for (std::size_t k = 1; k < kappa.size(); ++k) s += std::fabs((kappa[k] - kappa[k - 1]) / dt);
        out.c_dkappa = s / static_cast<double>(kappa.size() - 1);
    } else {
        out.degenerate = true;
    }
    return out;
}

GeometricComplexity geometric_complexity(const Trajectory& traj) {
    return geometric_complexity(derive_kinematics(traj), traj.dt());
}

TemporalIrregularity temporal_irregularity(const Trajectory& traj) {
    TemporalIrregularity out;
    const std::size_t n = traj.size();
    Vec2 mean{};
    for (const auto& s : traj.states()) mean = mean + s.v;
    mean = mean / static_cast<double>(n);

    std::vector<Vec2> dev;
    dev.reserve(n);
    for (const auto& s : traj.states()) dev.push_back(s.v - mean);

    out.gamma.resize(n);
    for (std::size_t lag = 0; lag < n; ++lag) {
        double s = 0.0;
        for (std::size_t t = 0; t + lag < n; ++t) s += dot(dev[t], dev[t + lag]);
        out.gamma[lag] = s / static_cast<double>(n - lag);
    }
    if (n < 3) {
        out.degenerate = true;
        return out;
    }
    double s = 0.0;
    for (std::size_t lag = 1; lag < n; ++lag) s += std::fabs(out.gamma[lag] - out.gamma[lag - 1]);
    out.c_dgamma = s / static_cast<double>(n - 1);
    return out;
}

IntrinsicMetrics intrinsic_metrics(const Trajectory& traj) {
    const auto series = derive_kinematics(traj);
    const auto dyn = kinematic_dynamism(series);
    const auto geo = geometric_complexity(series, traj.dt());
    const auto tmp = temporal_irregularity(traj);
    IntrinsicMetrics m;
    m.c_v = dyn.c_v;
    m.c_j = dyn.c_j;
    m.c_omega = dyn.c_omega;
    m.c_alpha = dyn.c_alpha;
    m.c_vd = dyn.c_vd;
    m.c_kappa = geo.c_kappa;
    m.c_dkappa = geo.c_dkappa;
    m.c_dgamma = tmp.c_dgamma;
    m.degenerate = dyn.degenerate || geo.degenerate || tmp.degenerate;
    return m;
}

}  // namespace tailscope
