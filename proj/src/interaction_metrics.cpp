#include "tailscope/interaction_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "tailscope/errors.hpp"
#include "tailscope/intrinsic_metrics.hpp"

namespace tailscope {

void RssParams::validate() const {
    const std::pair<const char*, double> fields[] = {
        {"rho", rho},           {"rho_ped", rho_ped},     {"a_max", a_max},
        {"b_min", b_min},       {"b_max", b_max},         {"a_lat_max", a_lat_max},
        {"b_lat_min", b_lat_min}, {"mu_lat", mu_lat},     {"alpha_lon", alpha_lon},
        {"beta_lon", beta_lon}, {"alpha_lat", alpha_lat}, {"beta_lat", beta_lat}};
    for (const auto& [name, value] : fields) {
        if (!(std::isfinite(value) && value > 0.0)) {
            throw ConfigError(std::string("RSS parameter '") + name + "' must be positive");
        }
    }
}

std::optional<double> pair_ittc(Vec2 p_i, Vec2 v_i, Vec2 p_j, Vec2 v_j) {
    const Vec2 dp = p_j - p_i;
    const double d2 = squared_norm(dp);
    if (d2 < kMinSeparation * kMinSeparation) return std::nullopt;
    const double closing = -dot(v_j - v_i, dp);
    return closing > 0.0 ? closing / d2 : 0.0;
}

std::vector<const Trajectory*> neighbors_at(const Scene& scene, std::size_t frame) {
    std::vector<const Trajectory*> out;
    const Vec2 p_i = scene.target()[frame].p;
    const double r2 = scene.neighbor_radius() * scene.neighbor_radius();
    for (const auto& [id, traj] : scene.agents()) {
        if (id == scene.target_id()) continue;
        if (squared_norm(traj[frame].p - p_i) <= r2) out.push_back(&traj);
    }
    return out;
}

double rss_longitudinal_distance(double v_i, double v_j, AgentKind neighbor,
                                 const RssParams& params) {
    const double rho = params.rho;
    const double v_veh = neighbor == AgentKind::vehicle ? v_j : 0.0;
    const double reacted = v_i + rho * params.a_max;
    const double d = v_i * rho + 0.5 * params.a_max * rho * rho +
                     reacted * reacted / (2.0 * params.b_min) -
                     v_veh * v_veh / (2.0 * params.b_max);
    return std::max(d, 0.0);
}

double rss_lateral_distance(double v_i, double v_j, AgentKind neighbor, const RssParams& params) {
    const double rho = params.rho;
    const double rho_eff = neighbor == AgentKind::pedestrian ? params.rho_ped : params.rho;
    const double b = params.b_lat_min;
    const double vi_rho = v_i + params.a_lat_max * rho;
    const double vj_rho = v_j - params.a_lat_max * rho_eff;
    const double vj_veh = neighbor == AgentKind::vehicle ? vj_rho : 0.0;
    const double own = 0.5 * (v_i + vi_rho) * rho + vi_rho * vi_rho / (2.0 * b);
    const double other = 0.5 * (v_j + vj_rho) * rho_eff - vj_veh * vj_veh / (2.0 * b);
    return params.mu_lat + std::max(own - other, 0.0);
}

double rss_risk(double required, double actual, double alpha, double beta) {
    if (!(required > 0.0)) return 0.0;
    const double deficit = std::max(required - actual, 0.0);
    return 1.0 - std::pow(1.0 + deficit / (beta * required), -alpha);
}

RiskResult ittc_risk(const Scene& scene) {
    RiskResult out;
    const auto& target = scene.target();
    const std::size_t frames = scene.frame_count();
    double sum = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
        double worst = 0.0;
        for (const Trajectory* nb : neighbors_at(scene, t)) {
            const auto r = pair_ittc(target[t].p, target[t].v, (*nb)[t].p, (*nb)[t].v);
            if (!r) {
                out.proximity = true;
                continue;
            }
            worst = std::max(worst, *r);
        }
        sum += worst;
    }
    out.value = sum / static_cast<double>(frames);
    return out;
}

double rss_longitudinal(const Scene& scene, const RssParams& params) {
    const auto& target = scene.target();
    const std::size_t frames = scene.frame_count();
    double sum = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
        const Vec2 axis{std::cos(target[t].heading), std::sin(target[t].heading)};
        const double v_i = dot(target[t].v, axis);
        double worst = 0.0;
        for (const Trajectory* nb : neighbors_at(scene, t)) {
            const auto& s = (*nb)[t];
            const double required = rss_longitudinal_distance(v_i, dot(s.v, axis), nb->kind(), params);
            const double actual = std::fabs(dot(s.p - target[t].p, axis));
            worst = std::max(worst, rss_risk(required, actual, params.alpha_lon, params.beta_lon));
        }
        sum += worst;
    }
    return sum / static_cast<double>(frames);
}

double rss_lateral(const Scene& scene, const RssParams& params) {
    const auto& target = scene.target();
    const std::size_t frames = scene.frame_count();
    double sum = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
        const Vec2 left{-std::sin(target[t].heading), std::cos(target[t].heading)};
        double worst = 0.0;
        for (const Trajectory* nb : neighbors_at(scene, t)) {
            const auto& s = (*nb)[t];
            const double offset = dot(s.p - target[t].p, left);
            const Vec2 axis = offset >= 0.0 ? left : -1.0 * left;
            const double required =
                rss_lateral_distance(dot(target[t].v, axis), dot(s.v, axis), nb->kind(), params);
            worst = std::max(worst, rss_risk(required, std::fabs(offset), params.alpha_lat,
                                             params.beta_lat));
        }
        sum += worst;
    }
    return sum / static_cast<double>(frames);
}

GlobalSceneRisk global_scene_risk(const Scene& scene, std::optional<double> density_radius) {
    GlobalSceneRisk out;
    const std::size_t frames = scene.frame_count();
    const double radius = density_radius.value_or(scene.neighbor_radius());
    if (!(radius > 0.0)) throw ConfigError("density radius must be positive");

    std::vector<const Trajectory*> all;
    for (const auto& [id, traj] : scene.agents()) all.push_back(&traj);
    const std::size_t n = all.size();

    if (n >= 2) {
        const double pair_norm = 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
        double mac = 0.0;
        for (std::size_t t = 0; t < frames; ++t) {
            double s = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                for (std::size_t b = a + 1; b < n; ++b) {
                    const auto& sa = (*all[a])[t];
                    const auto& sb = (*all[b])[t];
                    const auto r = pair_ittc(sa.p, sa.v, sb.p, sb.v);
                    if (!r) {
                        out.proximity = true;
                        continue;
                    }
                    s += *r;
                }
            }
            mac += pair_norm * s;
        }
        out.r_mac = mac / static_cast<double>(frames);
    }

    const auto& target = scene.target();
    const double area = std::numbers::pi * radius * radius;
    std::set<const Trajectory*> ever_near;
    double density = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
        std::size_t count = 0;
        for (const Trajectory* nb : neighbors_at(scene, t)) {
            ever_near.insert(nb);
            if (norm((*nb)[t].p - target[t].p) <= radius) ++count;
        }
        density += static_cast<double>(count) / area;
    }
    out.r_ad = density / static_cast<double>(frames);

    if (!ever_near.empty()) {
        // iterate in id order so the sum is reproducible
        double s = 0.0;
        for (const auto& [id, traj] : scene.agents()) {
            if (ever_near.contains(&traj)) s += kinematic_dynamism(traj).c_v;
        }
        out.r_ni = s / static_cast<double>(ever_near.size());
    }
    return out;
}

InteractiveMetrics interactive_metrics(const Scene& scene, const InteractionOptions& options) {
    options.rss.validate();
    InteractiveMetrics m;
    const auto ittc = ittc_risk(scene);
    m.r_ittc = ittc.value;
    m.r_lon = rss_longitudinal(scene, options.rss);
    m.r_lat = rss_lateral(scene, options.rss);
    const auto global = global_scene_risk(scene, options.density_radius);
    m.r_mac = global.r_mac;
    m.r_ad = global.r_ad;
    m.r_ni = global.r_ni;
    m.proximity = ittc.proximity || global.proximity;
    return m;
}

}  // namespace tailscope
