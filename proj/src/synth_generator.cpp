#include "tailscope/synth_generator.hpp"

#include <cmath>
#include <random>

#include "tailscope/errors.hpp"
#include "tailscope/numeric.hpp"

namespace tailscope {

std::string_view to_string(ScenarioKind kind) noexcept {
    switch (kind) {
        case ScenarioKind::constant: return "constant";
        case ScenarioKind::circle: return "circle";
        case ScenarioKind::brake: return "brake";
        case ScenarioKind::crossing: return "crossing";
        case ScenarioKind::grid: return "grid";
    }
    return "constant";
}

ScenarioKind parse_scenario_kind(std::string_view text) {
    for (auto k : {ScenarioKind::constant, ScenarioKind::circle, ScenarioKind::brake,
                   ScenarioKind::crossing, ScenarioKind::grid}) {
        if (text == to_string(k)) return k;
    }
    throw UsageError("unknown scenario kind '" + std::string(text) + "'");
}

void ScenarioSpec::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw UsageError(std::string("scenario: ") + what);
    };
    require(std::isfinite(speed) && speed >= 0.0, "speed must be >= 0");
    require(std::isfinite(radius) && radius > 0.0, "radius must be > 0");
    require(std::isfinite(dt) && dt > 0.0, "dt must be > 0");
    require(frames >= 2, "frames must be >= 2");
    require(std::isfinite(heading) && std::isfinite(angle), "angles must be finite");
    require(std::isfinite(neighbor_radius) && neighbor_radius > 0.0, "neighbor radius must be > 0");
    require(!scene_id.empty(), "scene id must not be empty");
    switch (kind) {
        case ScenarioKind::brake:
            require(std::isfinite(decel) && decel > 0.0, "decel must be > 0");
            require(brake_start < frames, "brake_start must be inside the window");
            break;
        case ScenarioKind::crossing:
            require(std::isfinite(gap) && gap > 0.0, "gap must be > 0");
            break;
        case ScenarioKind::grid:
            require(std::isfinite(gap) && gap > 0.0, "gap must be > 0");
            require(agents >= 1, "grid needs at least one agent");
            require(std::isfinite(jitter) && jitter >= 0.0, "jitter must be >= 0");
            break;
        default: break;
    }
}

namespace {

Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

std::vector<AgentState> straight(Vec2 start, Vec2 velocity, double heading, const ScenarioSpec& spec,
                                 AgentKind kind = AgentKind::vehicle) {
    std::vector<AgentState> states;
    for (std::size_t k = 0; k < spec.frames; ++k) {
        const double t = static_cast<double>(k) * spec.dt;
        states.push_back({t, start + t * velocity, velocity, heading, kind});
    }
    return states;
}

SynthResult make_constant(const ScenarioSpec& spec) {
    const Vec2 v = spec.speed * unit(spec.heading);
    Scene::AgentMap agents;
    agents.emplace("0", Trajectory("0", straight({0.0, 0.0}, v, spec.heading, spec), spec.dt));
    OracleValues o;
    for (const char* m : {"C_v", "C_j", "C_omega", "C_alpha", "C_vd", "C_kappa", "C_dkappa", "C_dgamma",
                          "R_ittc", "R_mac", "R_ad", "R_ni"}) {
        o[m] = 0.0;
    }
    return {Scene(spec.scene_id, std::move(agents), "0", spec.neighbor_radius), o};
}

SynthResult make_circle(const ScenarioSpec& spec) {
    const double r = spec.radius;
    const double omega = spec.speed / r;
    std::vector<AgentState> states;
    for (std::size_t k = 0; k < spec.frames; ++k) {
        const double t = static_cast<double>(k) * spec.dt;
        const double th = omega * t;
        states.push_back({t, r * unit(th), spec.speed * unit(th + std::numbers::pi / 2),
                          wrap_angle(th + std::numbers::pi / 2), AgentKind::vehicle});
    }
    Scene::AgentMap agents;
    agents.emplace("0", Trajectory("0", std::move(states), spec.dt));
    // backward differences of a uniformly rotating vector of length L
    // have length 2 L sin(omega dt / 2) / dt
    const double chord = 2.0 * std::sin(omega * spec.dt / 2.0) / spec.dt;
    OracleValues o;
    o["C_kappa"] = 1.0 / r;
    o["C_omega"] = omega;
    o["C_vd"] = omega;
    o["C_alpha"] = 0.0;
    o["C_v"] = spec.speed * chord;
    o["C_j"] = spec.speed * chord * chord;
    return {Scene(spec.scene_id, std::move(agents), "0", spec.neighbor_radius), o};
}

SynthResult make_brake(const ScenarioSpec& spec) {
    const double v0 = spec.speed;
    const double b = spec.decel;
    const double t_start = static_cast<double>(spec.brake_start) * spec.dt;
    const double t_stop = v0 / b;
    const Vec2 dir = unit(spec.heading);
    std::vector<AgentState> states;
    for (std::size_t k = 0; k < spec.frames; ++k) {
        const double t = static_cast<double>(k) * spec.dt;
        double s = 0.0;
        double v = 0.0;
        if (t <= t_start) {
            s = v0 * t;
            v = v0;
        } else {
            const double tau = std::min(t - t_start, t_stop);
            s = v0 * t_start + v0 * tau - 0.5 * b * tau * tau;
            v = std::max(v0 - b * (t - t_start), 0.0);
        }
        states.push_back({t, s * dir, v * dir, wrap_angle(spec.heading), AgentKind::vehicle});
    }
    Scene::AgentMap agents;
    agents.emplace("0", Trajectory("0", std::move(states), spec.dt));
    OracleValues o;
    o["C_omega"] = 0.0;
    o["C_alpha"] = 0.0;
    o["C_kappa"] = 0.0;
    // exact when the stop lands on a frame inside the window
    const double steps = v0 / (b * spec.dt);
    const double rounded = std::round(steps);
    const std::size_t t_frames = spec.frames;
    if (std::fabs(steps - rounded) < 1e-9 && rounded >= 1.0 && spec.brake_start >= 1 &&
        spec.brake_start + static_cast<std::size_t>(rounded) + 1 <= t_frames - 1) {
        o["C_v"] = b * std::sqrt(rounded / static_cast<double>(t_frames - 1));
        o["C_j"] = (b / spec.dt) * std::sqrt(2.0 / static_cast<double>(t_frames - 2));
    }
    return {Scene(spec.scene_id, std::move(agents), "0", spec.neighbor_radius), o};
}

SynthResult make_crossing(const ScenarioSpec& spec) {
    const Vec2 conflict{spec.gap / 2.0, 0.0};
    const Vec2 vi = spec.speed * unit(0.0);
    const Vec2 vj = spec.speed * unit(spec.angle);
    const Vec2 pj0 = conflict - (spec.gap / 2.0) * unit(spec.angle);
    Scene::AgentMap agents;
    agents.emplace("0", Trajectory("0", straight({0.0, 0.0}, vi, 0.0, spec), spec.dt));
    agents.emplace("1", Trajectory("1", straight(pj0, vj, wrap_angle(spec.angle), spec), spec.dt));
    const Vec2 dp = pj0;
    const Vec2 dv = vj - vi;
    OracleValues o;
    o["ittc_frame0"] = std::max(-dot(dv, dp), 0.0) / squared_norm(dp);
    for (const char* m : {"C_v", "C_j", "C_omega", "C_alpha", "C_vd", "C_kappa", "C_dkappa", "C_dgamma"}) {
        o[m] = 0.0;
    }
    return {Scene(spec.scene_id, std::move(agents), "0", spec.neighbor_radius), o};
}

SynthResult make_grid(const ScenarioSpec& spec) {
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(spec.agents))));
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    const Vec2 dir = unit(spec.heading);
    const Vec2 side = unit(spec.heading + std::numbers::pi / 2);
    Scene::AgentMap agents;
    std::size_t within = 0;
    for (std::size_t i = 0; i < spec.agents; ++i) {
        const auto row = static_cast<double>(i / cols);
        const auto col = static_cast<double>(i % cols);
        const Vec2 start = (col * spec.gap) * dir + (row * spec.gap) * side;
        const double speed = i == 0 ? spec.speed : spec.speed + spec.jitter * noise(rng);
        const std::string id = std::to_string(i);
        agents.emplace(id, Trajectory(id, straight(start, speed * dir, wrap_angle(spec.heading), spec),
                                      spec.dt));
        if (i > 0 && norm(start) <= spec.neighbor_radius) ++within;
    }
    OracleValues o;
    for (const char* m : {"C_v", "C_j", "C_omega", "C_alpha", "C_vd", "C_kappa", "C_dkappa", "C_dgamma"}) {
        o[m] = 0.0;
    }
    if (spec.jitter == 0.0) {
        o["R_ittc"] = 0.0;
        o["R_mac"] = 0.0;
        o["R_ni"] = 0.0;
        o["R_ad"] = static_cast<double>(within) /
                    (std::numbers::pi * spec.neighbor_radius * spec.neighbor_radius);
    }
    return {Scene(spec.scene_id, std::move(agents), "0", spec.neighbor_radius), o};
}

}  // namespace

SynthResult generate(const ScenarioSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case ScenarioKind::constant: return make_constant(spec);
        case ScenarioKind::circle: return make_circle(spec);
        case ScenarioKind::brake: return make_brake(spec);
        case ScenarioKind::crossing: return make_crossing(spec);
        case ScenarioKind::grid: return make_grid(spec);
    }
    throw UsageError("unknown scenario kind");
}

}  // namespace tailscope
