#include "tailscope/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <utility>

#include "tailscope/errors.hpp"

namespace tailscope {

std::string_view to_string(AgentKind kind) noexcept {
    switch (kind) {
        case AgentKind::vehicle: return "vehicle";
        case AgentKind::pedestrian: return "pedestrian";
        case AgentKind::other: return "other";
    }
    return "other";
}

AgentKind parse_agent_kind(std::string_view text) {
    if (text == "vehicle") return AgentKind::vehicle;
    if (text == "pedestrian") return AgentKind::pedestrian;
    if (text == "other") return AgentKind::other;
    throw ValidationError("unknown agent kind '" + std::string(text) + "'");
}

namespace {

bool parse_integer(std::string_view s, long long& out) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

bool IdLess::operator()(std::string_view a, std::string_view b) const noexcept {
    long long ia = 0;
    long long ib = 0;
    const bool na = parse_integer(a, ia);
    const bool nb = parse_integer(b, ib);
    if (na && nb) {
        if (ia != ib) return ia < ib;
        return a < b;  // "07" vs "7"
    }
    if (na != nb) return na;  // integers sort before free-form ids
    return a < b;
}

Trajectory::Trajectory(std::string agent_id, std::vector<AgentState> states, double dt)
    : agent_id_(std::move(agent_id)), states_(std::move(states)), dt_(dt) {
    if (!(std::isfinite(dt_) && dt_ > 0.0)) {
        throw ValidationError("agent " + agent_id_ + ": dt must be positive");
    }
    if (states_.size() < 2) {
        throw ValidationError("agent " + agent_id_ + ": trajectory needs at least 2 states");
    }
    for (std::size_t i = 0; i < states_.size(); ++i) {
        auto& s = states_[i];
        if (!(std::isfinite(s.t) && std::isfinite(s.p.x) && std::isfinite(s.p.y) &&
              std::isfinite(s.v.x) && std::isfinite(s.v.y) && std::isfinite(s.heading))) {
            throw ValidationError("agent " + agent_id_ + ": non-finite value at state " +
                                  std::to_string(i));
        }
        s.heading = wrap_angle(s.heading);
        if (i == 0) continue;
        const double gap = s.t - states_[i - 1].t;
        if (!(gap > 0.0)) {
            throw ValidationError("agent " + agent_id_ + ": time not strictly increasing at state " +
                                  std::to_string(i));
        }
        if (std::fabs(gap - dt_) > kTimeTolerance) {
            throw ValidationError("agent " + agent_id_ + ": time gap " + std::to_string(gap) +
                                  " at state " + std::to_string(i) + " differs from dt " +
                                  std::to_string(dt_));
        }
    }
}

Scene::Scene(std::string scene_id, AgentMap agents, std::string target_id, double neighbor_radius)
    : scene_id_(std::move(scene_id)),
      agents_(std::move(agents)),
      target_id_(std::move(target_id)),
      neighbor_radius_(neighbor_radius) {
    if (!(std::isfinite(neighbor_radius_) && neighbor_radius_ > 0.0)) {
        throw ValidationError("scene " + scene_id_ + ": neighbor radius must be positive");
    }
    const auto it = agents_.find(target_id_);
    if (it == agents_.end()) {
        throw ValidationError("scene " + scene_id_ + ": target '" + target_id_ + "' not present");
    }
    const Trajectory& ref = it->second;
    for (const auto& [id, traj] : agents_) {
        if (std::fabs(traj.dt() - ref.dt()) > kTimeTolerance) {
            throw ValidationError("scene " + scene_id_ + ": agent " + id + " has a different dt");
        }
        if (traj.size() != ref.size()) {
            throw ValidationError("scene " + scene_id_ + ": agent " + id +
                                  " does not share the scene time range");
        }
        for (std::size_t k = 0; k < traj.size(); ++k) {
            if (std::fabs(traj[k].t - ref[k].t) > kTimeTolerance) {
                throw ValidationError("scene " + scene_id_ + ": agent " + id +
                                      " does not share the scene time range");
            }
        }
    }
}

}  // namespace tailscope
