#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tailscope/numeric.hpp"

namespace tailscope {

enum class AgentKind { vehicle, pedestrian, other };

[[nodiscard]] std::string_view to_string(AgentKind kind) noexcept;
// Throws ValidationError on anything but vehicle|pedestrian|other.
[[nodiscard]] AgentKind parse_agent_kind(std::string_view text);

struct AgentState {
    double t{0.0};
    Vec2 p{};
    Vec2 v{};
    double heading{0.0};  // (-pi, pi]
    AgentKind kind{AgentKind::vehicle};
};

// Orders identifiers numerically when both are integers, lexicographically
// otherwise. Used for target selection and for every output ordering.
struct IdLess {
    using is_transparent = void;
    bool operator()(std::string_view a, std::string_view b) const noexcept;
};

inline constexpr double kTimeTolerance = 1e-6;

// Uniformly sampled states of one agent. Immutable once constructed.
class Trajectory {
public:
    // Validates: at least two states, finite values, strictly increasing t,
    // every gap equal to dt within kTimeTolerance. Headings are wrapped.
    Trajectory(std::string agent_id, std::vector<AgentState> states, double dt);

    [[nodiscard]] const std::string& agent_id() const noexcept { return agent_id_; }
    [[nodiscard]] const std::vector<AgentState>& states() const noexcept { return states_; }
    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] AgentKind kind() const noexcept { return states_.front().kind; }
    [[nodiscard]] const AgentState& operator[](std::size_t i) const { return states_[i]; }

private:
    std::string agent_id_;
    std::vector<AgentState> states_;
    double dt_;
};

inline constexpr double kDefaultNeighborRadius = 50.0;

// All agents of one scene, frame-aligned, plus the designated target.
class Scene {
public:
    using AgentMap = std::map<std::string, Trajectory, IdLess>;

    // Validates: target present, shared dt and identical time stamps.
    Scene(std::string scene_id, AgentMap agents, std::string target_id,
          double neighbor_radius = kDefaultNeighborRadius);

    [[nodiscard]] const std::string& scene_id() const noexcept { return scene_id_; }
    [[nodiscard]] const AgentMap& agents() const noexcept { return agents_; }
    [[nodiscard]] const std::string& target_id() const noexcept { return target_id_; }
    [[nodiscard]] const Trajectory& target() const { return agents_.at(target_id_); }
    [[nodiscard]] double neighbor_radius() const noexcept { return neighbor_radius_; }
    [[nodiscard]] std::size_t frame_count() const { return target().size(); }
    [[nodiscard]] double dt() const { return target().dt(); }

private:
    std::string scene_id_;
    AgentMap agents_;
    std::string target_id_;
    double neighbor_radius_;
};

struct SceneCsvOptions {
    double neighbor_radius{kDefaultNeighborRadius};
};

// Reads `scene_id,agent_id,frame,t,x,y,vx,vy,heading,kind[,target]` rows.
// Scenes come back ordered by scene_id. Throws ParseError (with line) for
// malformed rows and ValidationError for broken invariants.
[[nodiscard]] std::vector<Scene> parse_scene_csv(std::string_view text,
                                                 const SceneCsvOptions& options = {});

// Writes the same format with a `target` column; numbers use 17 significant
// digits so a read-back is lossless.
[[nodiscard]] std::string write_scene_csv(const std::vector<Scene>& scenes);

}  // namespace tailscope
