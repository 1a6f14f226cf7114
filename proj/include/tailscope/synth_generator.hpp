#pragma once

#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <string_view>

#include "tailscope/trajectory.hpp"

namespace tailscope {

enum class ScenarioKind { constant, circle, brake, crossing, grid };

[[nodiscard]] std::string_view to_string(ScenarioKind kind) noexcept;
[[nodiscard]] ScenarioKind parse_scenario_kind(std::string_view text);

struct ScenarioSpec {
    ScenarioKind kind{ScenarioKind::constant};
    std::string scene_id{"synth"};
    double speed{5.0};      // m/s
    double heading{0.0};    // rad, constant / brake / grid direction of travel
    double radius{20.0};    // m, circle
    double decel{4.0};      // m/s^2, brake
    std::size_t brake_start{5};  // frame where braking begins
    double gap{20.0};       // m, crossing start distance / grid spacing
    double angle{std::numbers::pi};  // rad, crossing approach direction of the neighbour
    std::size_t agents{9};  // grid
    double jitter{0.0};     // m/s, seeded speed noise for grid agents
    std::size_t frames{20};
    double dt{0.1};
    double neighbor_radius{kDefaultNeighborRadius};
    std::uint64_t seed{0};

    // Throws UsageError on physically invalid values.
    void validate() const;
};

// Closed-form metric targets, keyed by metric name (C_v, C_kappa,
// ittc_frame0, ...). Only quantities with an exact expression are present.
using OracleValues = std::map<std::string, double>;

struct SynthResult {
    Scene scene;
    OracleValues oracle;
};

// Positions, velocities and headings are sampled analytically.
[[nodiscard]] SynthResult generate(const ScenarioSpec& spec);

}  // namespace tailscope
