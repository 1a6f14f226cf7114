#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tailscope/numeric.hpp"
#include "tailscope/trajectory.hpp"

namespace tailscope {

// Responsibility-sensitive-safety constants. All strictly positive.
struct RssParams {
    double rho{0.5};        // reaction time, s
    double rho_ped{1.0};    // pedestrian reaction time, s
    double a_max{3.0};      // m/s^2
    double b_min{4.0};      // m/s^2
    double b_max{8.0};      // m/s^2
    double a_lat_max{0.9};  // m/s^2
    double b_lat_min{1.2};  // m/s^2
    double mu_lat{0.5};     // lateral margin, m
    double alpha_lon{1.0};
    double beta_lon{1.0};
    double alpha_lat{1.0};
    double beta_lat{1.0};

    // Throws ConfigError naming the first non-positive field.
    void validate() const;
};

struct InteractiveMetrics {
    double r_ittc{0.0};  // 1/s
    double r_lon{0.0};   // [0, 1)
    double r_lat{0.0};   // [0, 1)
    double r_mac{0.0};   // 1/s
    double r_ad{0.0};    // agents/m^2
    double r_ni{0.0};    // m/s^2
    bool proximity{false};  // some pair closer than kMinSeparation was skipped
};

struct InteractionOptions {
    RssParams rss{};
    // Radius of the density disc; the scene's neighbor radius when unset.
    std::optional<double> density_radius{};
};

// Pairs closer than this are skipped by the ITTC ratio.
inline constexpr double kMinSeparation = 0.01;

// [-(v_j - v_i).(p_j - p_i)]_+ / |p_j - p_i|^2. Returns nullopt for
// coincident positions.
[[nodiscard]] std::optional<double> pair_ittc(Vec2 p_i, Vec2 v_i, Vec2 p_j, Vec2 v_j);

// Agents other than the target within the neighbor radius at one frame.
[[nodiscard]] std::vector<const Trajectory*> neighbors_at(const Scene& scene, std::size_t frame);

// Required longitudinal gap for the target following at speed v_i with a
// neighbor moving at v_j (v_j ignored unless the neighbor is a vehicle).
[[nodiscard]] double rss_longitudinal_distance(double v_i, double v_j, AgentKind neighbor,
                                               const RssParams& params);

// Required lateral gap. Lateral speeds are measured along the axis pointing
// from the target toward the neighbor.
[[nodiscard]] double rss_lateral_distance(double v_i, double v_j, AgentKind neighbor,
                                          const RssParams& params);

// 1 - (1 + [required - actual]_+ / (beta required))^-alpha; 0 when required <= 0.
[[nodiscard]] double rss_risk(double required, double actual, double alpha, double beta);

struct RiskResult {
    double value{0.0};
    bool proximity{false};
};

[[nodiscard]] RiskResult ittc_risk(const Scene& scene);
[[nodiscard]] double rss_longitudinal(const Scene& scene, const RssParams& params);
[[nodiscard]] double rss_lateral(const Scene& scene, const RssParams& params);

struct GlobalSceneRisk {
    double r_mac{0.0};
    double r_ad{0.0};
    double r_ni{0.0};
    bool proximity{false};
};

// R_ni averages C_v over every agent that enters the neighbor set at some frame.
[[nodiscard]] GlobalSceneRisk global_scene_risk(const Scene& scene,
                                                std::optional<double> density_radius = {});

[[nodiscard]] InteractiveMetrics interactive_metrics(const Scene& scene,
                                                     const InteractionOptions& options = {});

}  // namespace tailscope
