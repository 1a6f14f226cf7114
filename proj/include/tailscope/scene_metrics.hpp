#pragma once

#include <array>
#include <string>
#include <string_view>

#include "tailscope/interaction_metrics.hpp"
#include "tailscope/intrinsic_metrics.hpp"
#include "tailscope/trajectory.hpp"

namespace tailscope {

inline constexpr std::size_t kIntrinsicCount = 8;
inline constexpr std::size_t kInteractiveCount = 6;
inline constexpr std::size_t kMetricCount = kIntrinsicCount + kInteractiveCount;

// Order used by every feature vector and JSON record.
inline constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "C_v",    "C_j",    "C_omega", "C_alpha", "C_vd", "C_kappa", "C_dkappa",
    "C_dgamma", "R_ittc", "R_lon", "R_lat", "R_mac", "R_ad", "R_ni"};

using MetricVector = std::array<double, kMetricCount>;

// All fourteen scalars for a scene's target agent.
struct SceneMetrics {
    std::string scene_id;
    std::string target_id;
    IntrinsicMetrics intrinsic;
    InteractiveMetrics interactive;

    [[nodiscard]] MetricVector values() const;
};

[[nodiscard]] SceneMetrics compute_scene_metrics(const Scene& scene,
                                                 const InteractionOptions& options = {});

}  // namespace tailscope
