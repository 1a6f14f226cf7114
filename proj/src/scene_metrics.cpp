#include "tailscope/scene_metrics.hpp"

namespace tailscope {

MetricVector SceneMetrics::values() const {
    const auto& a = intrinsic;
    const auto& r = interactive;
    return {a.c_v,    a.c_j,     a.c_omega, a.c_alpha, a.c_vd,  a.c_kappa, a.c_dkappa,
            a.c_dgamma, r.r_ittc, r.r_lon,   r.r_lat,   r.r_mac, r.r_ad,    r.r_ni};
}

SceneMetrics compute_scene_metrics(const Scene& scene, const InteractionOptions& options) {
    return {scene.scene_id(), scene.target_id(), intrinsic_metrics(scene.target()),
            interactive_metrics(scene, options)};
}

}  // namespace tailscope
