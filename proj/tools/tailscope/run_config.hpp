#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tailscope/eval_harness.hpp"
#include "tailscope/interaction_metrics.hpp"
#include "tailscope/json_io.hpp"
#include "tailscope/synth_generator.hpp"
#include "tailscope/tail_perceiver.hpp"

namespace tailscope::cli {

// Everything a command may read. Populated from the JSON config first,
// then overridden by flags.
struct RunConfig {
    std::vector<std::string> inputs;
    std::optional<std::string> out;

    RssParams rss{};
    double neighbor_radius{kDefaultNeighborRadius};
    std::optional<double> density_radius;

    std::optional<std::string> perceiver_path;
    std::optional<std::string> stats_path;
    std::string mode{"mean"};
    std::uint64_t seed{0};
    std::size_t hidden{128};
    std::size_t latent{64};
    std::size_t categories{5};

    std::vector<std::size_t> ks{5};
    double threshold{kDefaultMissThreshold};
    std::vector<double> percents{1, 2, 3, 4, 5};
    std::optional<RankMetric> rank_metric;
    std::size_t rank_k{0};

    ScenarioSpec synth{};
    std::optional<std::string> oracle_out;

    std::size_t workers{1};

    // Throws UsageError when percents fall outside (0, 100] or workers is 0.
    void validate() const;
};

// Applies a config JSON document over `config`. Throws ConfigError.
void apply_config_json(RunConfig& config, const Json& j);

}  // namespace tailscope::cli
