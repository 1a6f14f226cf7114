#pragma once

// JSON forms of the library's parameter and report types.

#include <string>

#include <json.hpp>

#include "tailscope/eval_harness.hpp"
#include "tailscope/interaction_metrics.hpp"
#include "tailscope/meta_memory.hpp"
#include "tailscope/scene_metrics.hpp"
#include "tailscope/synth_generator.hpp"
#include "tailscope/tail_perceiver.hpp"

namespace tailscope {

using Json = nlohmann::json;

// Serializes with every floating-point number printed as %.17g so output is
// byte-stable and lossless. Keys keep nlohmann's sorted order.
[[nodiscard]] std::string dump_json(const Json& value, int indent = 2);

// Missing keys keep their defaults; unknown keys are rejected.
[[nodiscard]] RssParams rss_params_from_json(const Json& j, RssParams base = {});
[[nodiscard]] Json to_json(const RssParams& params);

[[nodiscard]] PerceiverParams perceiver_from_json(const Json& j);
[[nodiscard]] Json to_json(const PerceiverParams& params);

[[nodiscard]] PrototypeMemory memory_from_json(const Json& j);
[[nodiscard]] Json to_json(const PrototypeMemory& memory);

[[nodiscard]] CognitiveSetParams cognitive_set_from_json(const Json& j);
[[nodiscard]] Json to_json(const CognitiveSetParams& params);

[[nodiscard]] DatasetStats dataset_stats_from_json(const Json& j);
[[nodiscard]] Json to_json(const DatasetStats& stats);

[[nodiscard]] Json to_json(const SceneMetrics& metrics);
[[nodiscard]] Json to_json(const EvalReport& report);

// Sidecar written next to synthetic scene CSVs.
[[nodiscard]] Json oracle_to_json(const ScenarioSpec& spec, const OracleValues& oracle);

}  // namespace tailscope
