#include "run_config.hpp"

#include <set>

#include "tailscope/errors.hpp"

namespace tailscope::cli {

void RunConfig::validate() const {
    for (double p : percents) {
        if (!(p > 0.0 && p <= 100.0)) {
            throw UsageError("top-k percents must lie in (0, 100], got " + std::to_string(p));
        }
    }
    if (workers == 0) throw UsageError("workers must be at least 1");
    if (ks.empty()) throw UsageError("at least one k is required");
    for (auto k : ks) {
        if (k == 0) throw UsageError("k must be at least 1");
    }
    if (mode != "mean" && mode != "sample") throw UsageError("mode must be mean or sample");
    if (categories == 0) throw UsageError("categories must be at least 1");
}

namespace {

void only_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> known(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.contains(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(where + ": bad value for '" + key + "'");
    }
}

void apply_synth(ScenarioSpec& s, const Json& j) {
    const std::string where = "config.synth";
    only_keys(j, {"kind", "scene_id", "speed", "heading", "radius", "decel", "brake_start", "gap",
                  "angle", "agents", "jitter", "frames", "dt", "neighbor_radius", "seed"},
              where);
    if (j.contains("kind")) s.kind = parse_scenario_kind(get<std::string>(j, "kind", where));
    if (j.contains("scene_id")) s.scene_id = get<std::string>(j, "scene_id", where);
    if (j.contains("speed")) s.speed = get<double>(j, "speed", where);
    if (j.contains("heading")) s.heading = get<double>(j, "heading", where);
    if (j.contains("radius")) s.radius = get<double>(j, "radius", where);
    if (j.contains("decel")) s.decel = get<double>(j, "decel", where);
    if (j.contains("brake_start")) s.brake_start = get<std::size_t>(j, "brake_start", where);
    if (j.contains("gap")) s.gap = get<double>(j, "gap", where);
    if (j.contains("angle")) s.angle = get<double>(j, "angle", where);
    if (j.contains("agents")) s.agents = get<std::size_t>(j, "agents", where);
    if (j.contains("jitter")) s.jitter = get<double>(j, "jitter", where);
    if (j.contains("frames")) s.frames = get<std::size_t>(j, "frames", where);
    if (j.contains("dt")) s.dt = get<double>(j, "dt", where);
    if (j.contains("neighbor_radius")) s.neighbor_radius = get<double>(j, "neighbor_radius", where);
    if (j.contains("seed")) s.seed = get<std::uint64_t>(j, "seed", where);
}

}  // namespace

void apply_config_json(RunConfig& c, const Json& j) {
    const std::string where = "config";
    only_keys(j, {"input", "out", "rss", "neighbor_radius", "density_radius", "perceiver_path",
                  "stats_path", "mode", "seed", "hidden", "latent", "memory", "eval", "synth",
                  "oracle_out", "workers"},
              where);
    if (j.contains("input")) {
        const auto& in = j.at("input");
        c.inputs = in.is_array() ? get<std::vector<std::string>>(j, "input", where)
                                 : std::vector<std::string>{get<std::string>(j, "input", where)};
    }
    if (j.contains("out")) c.out = get<std::string>(j, "out", where);
    if (j.contains("rss")) c.rss = rss_params_from_json(j.at("rss"), c.rss);
    if (j.contains("neighbor_radius")) c.neighbor_radius = get<double>(j, "neighbor_radius", where);
    if (j.contains("density_radius")) c.density_radius = get<double>(j, "density_radius", where);
    if (j.contains("perceiver_path")) c.perceiver_path = get<std::string>(j, "perceiver_path", where);
    if (j.contains("stats_path")) c.stats_path = get<std::string>(j, "stats_path", where);
    if (j.contains("mode")) c.mode = get<std::string>(j, "mode", where);
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", where);
    if (j.contains("hidden")) c.hidden = get<std::size_t>(j, "hidden", where);
    if (j.contains("latent")) c.latent = get<std::size_t>(j, "latent", where);
    if (j.contains("memory")) {
        const auto& m = j.at("memory");
        only_keys(m, {"categories"}, "config.memory");
        if (m.contains("categories")) c.categories = get<std::size_t>(m, "categories", "config.memory");
    }
    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        const std::string ew = "config.eval";
        only_keys(e, {"k", "threshold", "topk", "rank_metric", "rank_k"}, ew);
        if (e.contains("k")) {
            c.ks = e.at("k").is_array() ? get<std::vector<std::size_t>>(e, "k", ew)
                                        : std::vector<std::size_t>{get<std::size_t>(e, "k", ew)};
        }
        if (e.contains("threshold")) c.threshold = get<double>(e, "threshold", ew);
        if (e.contains("topk")) c.percents = get<std::vector<double>>(e, "topk", ew);
        if (e.contains("rank_metric")) c.rank_metric = parse_rank_metric(get<std::string>(e, "rank_metric", ew));
        if (e.contains("rank_k")) c.rank_k = get<std::size_t>(e, "rank_k", ew);
    }
    if (j.contains("synth")) apply_synth(c.synth, j.at("synth"));
    if (j.contains("oracle_out")) c.oracle_out = get<std::string>(j, "oracle_out", where);
    if (j.contains("workers")) c.workers = get<std::size_t>(j, "workers", where);
}

}  // namespace tailscope::cli
