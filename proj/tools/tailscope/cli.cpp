#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "run_config.hpp"
#include "tailscope/errors.hpp"
#include "tailscope/meta_memory.hpp"
#include "tailscope/scene_metrics.hpp"

namespace tailscope::cli {
namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const RunConfig& config, const std::optional<std::string>& path, const std::string& text,
          std::ostream& out) {
    (void)config;
    if (!path) {
        out << text;
        return;
    }
    std::ofstream f(*path, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write output file '" + *path + "'");
    f << text;
    if (!f) throw Error("failed writing '" + *path + "'");
}

// Applies fn to 0..n-1 on `workers` threads; results land at their index.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, std::size_t workers, Fn fn) {
    std::vector<T> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                results[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t count = std::min(workers, std::max<std::size_t>(n, 1));
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < count; ++w) pool.emplace_back(worker);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

std::vector<Scene> load_scenes(const RunConfig& config) {
    if (config.inputs.empty()) throw UsageError("--input is required");
    std::vector<Scene> scenes;
    for (const auto& path : config.inputs) {
        const auto text = read_file(path);
        auto parsed = parse_scene_csv(text, {config.neighbor_radius});
        for (auto& s : parsed) scenes.push_back(std::move(s));
    }
    std::stable_sort(scenes.begin(), scenes.end(), [](const Scene& a, const Scene& b) {
        return IdLess{}(a.scene_id(), b.scene_id());
    });
    for (std::size_t i = 1; i < scenes.size(); ++i) {
        if (scenes[i].scene_id() == scenes[i - 1].scene_id()) {
            throw ValidationError("scene '" + scenes[i].scene_id() + "' appears in more than one input");
        }
    }
    return scenes;
}

std::vector<SceneMetrics> all_metrics(const std::vector<Scene>& scenes, const RunConfig& config) {
    InteractionOptions options{config.rss, config.density_radius};
    return parallel_map<SceneMetrics>(scenes.size(), config.workers, [&](std::size_t i) {
        return compute_scene_metrics(scenes[i], options);
    });
}

int cmd_metrics(const RunConfig& config, std::ostream& out) {
    const auto scenes = load_scenes(config);
    const auto metrics = all_metrics(scenes, config);
    Json records = Json::array();
    for (const auto& m : metrics) records.push_back(to_json(m));
    Json doc = {{"scenes", records},
                {"config_echo",
                 {{"rss", to_json(config.rss)},
                  {"neighbor_radius", config.neighbor_radius},
                  {"density_radius", config.density_radius.value_or(config.neighbor_radius)}}}};
    emit(config, config.out, dump_json(doc), out);
    return kExitOk;
}

int cmd_rank(const RunConfig& config, std::ostream& out) {
    const auto scenes = load_scenes(config);
    if (scenes.empty()) throw UsageError("no scenes to rank");
    const auto metrics = all_metrics(scenes, config);

    std::vector<MetricVector> values;
    for (const auto& m : metrics) values.push_back(m.values());
    DatasetStats stats;
    if (config.stats_path) {
        stats = dataset_stats_from_json(Json::parse(read_file(*config.stats_path)));
    } else if (values.size() >= 2) {
        stats = DatasetStats::from_samples(values);
    } else {
        stats.location = values.front();
        stats.scale.fill(1.0);
        stats.degenerate.fill(true);
    }

    const PerceiverParams params =
        config.perceiver_path
            ? perceiver_from_json(Json::parse(read_file(*config.perceiver_path)))
            : PerceiverParams::initialize(config.seed, config.hidden, config.latent);
    params.validate();
    const bool sample = config.mode == "sample";

    struct Ranked {
        std::size_t index;
        NormalizedFeatures features;
        TailIndexResult result;
    };
    auto ranked = parallel_map<Ranked>(scenes.size(), config.workers, [&](std::size_t i) {
        auto features = normalize_features(values[i], stats);
        const auto mode = sample ? ForwardMode::sample(config.seed + i) : ForwardMode::mean();
        auto result = perceive(params, features, mode);
        return Ranked{i, std::move(features), std::move(result)};
    });

    std::vector<double> tis;
    for (const auto& r : ranked) tis.push_back(r.result.ti);
    const auto partition =
        partition_categories(tis, std::min(config.categories, tis.size()));

    std::stable_sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
        if (a.result.ti != b.result.ti) return a.result.ti > b.result.ti;
        return IdLess{}(scenes[a.index].scene_id(), scenes[b.index].scene_id());
    });

    Json rows = Json::array();
    for (std::size_t r = 0; r < ranked.size(); ++r) {
        const auto& item = ranked[r];
        rows.push_back({{"rank", r + 1},
                        {"scene_id", scenes[item.index].scene_id()},
                        {"target_id", scenes[item.index].target_id()},
                        {"ti", item.result.ti},
                        {"category", partition.category[item.index]},
                        {"alpha_i", item.result.alpha.alpha_i},
                        {"alpha_r", item.result.alpha.alpha_r},
                        {"kl_i", item.result.kl_i},
                        {"kl_r", item.result.kl_r},
                        {"F_i", item.features.intrinsic},
                        {"F_r", item.features.interactive}});
    }
    Json doc = {{"ranking", rows},
                {"stats", to_json(stats)},
                {"boundaries", partition.boundaries},
                {"boundary_ties", partition.ties},
                {"config_echo",
                 {{"mode", config.mode},
                  {"seed", config.seed},
                  {"categories", std::min(config.categories, tis.size())},
                  {"perceiver", config.perceiver_path ? *config.perceiver_path : "seeded-init"}}}};
    emit(config, config.out, dump_json(doc), out);
    return kExitOk;
}

int cmd_eval(const RunConfig& config, std::ostream& out) {
    if (config.inputs.size() != 1) throw UsageError("eval takes exactly one --input JSONL file");
    if (!config.rank_metric) {
        throw UsageError("eval needs a worst-case ranking metric (--rank-metric min_ade|min_fde)");
    }
    const auto samples = read_forecast_jsonl(read_file(config.inputs.front()));
    EvalOptions options;
    options.ks = config.ks;
    options.miss_threshold = config.threshold;
    options.percents = config.percents;
    options.rank_metric = *config.rank_metric;
    options.rank_k = config.rank_k;
    const auto report = evaluate(samples, options);
    emit(config, config.out, dump_json(to_json(report)), out);
    return kExitOk;
}

int cmd_synth(const RunConfig& config, std::ostream& out) {
    const auto result = generate(config.synth);
    emit(config, config.out, write_scene_csv({result.scene}), out);
    std::optional<std::string> oracle_path = config.oracle_out;
    if (!oracle_path && config.out) oracle_path = *config.out + ".oracle.json";
    if (oracle_path) {
        emit(config, oracle_path, dump_json(oracle_to_json(config.synth, result.oracle)), out);
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Tail-risk analytics for multi-agent trajectories", "tailscope"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path;
    std::vector<std::string> inputs;
    std::optional<std::string> out_path;
    std::optional<std::string> topk;
    std::optional<std::string> rank_metric;
    std::optional<std::string> ks;
    std::optional<double> threshold;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> params_path;
    std::optional<std::string> stats_path;
    std::optional<std::string> mode;
    std::optional<double> neighbor_radius;
    std::optional<double> density_radius;
    std::optional<std::size_t> rank_k;
    std::optional<std::size_t> categories;
    std::optional<std::string> oracle_out;
    std::optional<std::string> kind;
    std::optional<std::string> scene_id;
    std::optional<double> speed, radius, decel, gap, angle, dt, heading, jitter;
    std::optional<std::size_t> frames, agents, brake_start;

    app.add_option("--config", config_path, "JSON config file (falls back to $TAILSCOPE_CONFIG)");
    app.add_option("--input", inputs, "Input file(s)");
    app.add_option("--out", out_path, "Output file (stdout when omitted)");
    app.add_option("--topk", topk, "Worst-case percents, comma separated");
    app.add_option("--rank-metric", rank_metric, "Worst-case ranking metric: min_ade|min_fde");
    app.add_option("--k", ks, "Mode counts, comma separated");
    app.add_option("--threshold", threshold, "Miss-rate threshold in metres");
    app.add_option("--seed", seed, "Seed for sampling and initialisation");
    app.add_option("--workers", workers, "Scene-level worker threads");
    app.add_option("--params", params_path, "Perceiver parameters JSON");
    app.add_option("--stats", stats_path, "Normalisation statistics JSON");
    app.add_option("--mode", mode, "Perceiver forward mode: mean|sample");
    app.add_option("--neighbor-radius", neighbor_radius, "Neighbour radius in metres");
    app.add_option("--density-radius", density_radius, "Density radius in metres");
    app.add_option("--rank-k", rank_k, "Mode count used to rank worst cases");
    app.add_option("--categories", categories, "Number of Tail Index categories");
    app.add_option("--oracle-out", oracle_out, "Oracle sidecar path for synth");
    app.add_option("--kind", kind, "Synthetic scenario kind");
    app.add_option("--scene-id", scene_id, "Synthetic scene id");
    app.add_option("--speed", speed, "m/s");
    app.add_option("--radius", radius, "m");
    app.add_option("--decel", decel, "m/s^2");
    app.add_option("--gap", gap, "m");
    app.add_option("--angle", angle, "rad");
    app.add_option("--heading", heading, "rad");
    app.add_option("--jitter", jitter, "m/s");
    app.add_option("--dt", dt, "s");
    app.add_option("--frames", frames, "frame count");
    app.add_option("--agents", agents, "grid agent count");
    app.add_option("--brake-start", brake_start, "frame where braking starts");

    auto* metrics = app.add_subcommand("metrics", "Fourteen tailness metrics per scene");
    auto* rank = app.add_subcommand("rank", "Tail Index ranking of scenes");
    auto* eval = app.add_subcommand("eval", "Forecast evaluation report");
    auto* synth = app.add_subcommand("synth", "Synthetic scene with oracle values");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "tailscope: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        RunConfig config;
        if (!config_path) {
            if (const char* env = std::getenv("TAILSCOPE_CONFIG"); env && *env) config_path = env;
        }
        if (config_path) {
            Json j;
            try {
                j = Json::parse(read_file(*config_path));
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigError("config '" + *config_path + "': " + e.what());
            }
            apply_config_json(config, j);
        }

        auto split = [](const std::string& text) {
            std::vector<std::string> parts;
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!item.empty()) parts.push_back(item);
            }
            return parts;
        };
        auto to_double = [](const std::string& s, const char* flag) {
            try {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                return v;
            } catch (const std::exception&) {
                throw UsageError(std::string(flag) + ": not a number '" + s + "'");
            }
        };

        if (!inputs.empty()) config.inputs = inputs;
        if (out_path) config.out = out_path;
        if (topk) {
            config.percents.clear();
            for (const auto& p : split(*topk)) config.percents.push_back(to_double(p, "--topk"));
        }
        if (rank_metric) config.rank_metric = parse_rank_metric(*rank_metric);
        if (ks) {
            config.ks.clear();
            for (const auto& k : split(*ks)) {
                const double v = to_double(k, "--k");
                if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
                    throw UsageError("--k: mode counts must be positive integers");
                }
                config.ks.push_back(static_cast<std::size_t>(v));
            }
        }
        if (threshold) config.threshold = *threshold;
        if (seed) {
            config.seed = *seed;
            config.synth.seed = *seed;
        }
        if (workers) config.workers = *workers;
        if (params_path) config.perceiver_path = params_path;
        if (stats_path) config.stats_path = stats_path;
        if (mode) config.mode = *mode;
        if (neighbor_radius) {
            config.neighbor_radius = *neighbor_radius;
            config.synth.neighbor_radius = *neighbor_radius;
        }
        if (density_radius) config.density_radius = *density_radius;
        if (rank_k) config.rank_k = *rank_k;
        if (categories) config.categories = *categories;
        if (oracle_out) config.oracle_out = oracle_out;
        auto& s = config.synth;
        if (kind) s.kind = parse_scenario_kind(*kind);
        if (scene_id) s.scene_id = *scene_id;
        if (speed) s.speed = *speed;
        if (radius) s.radius = *radius;
        if (decel) s.decel = *decel;
        if (gap) s.gap = *gap;
        if (angle) s.angle = *angle;
        if (heading) s.heading = *heading;
        if (jitter) s.jitter = *jitter;
        if (dt) s.dt = *dt;
        if (frames) s.frames = *frames;
        if (agents) s.agents = *agents;
        if (brake_start) s.brake_start = *brake_start;
        config.validate();

        if (metrics->parsed()) return cmd_metrics(config, out);
        if (rank->parsed()) return cmd_rank(config, out);
        if (eval->parsed()) return cmd_eval(config, out);
        if (synth->parsed()) return cmd_synth(config, out);
        err << "tailscope: no command given\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "tailscope: parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "tailscope: invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "tailscope: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "tailscope: config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "tailscope: malformed JSON: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "tailscope: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace tailscope::cli
