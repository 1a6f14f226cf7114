#include "tailscope/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <set>

#include "tailscope/errors.hpp"

namespace tailscope {
namespace {

void write_number(std::string& out, double v) {
    if (!std::isfinite(v)) {
        out += "null";
        return;
    }
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

void write(std::string& out, const Json& j, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::null: out += "null"; break;
        case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
        case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
        case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
        case Json::value_t::number_float: write_number(out, j.get<double>()); break;
        case Json::value_t::string: out += j.dump(); break;
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                break;
            }
            // flat numeric arrays stay on one line
            const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
            out += '[';
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat || indent < 0 ? ", " : ",";
                if (!flat) newline(depth + 1);
                write(out, e, indent, depth + 1);
                first = false;
            }
            if (!flat) newline(depth);
            out += ']';
            break;
        }
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                break;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                newline(depth + 1);
                out += Json(it.key()).dump();
                out += ": ";
                write(out, it.value(), indent, depth + 1);
                first = false;
            }
            newline(depth);
            out += '}';
            break;
        }
        default: out += j.dump(); break;
    }
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const char* what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
    std::set<std::string> names(known.begin(), known.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!names.contains(it.key())) {
            throw ConfigError(std::string(what) + ": unknown key '" + it.key() + "'");
        }
    }
}

double number(const Json& j, const char* key, const char* what) {
    if (!j.contains(key)) throw ConfigError(std::string(what) + ": missing key '" + key + "'");
    if (!j.at(key).is_number()) {
        throw ConfigError(std::string(what) + ": '" + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

std::vector<double> vector_of(const Json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& e : j) {
        if (!e.is_number()) throw ConfigError(std::string(what) + " must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

Matrix matrix_of(const Json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be a nested array");
    Matrix m;
    m.rows = j.size();
    for (const auto& row : j) {
        auto values = vector_of(row, what);
        if (m.cols == 0) m.cols = values.size();
        if (values.size() != m.cols) throw ConfigError(std::string(what) + ": ragged rows");
        m.data.insert(m.data.end(), values.begin(), values.end());
    }
    return m;
}

Json matrix_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        const auto row = m.row(r);
        rows.push_back(Json(std::vector<double>(row.begin(), row.end())));
    }
    return rows;
}

GaussianLayer gaussian_layer_from_json(const Json& j) {
    reject_unknown(j, {"mu_W", "sigma_W", "mu_b", "sigma_b"}, "Gaussian layer");
    for (const char* key : {"mu_W", "sigma_W", "mu_b", "sigma_b"}) {
        if (!j.contains(key)) throw ConfigError(std::string("Gaussian layer: missing key '") + key + "'");
    }
    return {matrix_of(j.at("mu_W"), "mu_W"), matrix_of(j.at("sigma_W"), "sigma_W"),
            vector_of(j.at("mu_b"), "mu_b"), vector_of(j.at("sigma_b"), "sigma_b")};
}

Json to_json(const GaussianLayer& l) {
    return {{"mu_W", matrix_json(l.mu_w)}, {"sigma_W", matrix_json(l.sigma_w)},
            {"mu_b", l.mu_b}, {"sigma_b", l.sigma_b}};
}

BayesianMlp mlp_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(std::string(what) + " must be an array of two Gaussian layers");
    }
    return {gaussian_layer_from_json(j[0]), gaussian_layer_from_json(j[1])};
}

DenseLayer dense_from_json(const Json& j, const char* what) {
    reject_unknown(j, {"w", "b"}, what);
    if (!j.contains("w") || !j.contains("b")) throw ConfigError(std::string(what) + ": needs w and b");
    return {matrix_of(j.at("w"), what), vector_of(j.at("b"), what)};
}

Json to_json(const DenseLayer& l) { return {{"w", matrix_json(l.w)}, {"b", l.b}}; }

std::string percent_key(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "top%g", p);
    return buf;
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
    std::string out;
    write(out, value, indent, 0);
    out += '\n';
    return out;
}

RssParams rss_params_from_json(const Json& j, RssParams base) {
    reject_unknown(j, {"rho", "rho_ped", "a_max", "b_min", "b_max", "a_lat_max", "b_lat_min", "mu_lat",
                       "alpha_lon", "beta_lon", "alpha_lat", "beta_lat"},
                   "RSS parameters");
    auto take = [&](const char* key, double& field) {
        if (j.contains(key)) field = number(j, key, "RSS parameters");
    };
    take("rho", base.rho);
    take("rho_ped", base.rho_ped);
    take("a_max", base.a_max);
    take("b_min", base.b_min);
    take("b_max", base.b_max);
    take("a_lat_max", base.a_lat_max);
    take("b_lat_min", base.b_lat_min);
    take("mu_lat", base.mu_lat);
    take("alpha_lon", base.alpha_lon);
    take("beta_lon", base.beta_lon);
    take("alpha_lat", base.alpha_lat);
    take("beta_lat", base.beta_lat);
    base.validate();
    return base;
}

Json to_json(const RssParams& p) {
    return {{"rho", p.rho},           {"rho_ped", p.rho_ped},     {"a_max", p.a_max},
            {"b_min", p.b_min},       {"b_max", p.b_max},         {"a_lat_max", p.a_lat_max},
            {"b_lat_min", p.b_lat_min}, {"mu_lat", p.mu_lat},     {"alpha_lon", p.alpha_lon},
            {"beta_lon", p.beta_lon}, {"alpha_lat", p.alpha_lat}, {"beta_lat", p.beta_lat}};
}

PerceiverParams perceiver_from_json(const Json& j) {
    reject_unknown(j, {"path_i", "path_r", "w_o", "b_o", "lambda_temp", "fusion"}, "perceiver");
    for (const char* key : {"path_i", "path_r", "w_o", "b_o"}) {
        if (!j.contains(key)) throw ConfigError(std::string("perceiver: missing key '") + key + "'");
    }
    PerceiverParams p;
    p.path_i = mlp_from_json(j.at("path_i"), "path_i");
    p.path_r = mlp_from_json(j.at("path_r"), "path_r");
    p.w_o = vector_of(j.at("w_o"), "w_o");
    p.b_o = number(j, "b_o", "perceiver");
    if (j.contains("lambda_temp")) p.lambda_temp = number(j, "lambda_temp", "perceiver");
    if (j.contains("fusion")) {
        const auto f = j.at("fusion").get<std::string>();
        if (f == "higher_kl") {
            p.fusion = FusionSign::higher_kl;
        } else if (f == "lower_kl") {
            p.fusion = FusionSign::lower_kl;
        } else {
            throw ConfigError("perceiver: fusion must be higher_kl or lower_kl");
        }
    }
    p.validate();
    return p;
}

Json to_json(const PerceiverParams& p) {
    return {{"path_i", Json::array({to_json(p.path_i.hidden), to_json(p.path_i.output)})},
            {"path_r", Json::array({to_json(p.path_r.hidden), to_json(p.path_r.output)})},
            {"w_o", p.w_o},
            {"b_o", p.b_o},
            {"lambda_temp", p.lambda_temp},
            {"fusion", p.fusion == FusionSign::higher_kl ? "higher_kl" : "lower_kl"}};
}

PrototypeMemory memory_from_json(const Json& j) {
    reject_unknown(j, {"prototypes", "eta", "boundaries", "boundary_ties"}, "memory");
    if (!j.contains("prototypes")) throw ConfigError("memory: missing key 'prototypes'");
    PrototypeMemory m;
    m.prototypes = matrix_of(j.at("prototypes"), "prototypes");
    if (j.contains("eta")) m.eta = number(j, "eta", "memory");
    if (j.contains("boundaries")) m.boundaries = vector_of(j.at("boundaries"), "boundaries");
    if (j.contains("boundary_ties")) m.boundary_ties = j.at("boundary_ties").get<bool>();
    m.validate();
    return m;
}

Json to_json(const PrototypeMemory& m) {
    return {{"prototypes", matrix_json(m.prototypes)},
            {"eta", m.eta},
            {"boundaries", m.boundaries},
            {"boundary_ties", m.boundary_ties}};
}

CognitiveSetParams cognitive_set_from_json(const Json& j) {
    reject_unknown(j, {"tau", "rho_vig", "gamma_steep", "b_tail", "gate"}, "cognitive set");
    CognitiveSetParams p;
    if (j.contains("tau")) p.tau = number(j, "tau", "cognitive set");
    if (j.contains("rho_vig")) p.rho_vig = number(j, "rho_vig", "cognitive set");
    if (j.contains("gamma_steep")) p.gamma_steep = number(j, "gamma_steep", "cognitive set");
    if (!j.contains("gate")) throw ConfigError("cognitive set: missing key 'gate'");
    const auto& g = j.at("gate");
    reject_unknown(g, {"trunk", "allocation_head", "gate_head"}, "gate");
    if (g.contains("trunk")) {
        for (const auto& l : g.at("trunk")) p.gate.trunk.push_back(dense_from_json(l, "trunk layer"));
    }
    if (!g.contains("allocation_head") || !g.contains("gate_head")) {
        throw ConfigError("gate: needs allocation_head and gate_head");
    }
    p.gate.allocation_head = dense_from_json(g.at("allocation_head"), "allocation head");
    p.gate.gate_head = dense_from_json(g.at("gate_head"), "gate head");
    const std::size_t cats = p.gate.allocation_head.w.rows;
    p.b_tail = j.contains("b_tail") ? vector_of(j.at("b_tail"), "b_tail") : default_b_tail(cats);
    p.validate(cats);
    return p;
}

Json to_json(const CognitiveSetParams& p) {
    Json trunk = Json::array();
    for (const auto& l : p.gate.trunk) trunk.push_back(to_json(l));
    return {{"tau", p.tau},
            {"rho_vig", p.rho_vig},
            {"gamma_steep", p.gamma_steep},
            {"b_tail", p.b_tail},
            {"gate",
             {{"trunk", trunk},
              {"allocation_head", to_json(p.gate.allocation_head)},
              {"gate_head", to_json(p.gate.gate_head)}}}};
}

DatasetStats dataset_stats_from_json(const Json& j) {
    reject_unknown(j, {"location", "scale", "degenerate"}, "dataset stats");
    DatasetStats s;
    for (std::size_t m = 0; m < kMetricCount; ++m) {
        const std::string name(kMetricNames[m]);
        if (!j.contains("location") || !j.at("location").contains(name) || !j.contains("scale") ||
            !j.at("scale").contains(name)) {
            throw ConfigError("dataset stats: missing entry for " + name);
        }
        s.location[m] = j.at("location").at(name).get<double>();
        s.scale[m] = j.at("scale").at(name).get<double>();
        if (!(s.scale[m] > 0.0)) throw ConfigError("dataset stats: scale must be positive for " + name);
        if (j.contains("degenerate") && j.at("degenerate").contains(name)) {
            s.degenerate[m] = j.at("degenerate").at(name).get<bool>();
        }
    }
    return s;
}

Json to_json(const DatasetStats& s) {
    Json loc = Json::object();
    Json scale = Json::object();
    Json deg = Json::object();
    for (std::size_t m = 0; m < kMetricCount; ++m) {
        const std::string name(kMetricNames[m]);
        loc[name] = s.location[m];
        scale[name] = s.scale[m];
        deg[name] = s.degenerate[m];
    }
    return {{"location", loc}, {"scale", scale}, {"degenerate", deg}};
}

Json to_json(const SceneMetrics& m) {
    Json values = Json::object();
    const auto v = m.values();
    for (std::size_t i = 0; i < kMetricCount; ++i) values[std::string(kMetricNames[i])] = v[i];
    return {{"scene_id", m.scene_id},
            {"target_id", m.target_id},
            {"metrics", values},
            {"flags",
             {{"intrinsic_degenerate", m.intrinsic.degenerate},
              {"proximity", m.interactive.proximity}}}};
}

Json to_json(const EvalReport& r) {
    auto keyed = [](const std::map<std::size_t, double>& m) {
        Json o = Json::object();
        for (const auto& [k, v] : m) o[std::to_string(k)] = v;
        return o;
    };
    Json per_sample = Json::array();
    for (const auto& row : r.per_sample) {
        per_sample.push_back(
            {{"sample_id", row.sample_id}, {"min_ade", keyed(row.min_ade)}, {"min_fde", keyed(row.min_fde)}});
    }
    Json worst = Json::object();
    for (const auto& s : r.worst_case) {
        worst[percent_key(s.percent)] = {
            {"count", s.count}, {"min_ade", s.min_ade}, {"min_fde", s.min_fde}, {"members", s.members}};
    }
    return {{"per_sample", per_sample},
            {"aggregate",
             {{"min_ade", keyed(r.mean_min_ade)},
              {"min_fde", keyed(r.mean_min_fde)},
              {"miss_rate", keyed(r.miss_rate)},
              {"rmse", {{"per_horizon", r.rmse.per_horizon}, {"overall", r.rmse.overall}}}}},
            {"worst_case", worst},
            {"config_echo",
             {{"k", r.options.ks},
              {"threshold", r.options.miss_threshold},
              {"percents", r.options.percents},
              {"rank_metric", std::string(to_string(r.options.rank_metric))},
              {"rank_k", r.options.rank_k}}}};
}

Json oracle_to_json(const ScenarioSpec& spec, const OracleValues& oracle) {
    Json values = Json::object();
    for (const auto& [k, v] : oracle) values[k] = v;
    return {{"scene_id", spec.scene_id},
            {"kind", std::string(to_string(spec.kind))},
            {"seed", spec.seed},
            {"frames", spec.frames},
            {"dt", spec.dt},
            {"oracle", values}};
}

}  // namespace tailscope
