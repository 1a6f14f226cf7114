#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>

#include "tailscope/errors.hpp"
#include "tailscope/trajectory.hpp"

namespace tailscope {
namespace {

constexpr std::array<std::string_view, 10> kColumns = {
    "scene_id", "agent_id", "frame", "t", "x", "y", "vx", "vy", "heading", "kind"};

enum Col { kScene, kAgent, kFrame, kT, kX, kY, kVx, kVy, kHeading, kKind, kTarget, kColCount };

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_double(std::string_view s, std::size_t line, std::string_view column) {
    double value = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (s.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(line, "column '" + std::string(column) + "': not a number '" +
                                   std::string(s) + "'");
    }
    return value;
}

long long parse_int(std::string_view s, std::size_t line, std::string_view column) {
    long long value = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (s.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(line, "column '" + std::string(column) + "': not an integer '" +
                                   std::string(s) + "'");
    }
    return value;
}

struct Row {
    long long frame;
    std::size_t line;
    AgentState state;
    bool target;
};

using AgentRows = std::map<std::string, std::vector<Row>, IdLess>;

// Most frequent gap, bucketed at the time tolerance; ties go to the smaller gap.
double modal_gap(const AgentRows& agents) {
    std::map<long long, std::size_t> counts;
    for (const auto& [id, rows] : agents) {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double gap = rows[i].state.t - rows[i - 1].state.t;
            ++counts[std::llround(gap / kTimeTolerance)];
        }
    }
    if (counts.empty()) return 0.0;
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return static_cast<double>(best->first) * kTimeTolerance;
}

}  // namespace

std::vector<Scene> parse_scene_csv(std::string_view text, const SceneCsvOptions& options) {
    std::array<int, kColCount> index{};
    index.fill(-1);
    std::map<std::string, AgentRows, IdLess> scenes;

    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t field_count = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);

        const auto fields = split_fields(line);
        if (!have_header) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                for (std::size_t c = 0; c < kColumns.size(); ++c) {
                    if (fields[i] == kColumns[c]) index[c] = static_cast<int>(i);
                }
                if (fields[i] == "target") index[kTarget] = static_cast<int>(i);
            }
            for (std::size_t c = 0; c < kColumns.size(); ++c) {
                if (index[c] < 0) {
                    throw ParseError(line_no, "header is missing column '" +
                                                  std::string(kColumns[c]) + "'");
                }
            }
            field_count = fields.size();
            have_header = true;
            continue;
        }
        if (fields.size() != field_count) {
            throw ParseError(line_no, "expected " + std::to_string(field_count) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        auto field = [&](Col c) { return fields[static_cast<std::size_t>(index[c])]; };

        Row row{};
        row.line = line_no;
        row.frame = parse_int(field(kFrame), line_no, "frame");
        row.state.t = parse_double(field(kT), line_no, "t");
        row.state.p = {parse_double(field(kX), line_no, "x"), parse_double(field(kY), line_no, "y")};
        row.state.v = {parse_double(field(kVx), line_no, "vx"),
                       parse_double(field(kVy), line_no, "vy")};
        row.state.heading = parse_double(field(kHeading), line_no, "heading");
        try {
            row.state.kind = parse_agent_kind(field(kKind));
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (index[kTarget] >= 0) {
            const auto flag = field(kTarget);
            if (flag != "0" && flag != "1" && !flag.empty()) {
                throw ParseError(line_no, "column 'target' must be 0 or 1");
            }
            row.target = flag == "1";
        }
        const auto scene_id = field(kScene);
        const auto agent_id = field(kAgent);
        if (scene_id.empty() || agent_id.empty()) {
            throw ParseError(line_no, "empty scene_id or agent_id");
        }
        scenes[std::string(scene_id)][std::string(agent_id)].push_back(row);
    }
    if (!have_header) throw ParseError(1, "missing header");

    std::vector<Scene> out;
    out.reserve(scenes.size());
    for (auto& [scene_id, agents] : scenes) {
        for (auto& [agent_id, rows] : agents) {
            std::stable_sort(rows.begin(), rows.end(),
                             [](const Row& a, const Row& b) { return a.frame < b.frame; });
            for (std::size_t i = 1; i < rows.size(); ++i) {
                if (rows[i].frame == rows[i - 1].frame) {
                    throw ValidationError("scene " + scene_id + " agent " + agent_id +
                                          ": duplicate frame " + std::to_string(rows[i].frame) +
                                          " (line " + std::to_string(rows[i].line) + ")");
                }
                if (rows[i].state.kind != rows[0].state.kind) {
                    throw ValidationError("scene " + scene_id + " agent " + agent_id +
                                          ": kind changes at frame " +
                                          std::to_string(rows[i].frame));
                }
            }
        }

        const double dt = modal_gap(agents);
        std::optional<std::string> flagged_target;
        Scene::AgentMap trajectories;
        for (auto& [agent_id, rows] : agents) {
            for (std::size_t i = 1; i < rows.size(); ++i) {
                const double gap = rows[i].state.t - rows[i - 1].state.t;
                if (std::fabs(gap - dt) > kTimeTolerance) {
                    throw ValidationError("scene " + scene_id + " agent " + agent_id +
                                          ": non-uniform time step at frame " +
                                          std::to_string(rows[i].frame) + " (gap " +
                                          std::to_string(gap) + ", expected " +
                                          std::to_string(dt) + ")");
                }
            }
            bool is_target = false;
            std::vector<AgentState> states;
            states.reserve(rows.size());
            for (const auto& r : rows) {
                states.push_back(r.state);
                is_target = is_target || r.target;
            }
            if (is_target) {
                if (flagged_target) {
                    throw ValidationError("scene " + scene_id + ": more than one target agent");
                }
                flagged_target = agent_id;
            }
            trajectories.emplace(agent_id, Trajectory(agent_id, std::move(states), dt));
        }
        if (index[kTarget] >= 0 && !flagged_target) {
            throw ValidationError("scene " + scene_id + ": no agent flagged as target");
        }
        std::string target = flagged_target.value_or(trajectories.begin()->first);
        out.emplace_back(scene_id, std::move(trajectories), std::move(target),
                         options.neighbor_radius);
    }
    return out;
}

namespace {

void append_number(std::string& out, double value) {
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
    out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

std::string write_scene_csv(const std::vector<Scene>& scenes) {
    std::string out = "scene_id,agent_id,frame,t,x,y,vx,vy,heading,kind,target\n";
    for (const auto& scene : scenes) {
        for (const auto& [id, traj] : scene.agents()) {
            for (std::size_t k = 0; k < traj.size(); ++k) {
                const auto& s = traj[k];
                out += scene.scene_id();
                out += ',';
                out += id;
                out += ',';
                out += std::to_string(k);
                for (double v : {s.t, s.p.x, s.p.y, s.v.x, s.v.y, s.heading}) {
                    out += ',';
                    append_number(out, v);
                }
                out += ',';
                out += to_string(s.kind);
                out += id == scene.target_id() ? ",1\n" : ",0\n";
            }
        }
    }
    return out;
}

}  // namespace tailscope
