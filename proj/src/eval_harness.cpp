#include "tailscope/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "tailscope/errors.hpp"
#include "tailscope/kernels.hpp"

namespace tailscope {

void ForecastSample::validate() const {
    if (modes.empty()) throw ValidationError("sample " + sample_id + ": no forecast modes");
    if (probs.size() != modes.size()) {
        throw ValidationError("sample " + sample_id + ": " + std::to_string(probs.size()) +
                              " probabilities for " + std::to_string(modes.size()) + " modes");
    }
    if (gt.empty()) throw ValidationError("sample " + sample_id + ": empty ground truth");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw ValidationError("sample " + sample_id + ": negative or non-finite probability");
        }
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
        throw ValidationError("sample " + sample_id + ": probabilities sum to " +
                              std::to_string(total));
    }
    for (const auto& m : modes) {
        if (m.size() != gt.size()) {
            throw ValidationError("sample " + sample_id + ": mode length differs from ground truth");
        }
    }
}

double mode_ade(std::span<const Vec2> mode, std::span<const Vec2> gt) {
    return kernels::sum_point_distances(mode, gt) / static_cast<double>(gt.size());
}

std::vector<std::size_t> top_k_modes(const ForecastSample& sample, std::size_t k) {
    const std::size_t count = sample.modes.size();
    if (k == 0 || k > count) {
        throw UsageError("k = " + std::to_string(k) + " but sample " + sample.sample_id + " has " +
                         std::to_string(count) + " modes");
    }
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return sample.probs[a] > sample.probs[b]; });
    idx.resize(k);
    return idx;
}

double min_ade(const ForecastSample& sample, std::size_t k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m : top_k_modes(sample, k)) best = std::min(best, mode_ade(sample.modes[m], sample.gt));
    return best;
}

double min_fde(const ForecastSample& sample, std::size_t k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m : top_k_modes(sample, k)) best = std::min(best, norm(sample.modes[m].back() - sample.gt.back()));
    return best;
}

double miss_rate(std::span<const ForecastSample> samples, std::size_t k, double threshold) {
    if (samples.empty()) throw UsageError("miss rate of an empty sample set");
    std::size_t missed = 0;
    for (const auto& s : samples) {
        if (min_fde(s, k) > threshold) ++missed;
    }
    return static_cast<double>(missed) / static_cast<double>(samples.size());
}

RmseReport rmse(std::span<const ForecastSample> samples) {
    if (samples.empty()) throw UsageError("RMSE of an empty sample set");
    const std::size_t horizon = samples.front().gt.size();
    RmseReport out;
    std::vector<double> sq(horizon, 0.0);
    for (const auto& s : samples) {
        if (s.gt.size() != horizon) throw UsageError("RMSE needs a uniform forecast horizon");
        const auto& mode = s.modes[top_k_modes(s, 1).front()];
        for (std::size_t t = 0; t < horizon; ++t) sq[t] += squared_norm(mode[t] - s.gt[t]);
    }
    const auto n = static_cast<double>(samples.size());
    double pooled = 0.0;
    for (double v : sq) {
        out.per_horizon.push_back(std::sqrt(v / n));
        pooled += v;
    }
    out.overall = std::sqrt(pooled / (n * static_cast<double>(horizon)));
    return out;
}

std::string_view to_string(RankMetric metric) noexcept {
    return metric == RankMetric::min_ade ? "min_ade" : "min_fde";
}

RankMetric parse_rank_metric(std::string_view text) {
    if (text == "min_ade") return RankMetric::min_ade;
    if (text == "min_fde") return RankMetric::min_fde;
    throw UsageError("rank metric must be min_ade or min_fde, got '" + std::string(text) + "'");
}

std::size_t stratum_size(double percent, std::size_t n) {
    if (!(percent > 0.0 && percent <= 100.0)) {
        throw UsageError("worst-case percent must lie in (0, 100], got " + std::to_string(percent));
    }
    // guard against p * n / 100 landing a hair above an integer
    const double raw = percent * static_cast<double>(n) / 100.0;
    const double rounded = std::round(raw);
    const double size = std::fabs(raw - rounded) < 1e-9 ? rounded : std::ceil(raw);
    return std::min(n, static_cast<std::size_t>(size));
}

std::vector<WorstCaseStratum> worst_case_subsets(std::span<const SampleErrors> errors,
                                                 std::span<const double> percents,
                                                 RankMetric metric) {
    for (double p : percents) (void)stratum_size(p, errors.size());
    std::vector<std::size_t> order(errors.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto key = [&](std::size_t i) {
        return metric == RankMetric::min_ade ? errors[i].min_ade : errors[i].min_fde;
    };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (key(a) != key(b)) return key(a) > key(b);
        return errors[a].sample_id > errors[b].sample_id;
    });

    std::vector<WorstCaseStratum> out;
    for (double p : percents) {
        WorstCaseStratum s;
        s.percent = p;
        s.count = stratum_size(p, errors.size());
        double ade = 0.0;
        double fde = 0.0;
        for (std::size_t r = 0; r < s.count; ++r) {
            const auto& e = errors[order[r]];
            ade += e.min_ade;
            fde += e.min_fde;
            s.members.push_back(e.sample_id);
        }
        if (s.count > 0) {
            s.min_ade = ade / static_cast<double>(s.count);
            s.min_fde = fde / static_cast<double>(s.count);
        }
        out.push_back(std::move(s));
    }
    return out;
}

TaskLoss task_loss(const ForecastSample& sample, const LossWeights& weights) {
    sample.validate();
    TaskLoss out;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < sample.modes.size(); ++m) {
        const double ade = mode_ade(sample.modes[m], sample.gt);
        if (ade < best) {
            best = ade;
            out.k_star = m;
        }
    }
    const auto& mode = sample.modes[out.k_star];
    double mse = 0.0;
    for (std::size_t t = 0; t < sample.gt.size(); ++t) mse += squared_norm(mode[t] - sample.gt[t]);
    mse /= static_cast<double>(sample.gt.size());
    const double nll = -std::log(std::max(sample.probs[out.k_star], kProbFloor));
    out.loss = mse + weights.lambda_cls * nll;
    return out;
}

double total_loss(double task, double rank, double meta, const LossWeights& weights) {
    return task + weights.lambda_1 * rank + weights.lambda_2 * meta;
}

EvalReport evaluate(std::span<const ForecastSample> samples, const EvalOptions& options) {
    if (samples.empty()) throw UsageError("no forecast samples to evaluate");
    if (options.ks.empty()) throw UsageError("at least one k is required");
    EvalReport report;
    report.options = options;
    if (report.options.rank_k == 0) {
        report.options.rank_k = *std::max_element(options.ks.begin(), options.ks.end());
    }
    const std::size_t rank_k = report.options.rank_k;

    std::vector<std::size_t> ks = options.ks;
    if (std::find(ks.begin(), ks.end(), rank_k) == ks.end()) ks.push_back(rank_k);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    std::vector<SampleErrors> ranked;
    for (const auto& s : samples) {
        s.validate();
        PerSampleRow row{s.sample_id, {}, {}};
        for (std::size_t k : ks) {
            row.min_ade[k] = min_ade(s, k);
            row.min_fde[k] = min_fde(s, k);
        }
        ranked.push_back({s.sample_id, row.min_ade[rank_k], row.min_fde[rank_k]});
        report.per_sample.push_back(std::move(row));
    }
    const auto n = static_cast<double>(samples.size());
    for (std::size_t k : ks) {
        double ade = 0.0;
        double fde = 0.0;
        std::size_t missed = 0;
        for (const auto& row : report.per_sample) {
            ade += row.min_ade.at(k);
            fde += row.min_fde.at(k);
            if (row.min_fde.at(k) > options.miss_threshold) ++missed;
        }
        report.mean_min_ade[k] = ade / n;
        report.mean_min_fde[k] = fde / n;
        report.miss_rate[k] = static_cast<double>(missed) / n;
    }
    report.rmse = rmse(samples);
    report.worst_case = worst_case_subsets(ranked, options.percents, options.rank_metric);
    return report;
}

namespace {

std::vector<Vec2> parse_points(const nlohmann::json& j, std::size_t line, const char* what) {
    if (!j.is_array()) throw ParseError(line, std::string(what) + " must be an array of [x, y]");
    std::vector<Vec2> out;
    out.reserve(j.size());
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw ParseError(line, std::string(what) + " must be an array of [x, y]");
        }
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
}

}  // namespace

std::vector<ForecastSample> read_forecast_jsonl(std::string_view text) {
    std::vector<ForecastSample> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");
        for (const char* key : {"sample_id", "modes", "probs", "gt"}) {
            if (!j.contains(key)) throw ParseError(line_no, std::string("missing key '") + key + "'");
        }
        ForecastSample s;
        if (j["sample_id"].is_string()) {
            s.sample_id = j["sample_id"].get<std::string>();
        } else {
            throw ParseError(line_no, "sample_id must be a string");
        }
        if (!j["modes"].is_array()) throw ParseError(line_no, "modes must be an array");
        for (const auto& m : j["modes"]) s.modes.push_back(parse_points(m, line_no, "mode"));
        if (!j["probs"].is_array()) throw ParseError(line_no, "probs must be an array");
        for (const auto& p : j["probs"]) {
            if (!p.is_number()) throw ParseError(line_no, "probs must be numbers");
            s.probs.push_back(p.get<double>());
        }
        s.gt = parse_points(j["gt"], line_no, "gt");
        try {
            s.validate();
        } catch (const ValidationError& e) {
            throw ParseError(line_no, e.what());
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace tailscope
