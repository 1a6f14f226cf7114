#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tailscope/numeric.hpp"

namespace tailscope {

// K forecast modes of T_f positions with their probabilities.
struct ForecastSample {
    std::string sample_id;
    std::vector<std::vector<Vec2>> modes;
    std::vector<double> probs;
    std::vector<Vec2> gt;

    // Throws ValidationError: probabilities negative or not summing to 1
    // within 1e-9, mode lengths differing from gt, empty modes.
    void validate() const;
};

struct LossWeights {
    double lambda_cls{1.0};
    double lambda_1{1.0};
    double lambda_2{1.0};
};

inline constexpr double kDefaultMissThreshold = 2.0;
inline constexpr double kProbFloor = 1e-12;

// Average displacement error of one mode.
[[nodiscard]] double mode_ade(std::span<const Vec2> mode, std::span<const Vec2> gt);

// Indices of the k most probable modes (ties by index). Throws UsageError if k > K or k == 0.
[[nodiscard]] std::vector<std::size_t> top_k_modes(const ForecastSample& sample, std::size_t k);

[[nodiscard]] double min_ade(const ForecastSample& sample, std::size_t k);
[[nodiscard]] double min_fde(const ForecastSample& sample, std::size_t k);

// Fraction of samples whose best final error over k modes is strictly above threshold.
[[nodiscard]] double miss_rate(std::span<const ForecastSample> samples, std::size_t k,
                               double threshold = kDefaultMissThreshold);

struct RmseReport {
    std::vector<double> per_horizon;
    double overall{0.0};
};

// Uses each sample's most probable mode.
[[nodiscard]] RmseReport rmse(std::span<const ForecastSample> samples);

enum class RankMetric { min_ade, min_fde };

[[nodiscard]] std::string_view to_string(RankMetric metric) noexcept;
// Throws UsageError for anything but "min_ade" / "min_fde".
[[nodiscard]] RankMetric parse_rank_metric(std::string_view text);

struct SampleErrors {
    std::string sample_id;
    double min_ade{0.0};
    double min_fde{0.0};
};

struct WorstCaseStratum {
    double percent{0.0};
    std::size_t count{0};
    double min_ade{0.0};  // mean over the stratum
    double min_fde{0.0};
    std::vector<std::string> members;  // worst first
};

// Stratum size ceil(p n / 100).
[[nodiscard]] std::size_t stratum_size(double percent, std::size_t n);

// Per percent, the largest-error samples under `metric`; ties go to the
// lexicographically larger sample_id. Throws UsageError for p outside (0, 100].
[[nodiscard]] std::vector<WorstCaseStratum> worst_case_subsets(std::span<const SampleErrors> errors,
                                                               std::span<const double> percents,
                                                               RankMetric metric);

struct TaskLoss {
    double loss{0.0};
    std::size_t k_star{0};
};

// Best-ADE mode k*: MSE(mode, gt) + lambda_cls (-log max(p_k*, 1e-12)), with
// MSE the mean over steps of the squared displacement.
[[nodiscard]] TaskLoss task_loss(const ForecastSample& sample, const LossWeights& weights);

[[nodiscard]] double total_loss(double task, double rank, double meta, const LossWeights& weights);

struct EvalOptions {
    std::vector<std::size_t> ks{5};
    double miss_threshold{kDefaultMissThreshold};
    std::vector<double> percents{1, 2, 3, 4, 5};
    RankMetric rank_metric{RankMetric::min_ade};
    // k used for worst-case ranking; largest of ks when 0.
    std::size_t rank_k{0};
};

struct PerSampleRow {
    std::string sample_id;
    std::map<std::size_t, double> min_ade;  // keyed by k
    std::map<std::size_t, double> min_fde;
};

struct EvalReport {
    std::vector<PerSampleRow> per_sample;
    std::map<std::size_t, double> mean_min_ade;
    std::map<std::size_t, double> mean_min_fde;
    std::map<std::size_t, double> miss_rate;
    RmseReport rmse;
    std::vector<WorstCaseStratum> worst_case;
    EvalOptions options;
};

// All metrics for a forecast set. Throws UsageError for an empty set.
[[nodiscard]] EvalReport evaluate(std::span<const ForecastSample> samples, const EvalOptions& options);

// One JSON object per line. Throws ParseError with the line number.
[[nodiscard]] std::vector<ForecastSample> read_forecast_jsonl(std::string_view text);

}  // namespace tailscope
