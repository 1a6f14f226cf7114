#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tailscope/matrix.hpp"
#include "tailscope/scene_metrics.hpp"

namespace tailscope {

// Robust per-metric location (median) and scale (IQR) of a reference corpus.
struct DatasetStats {
    MetricVector location{};
    MetricVector scale{};
    std::array<bool, kMetricCount> degenerate{};  // IQR vanished; scale set to 1

    // Needs at least two samples.
    [[nodiscard]] static DatasetStats from_samples(std::span<const MetricVector> samples);
};

inline constexpr double kFeatureClip = 10.0;

struct NormalizedFeatures {
    std::vector<double> intrinsic;    // F_i, 8 values
    std::vector<double> interactive;  // F_r, 6 values
};

// (x - median) / IQR per metric, clipped to [-10, 10].
[[nodiscard]] NormalizedFeatures normalize_features(const MetricVector& metrics,
                                                    const DatasetStats& stats);

// Diagonal-Gaussian posterior over one dense layer's weights and biases.
struct GaussianLayer {
    Matrix mu_w;
    Matrix sigma_w;
    std::vector<double> mu_b;
    std::vector<double> sigma_b;

    [[nodiscard]] std::size_t in() const noexcept { return mu_w.cols; }
    [[nodiscard]] std::size_t out() const noexcept { return mu_w.rows; }
    // Throws ConfigError on shape mismatch or non-positive sigma.
    void validate() const;
};

// Two Gaussian layers with a ReLU between them.
struct BayesianMlp {
    GaussianLayer hidden;
    GaussianLayer output;

    [[nodiscard]] std::size_t in() const noexcept { return hidden.in(); }
    [[nodiscard]] std::size_t latent() const noexcept { return output.out(); }
    void validate() const;
};

// Which path the fusion softmax favours: the higher-KL path (as written) or
// the lower-KL one (softmax over -lambda * KL).
enum class FusionSign { higher_kl, lower_kl };

struct PerceiverParams {
    BayesianMlp path_i;  // intrinsic features
    BayesianMlp path_r;  // interactive features
    std::vector<double> w_o;
    double b_o{0.0};
    double lambda_temp{1.0};
    FusionSign fusion{FusionSign::higher_kl};

    void validate() const;

    // Seeded He-scaled means, sigma = softplus(-5), zero biases.
    [[nodiscard]] static PerceiverParams initialize(std::uint64_t seed, std::size_t hidden = 128,
                                                    std::size_t latent = 64);
};

struct ForwardMode {
    enum class Kind { mean, sample };
    Kind kind{Kind::mean};
    std::uint64_t seed{0};

    [[nodiscard]] static ForwardMode mean() { return {}; }
    [[nodiscard]] static ForwardMode sample(std::uint64_t seed) { return {Kind::sample, seed}; }
};

// z = W2 relu(W1 x + b1) + b2 with parameters at their means or drawn as
// mu + sigma * eps from a generator seeded by mode.seed.
[[nodiscard]] std::vector<double> bayes_forward(const BayesianMlp& mlp, std::span<const double> x,
                                                ForwardMode mode);

// KL(q || N(0, 1)) summed over every parameter.
[[nodiscard]] double kl_diag_gaussian(const GaussianLayer& layer);
[[nodiscard]] double kl_diag_gaussian(const BayesianMlp& mlp);

struct FusionWeights {
    double alpha_i{0.5};
    double alpha_r{0.5};
};

[[nodiscard]] FusionWeights fusion_weights(double kl_i, double kl_r, double lambda_temp,
                                           FusionSign sign = FusionSign::higher_kl);

// softplus(w_o . (alpha_i z_i + alpha_r z_r) + b_o)
[[nodiscard]] double tail_index(std::span<const double> z_i, std::span<const double> z_r,
                                FusionWeights alpha, std::span<const double> w_o, double b_o);

struct TailIndexResult {
    double ti{0.0};
    std::vector<double> z_i;
    std::vector<double> z_r;
    FusionWeights alpha;
    double kl_i{0.0};
    double kl_r{0.0};
};

// Full dual-path evaluation. In sample mode the interactive path draws from
// a stream seeded independently of the intrinsic one.
[[nodiscard]] TailIndexResult perceive(const PerceiverParams& params,
                                       const NormalizedFeatures& features, ForwardMode mode);

// Mean absolute difference of the two sorted sequences (1-Wasserstein).
[[nodiscard]] double rank_supervision_loss(std::span<const double> tis, std::span<const double> ades);

}  // namespace tailscope
