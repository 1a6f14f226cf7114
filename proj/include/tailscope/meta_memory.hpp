#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tailscope/matrix.hpp"

namespace tailscope {

// C x D bank of category prototypes, categories ordered by Tail Index.
struct PrototypeMemory {
    Matrix prototypes;
    double eta{0.9};                // momentum
    std::vector<double> boundaries;  // C - 1 TI cut points
    bool boundary_ties{false};       // equal TIs straddled a cut point

    [[nodiscard]] std::size_t categories() const noexcept { return prototypes.rows; }
    [[nodiscard]] std::size_t dim() const noexcept { return prototypes.cols; }

    // Throws ConfigError: eta outside [0, 1], non-finite rows, or
    // boundaries not ascending (strictly, unless boundary_ties is set).
    void validate() const;
};

struct Partition {
    std::vector<std::size_t> category;  // per input sample
    std::vector<double> boundaries;     // midpoint between neighbouring bins
    bool ties{false};
};

// Equal-mass TI percentile bins: the sample at sorted rank r goes to
// floor(r * C / n). Equal TIs keep input order. Throws UsageError if C > n.
[[nodiscard]] Partition partition_categories(std::span<const double> tis, std::size_t categories);

// Stores a partition's cut points in the memory.
void record_boundaries(PrototypeMemory& memory, const Partition& partition);

// One sample of an adaptation batch; h = [F_m, F_i, F_r, TI].
struct AdaptationSample {
    std::vector<double> f_m;
    std::vector<double> f_i;
    std::vector<double> f_r;
    double ti{0.0};

    [[nodiscard]] std::vector<double> h() const;
};

// Throws ConfigError when samples disagree on any dimension.
void validate_batch(std::span<const AdaptationSample> batch);

// M_c <- eta M_c + (1 - eta) sum softmax(TI)_f f over the samples of each
// category. Categories without samples are untouched.
[[nodiscard]] PrototypeMemory update_prototypes(const PrototypeMemory& memory,
                                                std::span<const AdaptationSample> batch,
                                                std::span<const std::size_t> categories);

struct DenseLayer {
    Matrix w;
    std::vector<double> b;
};

// phi_M: ReLU trunk (possibly empty) feeding an allocation head with C
// outputs and a scalar gate head.
struct GateMlp {
    std::vector<DenseLayer> trunk;
    DenseLayer allocation_head;
    DenseLayer gate_head;

    [[nodiscard]] std::size_t input_dim() const noexcept;
    void validate() const;
};

struct CognitiveSetParams {
    double tau{10.0};         // similarity temperature
    double rho_vig{0.5};      // vigilance threshold
    double gamma_steep{10.0};  // sigmoid steepness
    std::vector<double> b_tail;
    GateMlp gate;

    void validate(std::size_t categories) const;
};

// (1, 2, ..., C) / sum: leans toward the highest-TI categories.
[[nodiscard]] std::vector<double> default_b_tail(std::size_t categories);

// Zero-weight gate with one hidden layer of `hidden` units.
[[nodiscard]] GateMlp zero_gate(std::size_t input_dim, std::size_t hidden, std::size_t categories);

[[nodiscard]] std::vector<double> softmax(std::span<const double> logits);

struct GateOutputs {
    std::vector<double> allocation_logits;
    double gate_logit{0.0};
};

[[nodiscard]] GateOutputs gate_forward(const GateMlp& gate, std::span<const double> h);

// g = softmax(phi_M(h)).
[[nodiscard]] std::vector<double> allocation(std::span<const double> h,
                                             const CognitiveSetParams& params);

inline constexpr double kMinNorm = 1e-12;

struct SimilarityResult {
    std::vector<double> s;
    bool zero_norm{false};
};

// s_k = tau cos(F_m, M_k); zero-norm inputs give s_k = 0 and set the flag.
[[nodiscard]] SimilarityResult similarity(std::span<const double> f_m, const Matrix& prototypes,
                                          double tau);

// sigma(gamma (max s - rho)).
[[nodiscard]] double vigilance(std::span<const double> s, const CognitiveSetParams& params);

// g' = lambda g + (1 - lambda) b_tail.
[[nodiscard]] std::vector<double> vigilance_adjust(std::span<const double> g,
                                                   std::span<const double> s,
                                                   const CognitiveSetParams& params);

// -(1/B) sum_i log sigma(sum_k (2 g'_ik - 1) s_ik). Rows are samples.
[[nodiscard]] double proto_loss(const Matrix& g_adjusted, const Matrix& s);

// Rows of f_m are the batch's F_m vectors.
[[nodiscard]] double proto_loss_at(const Matrix& prototypes, const Matrix& f_m,
                                   const Matrix& g_adjusted, double tau);

struct ProtoGradient {
    Matrix grad;
    bool zero_norm{false};  // some prototype or feature row had ~0 norm
};

// Analytic dL/dM holding g' fixed.
[[nodiscard]] ProtoGradient proto_loss_gradient(const Matrix& prototypes, const Matrix& f_m,
                                                const Matrix& g_adjusted, double tau);

struct InnerUpdateResult {
    Matrix prototypes;
    bool zero_norm{false};
};

// M' = M - alpha_lr dL/dM. Does not modify `memory`.
[[nodiscard]] InnerUpdateResult inner_update(const PrototypeMemory& memory, const Matrix& f_m,
                                             const Matrix& g_adjusted, double tau, double alpha_lr);

struct Adaptation {
    Matrix g_adjusted;  // per-sample g'
    Matrix similarity;  // per-sample s
    double loss{0.0};
    InnerUpdateResult update;
};

// Allocation, similarity and vigilance for every sample, then one inner step.
[[nodiscard]] Adaptation adapt(const PrototypeMemory& memory,
                               std::span<const AdaptationSample> batch,
                               const CognitiveSetParams& params, double alpha_lr);

// F_v = F_m + sigmoid(gate(h)) sum_k g'_k M'_k.
[[nodiscard]] std::vector<double> augment(std::span<const double> f_m, std::span<const double> h,
                                          std::span<const double> g_adjusted,
                                          const Matrix& prototypes,
                                          const CognitiveSetParams& params);

}  // namespace tailscope
