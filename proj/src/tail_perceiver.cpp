#include "tailscope/tail_perceiver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tailscope/errors.hpp"
#include "tailscope/kernels.hpp"
#include "tailscope/numeric.hpp"

namespace tailscope {
namespace {

// Linear-interpolated quantile of sorted data.
double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

constexpr double kDegenerateScale = 1e-12;

}  // namespace

DatasetStats DatasetStats::from_samples(std::span<const MetricVector> samples) {
    if (samples.size() < 2) throw UsageError("dataset statistics need at least 2 samples");
    DatasetStats stats;
    std::vector<double> column(samples.size());
    for (std::size_t m = 0; m < kMetricCount; ++m) {
        for (std::size_t i = 0; i < samples.size(); ++i) column[i] = samples[i][m];
        std::sort(column.begin(), column.end());
        stats.location[m] = quantile(column, 0.5);
        const double iqr = quantile(column, 0.75) - quantile(column, 0.25);
        if (iqr > kDegenerateScale) {
            stats.scale[m] = iqr;
        } else {
            stats.scale[m] = 1.0;
            stats.degenerate[m] = true;
        }
    }
    return stats;
}

NormalizedFeatures normalize_features(const MetricVector& metrics, const DatasetStats& stats) {
    NormalizedFeatures out;
    out.intrinsic.reserve(kIntrinsicCount);
    out.interactive.reserve(kInteractiveCount);
    for (std::size_t m = 0; m < kMetricCount; ++m) {
        const double z = std::clamp((metrics[m] - stats.location[m]) / stats.scale[m],
                                    -kFeatureClip, kFeatureClip);
        (m < kIntrinsicCount ? out.intrinsic : out.interactive).push_back(z);
    }
    return out;
}

void GaussianLayer::validate() const {
    if (mu_w.data.size() != mu_w.rows * mu_w.cols || sigma_w.rows != mu_w.rows ||
        sigma_w.cols != mu_w.cols || sigma_w.data.size() != mu_w.data.size() ||
        mu_b.size() != mu_w.rows || sigma_b.size() != mu_w.rows) {
        throw ConfigError("Gaussian layer: mu/sigma shapes disagree");
    }
    if (mu_w.rows == 0 || mu_w.cols == 0) throw ConfigError("Gaussian layer: empty");
    auto check = [](std::span<const double> xs) {
        for (double s : xs) {
            if (!(std::isfinite(s) && s > 0.0)) {
                throw ConfigError("Gaussian layer: sigma must be positive and finite");
            }
        }
    };
    check(sigma_w.data);
    check(sigma_b);
    for (double m : mu_w.data) {
        if (!std::isfinite(m)) throw ConfigError("Gaussian layer: non-finite mean");
    }
    for (double m : mu_b) {
        if (!std::isfinite(m)) throw ConfigError("Gaussian layer: non-finite mean");
    }
}

void BayesianMlp::validate() const {
    hidden.validate();
    output.validate();
    if (output.in() != hidden.out()) {
        throw ConfigError("Bayesian MLP: output layer expects " + std::to_string(output.in()) +
                          " inputs but hidden layer has " + std::to_string(hidden.out()));
    }
}

void PerceiverParams::validate() const {
    path_i.validate();
    path_r.validate();
    if (path_i.in() != kIntrinsicCount) throw ConfigError("intrinsic path must take 8 inputs");
    if (path_r.in() != kInteractiveCount) throw ConfigError("interactive path must take 6 inputs");
    if (path_i.latent() != path_r.latent()) throw ConfigError("paths disagree on latent size");
    if (w_o.size() != path_i.latent()) throw ConfigError("w_o length must match latent size");
    if (!std::isfinite(b_o) || !std::isfinite(lambda_temp)) throw ConfigError("non-finite b_o or lambda");
}

PerceiverParams PerceiverParams::initialize(std::uint64_t seed, std::size_t hidden,
                                            std::size_t latent) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma0 = softplus(-5.0);

    auto layer = [&](std::size_t in, std::size_t out) {
        GaussianLayer l;
        l.mu_w = Matrix(out, in);
        const double scale = std::sqrt(2.0 / static_cast<double>(in));
        for (double& w : l.mu_w.data) w = scale * normal(rng);
        l.sigma_w = Matrix(out, in, sigma0);
        l.mu_b.assign(out, 0.0);
        l.sigma_b.assign(out, sigma0);
        return l;
    };

    PerceiverParams p;
    p.path_i = {layer(kIntrinsicCount, hidden), layer(hidden, latent)};
    p.path_r = {layer(kInteractiveCount, hidden), layer(hidden, latent)};
    p.w_o.resize(latent);
    const double out_scale = 1.0 / std::sqrt(static_cast<double>(latent));
    for (double& w : p.w_o) w = out_scale * normal(rng);
    return p;
}

namespace {

struct DrawnLayer {
    std::vector<double> w;
    std::vector<double> b;
};

DrawnLayer draw(const GaussianLayer& layer, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto& k = kernels::active();
    DrawnLayer d;
    std::vector<double> eps(layer.mu_w.data.size());
    for (double& e : eps) e = normal(rng);
    d.w.resize(eps.size());
    k.affine(layer.mu_w.data.data(), layer.sigma_w.data.data(), eps.data(), d.w.data(), eps.size());

    eps.resize(layer.mu_b.size());
    for (double& e : eps) e = normal(rng);
    d.b.resize(eps.size());
    k.affine(layer.mu_b.data(), layer.sigma_b.data(), eps.data(), d.b.data(), eps.size());
    return d;
}

std::vector<double> dense(const double* w, const double* b, std::span<const double> x,
                          std::size_t out) {
    std::vector<double> y(out);
    kernels::active().matvec(w, x.data(), b, y.data(), out, x.size());
    return y;
}

}  // namespace

std::vector<double> bayes_forward(const BayesianMlp& mlp, std::span<const double> x,
                                  ForwardMode mode) {
    mlp.validate();
    if (x.size() != mlp.in()) {
        throw ConfigError("Bayesian MLP expects " + std::to_string(mlp.in()) + " inputs, got " +
                          std::to_string(x.size()));
    }
    std::vector<double> h;
    std::vector<double> z;
    if (mode.kind == ForwardMode::Kind::mean) {
        h = dense(mlp.hidden.mu_w.data.data(), mlp.hidden.mu_b.data(), x, mlp.hidden.out());
        for (double& v : h) v = std::max(v, 0.0);
        z = dense(mlp.output.mu_w.data.data(), mlp.output.mu_b.data(), h, mlp.output.out());
    } else {
        std::mt19937_64 rng(mode.seed);
        const auto l1 = draw(mlp.hidden, rng);
        const auto l2 = draw(mlp.output, rng);
        h = dense(l1.w.data(), l1.b.data(), x, mlp.hidden.out());
        for (double& v : h) v = std::max(v, 0.0);
        z = dense(l2.w.data(), l2.b.data(), h, mlp.output.out());
    }
    return z;
}

double kl_diag_gaussian(const GaussianLayer& layer) {
    layer.validate();
    auto term = [](double mu, double sigma) {
        const double var = sigma * sigma;
        return 0.5 * (mu * mu + var - 1.0 - std::log(var));
    };
    double kl = 0.0;
    for (std::size_t i = 0; i < layer.mu_w.data.size(); ++i) {
        kl += term(layer.mu_w.data[i], layer.sigma_w.data[i]);
    }
    for (std::size_t i = 0; i < layer.mu_b.size(); ++i) kl += term(layer.mu_b[i], layer.sigma_b[i]);
    return kl;
}

double kl_diag_gaussian(const BayesianMlp& mlp) {
    return kl_diag_gaussian(mlp.hidden) + kl_diag_gaussian(mlp.output);
}

FusionWeights fusion_weights(double kl_i, double kl_r, double lambda_temp, FusionSign sign) {
    const double s = sign == FusionSign::higher_kl ? lambda_temp : -lambda_temp;
    const double li = s * kl_i;
    const double lr = s * kl_r;
    const double top = std::max(li, lr);
    const double ei = std::exp(li - top);
    const double er = std::exp(lr - top);
    const double alpha_i = ei / (ei + er);
    return {alpha_i, er / (ei + er)};
}

double tail_index(std::span<const double> z_i, std::span<const double> z_r, FusionWeights alpha,
                  std::span<const double> w_o, double b_o) {
    if (z_i.size() != w_o.size() || z_r.size() != w_o.size()) {
        throw ConfigError("tail index: latent sizes do not match w_o");
    }
    std::vector<double> fused(w_o.size());
    for (std::size_t k = 0; k < fused.size(); ++k) {
        fused[k] = alpha.alpha_i * z_i[k] + alpha.alpha_r * z_r[k];
    }
    return softplus(kernels::dot(w_o, fused) + b_o);
}

TailIndexResult perceive(const PerceiverParams& params, const NormalizedFeatures& features,
                         ForwardMode mode) {
    params.validate();
    TailIndexResult r;
    ForwardMode mode_r = mode;
    if (mode.kind == ForwardMode::Kind::sample) {
        std::seed_seq seq{static_cast<std::uint32_t>(mode.seed),
                          static_cast<std::uint32_t>(mode.seed >> 32), 0x72u};
        std::uint64_t derived = 0;
        std::uint32_t words[2];
        seq.generate(words, words + 2);
        derived = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
        mode_r.seed = derived;
    }
    r.z_i = bayes_forward(params.path_i, features.intrinsic, mode);
    r.z_r = bayes_forward(params.path_r, features.interactive, mode_r);
    r.kl_i = kl_diag_gaussian(params.path_i);
    r.kl_r = kl_diag_gaussian(params.path_r);
    r.alpha = fusion_weights(r.kl_i, r.kl_r, params.lambda_temp, params.fusion);
    r.ti = tail_index(r.z_i, r.z_r, r.alpha, params.w_o, params.b_o);
    return r;
}

double rank_supervision_loss(std::span<const double> tis, std::span<const double> ades) {
    if (tis.size() != ades.size()) {
        throw UsageError("rank loss: " + std::to_string(tis.size()) + " tail indices vs " +
                         std::to_string(ades.size()) + " errors");
    }
    if (tis.empty()) throw UsageError("rank loss: empty batch");
    std::vector<double> a(tis.begin(), tis.end());
    std::vector<double> b(ades.begin(), ades.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

}  // namespace tailscope
