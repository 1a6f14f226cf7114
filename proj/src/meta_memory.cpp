#include "tailscope/meta_memory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tailscope/errors.hpp"
#include "tailscope/kernels.hpp"
#include "tailscope/numeric.hpp"

namespace tailscope {

void PrototypeMemory::validate() const {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("memory momentum eta must lie in [0, 1]");
    if (prototypes.rows == 0 || prototypes.cols == 0 ||
        prototypes.data.size() != prototypes.rows * prototypes.cols) {
        throw ConfigError("memory prototypes must be a non-empty C x D matrix");
    }
    for (double v : prototypes.data) {
        if (!std::isfinite(v)) throw ConfigError("memory prototypes must be finite");
    }
    if (!boundaries.empty() && boundaries.size() + 1 != prototypes.rows) {
        throw ConfigError("memory needs C - 1 boundaries");
    }
    for (std::size_t i = 1; i < boundaries.size(); ++i) {
        const bool ok = boundary_ties ? boundaries[i] >= boundaries[i - 1]
                                      : boundaries[i] > boundaries[i - 1];
        if (!ok) throw ConfigError("memory boundaries must be ascending");
    }
}

Partition partition_categories(std::span<const double> tis, std::size_t categories) {
    const std::size_t n = tis.size();
    if (categories == 0) throw UsageError("partition needs at least one category");
    if (categories > n) {
        throw UsageError("cannot split " + std::to_string(n) + " samples into " +
                         std::to_string(categories) + " categories");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return tis[a] < tis[b]; });

    Partition p;
    p.category.resize(n);
    for (std::size_t r = 0; r < n; ++r) p.category[order[r]] = r * categories / n;

    for (std::size_t c = 1; c < categories; ++c) {
        // first sorted rank belonging to bin c
        const std::size_t start = (c * n + categories - 1) / categories;
        const double below = tis[order[start - 1]];
        const double above = tis[order[start]];
        p.ties = p.ties || below == above;
        p.boundaries.push_back(0.5 * (below + above));
    }
    return p;
}

void record_boundaries(PrototypeMemory& memory, const Partition& partition) {
    if (partition.boundaries.size() + 1 != memory.categories()) {
        throw UsageError("partition category count does not match the memory");
    }
    memory.boundaries = partition.boundaries;
    memory.boundary_ties = partition.ties;
}

std::vector<double> AdaptationSample::h() const {
    std::vector<double> out;
    out.reserve(f_m.size() + f_i.size() + f_r.size() + 1);
    out.insert(out.end(), f_m.begin(), f_m.end());
    out.insert(out.end(), f_i.begin(), f_i.end());
    out.insert(out.end(), f_r.begin(), f_r.end());
    out.push_back(ti);
    return out;
}

void validate_batch(std::span<const AdaptationSample> batch) {
    if (batch.empty()) return;
    const auto& first = batch.front();
    for (const auto& s : batch) {
        if (s.f_m.size() != first.f_m.size() || s.f_i.size() != first.f_i.size() ||
            s.f_r.size() != first.f_r.size()) {
            throw ConfigError("adaptation batch: inconsistent feature dimensions");
        }
    }
}

PrototypeMemory update_prototypes(const PrototypeMemory& memory,
                                  std::span<const AdaptationSample> batch,
                                  std::span<const std::size_t> categories) {
    memory.validate();
    validate_batch(batch);
    if (categories.size() != batch.size()) {
        throw UsageError("update_prototypes: one category per sample required");
    }
    PrototypeMemory next = memory;
    const std::size_t dim = memory.dim();
    for (std::size_t c = 0; c < memory.categories(); ++c) {
        double top = -INFINITY;
        bool any = false;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (categories[i] != c) continue;
            if (batch[i].f_m.size() != dim) throw ConfigError("feature size does not match memory");
            top = std::max(top, batch[i].ti);
            any = true;
        }
        if (!any) continue;
        std::vector<double> mix(dim, 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (categories[i] != c) continue;
            const double w = std::exp(batch[i].ti - top);
            total += w;
            for (std::size_t d = 0; d < dim; ++d) mix[d] += w * batch[i].f_m[d];
        }
        auto row = next.prototypes.row(c);
        for (std::size_t d = 0; d < dim; ++d) {
            row[d] = memory.eta * row[d] + (1.0 - memory.eta) * (mix[d] / total);
        }
    }
    return next;
}

std::size_t GateMlp::input_dim() const noexcept {
    return trunk.empty() ? allocation_head.w.cols : trunk.front().w.cols;
}

void GateMlp::validate() const {
    std::size_t width = input_dim();
    auto check = [&](const DenseLayer& l, const char* what) {
        if (l.w.cols != width || l.b.size() != l.w.rows || l.w.data.size() != l.w.rows * l.w.cols) {
            throw ConfigError(std::string("gate MLP: ") + what + " shape mismatch");
        }
    };
    for (const auto& l : trunk) {
        check(l, "trunk layer");
        width = l.w.rows;
    }
    check(allocation_head, "allocation head");
    check(gate_head, "gate head");
    if (gate_head.w.rows != 1) throw ConfigError("gate MLP: gate head must have one output");
    if (allocation_head.w.rows == 0) throw ConfigError("gate MLP: allocation head is empty");
}

void CognitiveSetParams::validate(std::size_t categories) const {
    if (!(tau > 0.0 && std::isfinite(tau))) throw ConfigError("cognitive set: tau must be positive");
    if (!(gamma_steep > 0.0 && std::isfinite(gamma_steep))) {
        throw ConfigError("cognitive set: gamma must be positive");
    }
    if (!std::isfinite(rho_vig)) throw ConfigError("cognitive set: rho must be finite");
    if (b_tail.size() != categories) throw ConfigError("cognitive set: b_tail must have C entries");
    double sum = 0.0;
    for (double b : b_tail) {
        if (!(b >= 0.0)) throw ConfigError("cognitive set: b_tail entries must be non-negative");
        sum += b;
    }
    if (std::fabs(sum - 1.0) > 1e-9) throw ConfigError("cognitive set: b_tail must sum to 1");
    gate.validate();
    if (gate.allocation_head.w.rows != categories) {
        throw ConfigError("cognitive set: allocation head must have C outputs");
    }
}

std::vector<double> default_b_tail(std::size_t categories) {
    std::vector<double> b(categories);
    const double total = static_cast<double>(categories * (categories + 1)) / 2.0;
    for (std::size_t k = 0; k < categories; ++k) b[k] = static_cast<double>(k + 1) / total;
    return b;
}

GateMlp zero_gate(std::size_t input_dim, std::size_t hidden, std::size_t categories) {
    GateMlp g;
    std::size_t width = input_dim;
    if (hidden > 0) {
        g.trunk.push_back({Matrix(hidden, input_dim), std::vector<double>(hidden, 0.0)});
        width = hidden;
    }
    g.allocation_head = {Matrix(categories, width), std::vector<double>(categories, 0.0)};
    g.gate_head = {Matrix(1, width), std::vector<double>(1, 0.0)};
    return g;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.begin(), logits.end());
    if (out.empty()) return out;
    const double top = *std::max_element(out.begin(), out.end());
    double total = 0.0;
    for (double& v : out) {
        v = std::exp(v - top);
        total += v;
    }
    for (double& v : out) v /= total;
    return out;
}

GateOutputs gate_forward(const GateMlp& gate, std::span<const double> h) {
    gate.validate();
    if (h.size() != gate.input_dim()) {
        throw ConfigError("gate MLP expects " + std::to_string(gate.input_dim()) + " inputs, got " +
                          std::to_string(h.size()));
    }
    const auto& k = kernels::active();
    std::vector<double> x(h.begin(), h.end());
    for (const auto& layer : gate.trunk) {
        std::vector<double> y(layer.w.rows);
        k.matvec(layer.w.data.data(), x.data(), layer.b.data(), y.data(), layer.w.rows, layer.w.cols);
        for (double& v : y) v = std::max(v, 0.0);
        x = std::move(y);
    }
    GateOutputs out;
    out.allocation_logits.resize(gate.allocation_head.w.rows);
    k.matvec(gate.allocation_head.w.data.data(), x.data(), gate.allocation_head.b.data(),
             out.allocation_logits.data(), gate.allocation_head.w.rows, x.size());
    k.matvec(gate.gate_head.w.data.data(), x.data(), gate.gate_head.b.data(), &out.gate_logit, 1,
             x.size());
    return out;
}

std::vector<double> allocation(std::span<const double> h, const CognitiveSetParams& params) {
    return softmax(gate_forward(params.gate, h).allocation_logits);
}

SimilarityResult similarity(std::span<const double> f_m, const Matrix& prototypes, double tau) {
    if (f_m.size() != prototypes.cols) {
        throw ConfigError("similarity: feature size " + std::to_string(f_m.size()) +
                          " does not match prototype size " + std::to_string(prototypes.cols));
    }
    SimilarityResult out;
    out.s.assign(prototypes.rows, 0.0);
    const double f_norm = std::sqrt(kernels::dot(f_m, f_m));
    for (std::size_t k = 0; k < prototypes.rows; ++k) {
        const auto row = prototypes.row(k);
        const double m_norm = std::sqrt(kernels::dot(row, row));
        if (f_norm < kMinNorm || m_norm < kMinNorm) {
            out.zero_norm = true;
            continue;
        }
        out.s[k] = tau * kernels::dot(f_m, row) / (f_norm * m_norm);
    }
    return out;
}

double vigilance(std::span<const double> s, const CognitiveSetParams& params) {
    const double top = *std::max_element(s.begin(), s.end());
    return sigmoid(params.gamma_steep * (top - params.rho_vig));
}

std::vector<double> vigilance_adjust(std::span<const double> g, std::span<const double> s,
                                     const CognitiveSetParams& params) {
    if (g.size() != params.b_tail.size() || s.size() != g.size() || g.empty()) {
        throw ConfigError("vigilance: allocation, similarity and b_tail sizes differ");
    }
    const double lambda = vigilance(s, params);
    std::vector<double> out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        out[k] = lambda * g[k] + (1.0 - lambda) * params.b_tail[k];
    }
    return out;
}

namespace {

double alignment(std::span<const double> g, std::span<const double> s) {
    double x = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) x += (2.0 * g[k] - 1.0) * s[k];
    return x;
}

void check_batch_shapes(const Matrix& prototypes, const Matrix& f_m, const Matrix& g) {
    if (f_m.cols != prototypes.cols || g.cols != prototypes.rows || g.rows != f_m.rows ||
        f_m.rows == 0) {
        throw ConfigError("prototype loss: batch shapes do not match the memory");
    }
}

}  // namespace

double proto_loss(const Matrix& g_adjusted, const Matrix& s) {
    if (g_adjusted.rows != s.rows || g_adjusted.cols != s.cols) {
        throw ConfigError("prototype loss: g' and s shapes differ");
    }
    if (s.rows == 0) throw UsageError("prototype loss: empty batch");
    double total = 0.0;
    for (std::size_t i = 0; i < s.rows; ++i) {
        total += -log_sigmoid(alignment(g_adjusted.row(i), s.row(i)));
    }
    return total / static_cast<double>(s.rows);
}

double proto_loss_at(const Matrix& prototypes, const Matrix& f_m, const Matrix& g_adjusted,
                     double tau) {
    check_batch_shapes(prototypes, f_m, g_adjusted);
    Matrix s(f_m.rows, prototypes.rows);
    for (std::size_t i = 0; i < f_m.rows; ++i) {
        const auto sim = similarity(f_m.row(i), prototypes, tau);
        std::copy(sim.s.begin(), sim.s.end(), s.row(i).begin());
    }
    return proto_loss(g_adjusted, s);
}

ProtoGradient proto_loss_gradient(const Matrix& prototypes, const Matrix& f_m,
                                  const Matrix& g_adjusted, double tau) {
    check_batch_shapes(prototypes, f_m, g_adjusted);
    const std::size_t batch = f_m.rows;
    const std::size_t cats = prototypes.rows;
    const std::size_t dim = prototypes.cols;
    ProtoGradient out{Matrix(cats, dim), false};

    std::vector<double> m_norm(cats);
    for (std::size_t k = 0; k < cats; ++k) {
        m_norm[k] = std::sqrt(kernels::dot(prototypes.row(k), prototypes.row(k)));
        if (m_norm[k] < kMinNorm) out.zero_norm = true;
    }
    for (std::size_t i = 0; i < batch; ++i) {
        const auto f = f_m.row(i);
        const double f_norm = std::sqrt(kernels::dot(f, f));
        if (f_norm < kMinNorm) {
            out.zero_norm = true;
            continue;
        }
        std::vector<double> s(cats, 0.0);
        std::vector<double> fm(cats, 0.0);
        for (std::size_t k = 0; k < cats; ++k) {
            if (m_norm[k] < kMinNorm) continue;
            fm[k] = kernels::dot(f, prototypes.row(k));
            s[k] = tau * fm[k] / (f_norm * m_norm[k]);
        }
        const auto g = g_adjusted.row(i);
        // dL/dx_i for L = mean softplus(-x_i)
        const double dx = -sigmoid(-alignment(g, s)) / static_cast<double>(batch);
        for (std::size_t k = 0; k < cats; ++k) {
            if (m_norm[k] < kMinNorm) continue;
            const double coeff = dx * (2.0 * g[k] - 1.0) * tau / (f_norm * m_norm[k]);
            const double proj = fm[k] / (m_norm[k] * m_norm[k]);
            const auto m = prototypes.row(k);
            auto grad = out.grad.row(k);
            for (std::size_t d = 0; d < dim; ++d) grad[d] += coeff * (f[d] - proj * m[d]);
        }
    }
    return out;
}

InnerUpdateResult inner_update(const PrototypeMemory& memory, const Matrix& f_m,
                               const Matrix& g_adjusted, double tau, double alpha_lr) {
    memory.validate();
    const auto grad = proto_loss_gradient(memory.prototypes, f_m, g_adjusted, tau);
    InnerUpdateResult out{memory.prototypes, grad.zero_norm};
    for (std::size_t i = 0; i < out.prototypes.data.size(); ++i) {
        out.prototypes.data[i] -= alpha_lr * grad.grad.data[i];
    }
    return out;
}

Adaptation adapt(const PrototypeMemory& memory, std::span<const AdaptationSample> batch,
                 const CognitiveSetParams& params, double alpha_lr) {
    memory.validate();
    params.validate(memory.categories());
    validate_batch(batch);
    if (batch.empty()) throw UsageError("adapt: empty batch");
    const std::size_t cats = memory.categories();
    Matrix f_m(batch.size(), memory.dim());
    Adaptation out{Matrix(batch.size(), cats), Matrix(batch.size(), cats), 0.0, {}};
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch[i].f_m.size() != memory.dim()) throw ConfigError("adapt: F_m size mismatch");
        std::copy(batch[i].f_m.begin(), batch[i].f_m.end(), f_m.row(i).begin());
        const auto g = allocation(batch[i].h(), params);
        const auto s = similarity(batch[i].f_m, memory.prototypes, params.tau).s;
        const auto g_adj = vigilance_adjust(g, s, params);
        std::copy(g_adj.begin(), g_adj.end(), out.g_adjusted.row(i).begin());
        std::copy(s.begin(), s.end(), out.similarity.row(i).begin());
    }
    out.loss = proto_loss(out.g_adjusted, out.similarity);
    out.update = inner_update(memory, f_m, out.g_adjusted, params.tau, alpha_lr);
    return out;
}

std::vector<double> augment(std::span<const double> f_m, std::span<const double> h,
                            std::span<const double> g_adjusted, const Matrix& prototypes,
                            const CognitiveSetParams& params) {
    if (f_m.size() != prototypes.cols || g_adjusted.size() != prototypes.rows) {
        throw ConfigError("augment: F_m, g' and memory shapes disagree");
    }
    const double gate = sigmoid(gate_forward(params.gate, h).gate_logit);
    std::vector<double> out(f_m.begin(), f_m.end());
    for (std::size_t k = 0; k < prototypes.rows; ++k) {
        const double w = gate * g_adjusted[k];
        const auto row = prototypes.row(k);
        for (std::size_t d = 0; d < out.size(); ++d) out[d] += w * row[d];
    }
    return out;
}

}  // namespace tailscope
