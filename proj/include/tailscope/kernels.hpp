#pragma once

// Dense inner loops used by the perceiver, the prototype memory and the
// forecast evaluator. Each kernel has a scalar reference and, where the CPU
// allows, an AVX2 variant chosen once at startup.

#include <cstddef>
#include <span>
#include <string_view>

#include "tailscope/numeric.hpp"

namespace tailscope::kernels {

struct KernelTable {
    std::string_view name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    // out = W x + bias, W row-major rows x cols. bias may be null.
    void (*matvec)(const double* w, const double* x, const double* bias, double* out,
                   std::size_t rows, std::size_t cols);

    // out[i] = mu[i] + sigma[i] * eps[i]
    void (*affine)(const double* mu, const double* sigma, const double* eps, double* out,
                   std::size_t n);

    // sum_t |a[t] - b[t]|_2 over n points
    double (*sum_point_distances)(const Vec2* a, const Vec2* b, std::size_t n);
};

static_assert(sizeof(Vec2) == 2 * sizeof(double));

[[nodiscard]] const KernelTable& scalar();

// Null when the build or the CPU lacks AVX2.
[[nodiscard]] const KernelTable* avx2();

// Best table for this CPU. Setting TAILSCOPE_KERNELS=scalar in the
// environment forces the reference path.
[[nodiscard]] const KernelTable& active();

// Span conveniences over active().
[[nodiscard]] inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

[[nodiscard]] inline double sum_point_distances(std::span<const Vec2> a, std::span<const Vec2> b) {
    return active().sum_point_distances(a.data(), b.data(), a.size());
}

}  // namespace tailscope::kernels
