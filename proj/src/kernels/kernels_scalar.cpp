#include <cmath>

#include "tailscope/kernels.hpp"

namespace tailscope::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void matvec_scalar(const double* w, const double* x, const double* bias, double* out,
                   std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double v = dot_scalar(w + r * cols, x, cols);
        out[r] = bias ? v + bias[r] : v;
    }
}

void affine_scalar(const double* mu, const double* sigma, const double* eps, double* out,
                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = mu[i] + sigma[i] * eps[i];
}

double sum_point_distances_scalar(const Vec2* a, const Vec2* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = a[i].x - b[i].x;
        const double dy = a[i].y - b[i].y;
        s += std::sqrt(dx * dx + dy * dy);
    }
    return s;
}

}  // namespace

const KernelTable& scalar() {
    static const KernelTable table{"scalar", dot_scalar, matvec_scalar, affine_scalar,
                                   sum_point_distances_scalar};
    return table;
}

}  // namespace tailscope::kernels
