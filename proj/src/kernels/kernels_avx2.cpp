#include <immintrin.h>

#include <cmath>

#include "tailscope/kernels.hpp"

namespace tailscope::kernels {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4),
                                                 _mm256_loadu_pd(b + i + 4)));
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void matvec_avx2(const double* w, const double* x, const double* bias, double* out,
                 std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double v = dot_avx2(w + r * cols, x, cols);
        out[r] = bias ? v + bias[r] : v;
    }
}

void affine_avx2(const double* mu, const double* sigma, const double* eps, double* out,
                 std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d m = _mm256_loadu_pd(mu + i);
        const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(sigma + i), _mm256_loadu_pd(eps + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(m, p));
    }
    for (; i < n; ++i) out[i] = mu[i] + sigma[i] * eps[i];
}

// Two points per register: lanes (x0, y0, x1, y1).
double sum_point_distances_avx2(const Vec2* a, const Vec2* b, std::size_t n) {
    const auto* pa = reinterpret_cast<const double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i));
        const __m256d d1 =
            _mm256_sub_pd(_mm256_loadu_pd(pa + 2 * i + 4), _mm256_loadu_pd(pb + 2 * i + 4));
        const __m256d s0 = _mm256_mul_pd(d0, d0);
        const __m256d s1 = _mm256_mul_pd(d1, d1);
        // hadd gives (p0, p2, p1, p3) squared norms
        const __m256d sq = _mm256_hadd_pd(s0, s1);
        acc = _mm256_add_pd(acc, _mm256_sqrt_pd(sq));
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double dx = a[i].x - b[i].x;
        const double dy = a[i].y - b[i].y;
        s += std::sqrt(dx * dx + dy * dy);
    }
    return s;
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{"avx2", dot_avx2, matvec_avx2, affine_avx2,
                                   sum_point_distances_avx2};
    return table;
}

}  // namespace tailscope::kernels
