#include "ctxsql/simd/vector_kernels.hpp"

#include <arm_neon.h>

namespace ctxsql::simd::neon {

double dot(const double* a, const double* b, std::size_t n) noexcept {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

double squared_norm(const double* a, std::size_t n) noexcept {
    return dot(a, a, n);
}

void scale(double* a, std::size_t n, double factor) noexcept {
    const float64x2_t f = vdupq_n_f64(factor);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(a + i, vmulq_f64(vld1q_f64(a + i), f));
    }
    for (; i < n; ++i) {
        a[i] *= factor;
    }
}

}  // namespace ctxsql::simd::neon
