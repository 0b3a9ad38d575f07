#include "ctxsql/simd/vector_kernels.hpp"

namespace ctxsql::simd::scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

double squared_norm(const double* a, std::size_t n) noexcept {
    return dot(a, a, n);
}

void scale(double* a, std::size_t n, double factor) noexcept {
    for (std::size_t i = 0; i < n; ++i) {
        a[i] *= factor;
    }
}

}  // namespace ctxsql::simd::scalar
