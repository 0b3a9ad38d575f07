#pragma once

// Dense double-precision kernels behind embedding normalization and the
// brute-force similarity scan. Every entry point dispatches at runtime to the
// best compiled variant; the scalar variant is the reference the others are
// tested against.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace ctxsql::simd {

enum class Level { scalar, avx2, neon };

std::string_view level_name(Level level) noexcept;

/// Best level supported by both the build and the running CPU.
Level detected_level() noexcept;

/// Level actually used by the dispatching entry points. Honors
/// `CTXSQL_SIMD=scalar` in the environment and `force_level`.
Level active_level() noexcept;

/// Pins dispatch to `level` (tests, benchmarking). Passing nullopt restores
/// detection. Requesting an unsupported level falls back to scalar.
void force_level(std::optional<Level> level) noexcept;

bool level_supported(Level level) noexcept;

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double squared_norm(std::span<const double> a) noexcept;
void scale(std::span<double> a, double factor) noexcept;

/// out[r] = dot(rows[r*dim .. r*dim+dim), query) for r in [0, out.size()).
void dot_rows(std::span<const double> rows, std::size_t dim, std::span<const double> query,
              std::span<double> out) noexcept;

// Per-variant entry points, exposed for equivalence tests.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double squared_norm(const double* a, std::size_t n) noexcept;
void scale(double* a, std::size_t n, double factor) noexcept;
}  // namespace scalar

#if defined(CTXSQL_HAVE_AVX2_KERNELS)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double squared_norm(const double* a, std::size_t n) noexcept;
void scale(double* a, std::size_t n, double factor) noexcept;
}  // namespace avx2
#endif

#if defined(CTXSQL_HAVE_NEON_KERNELS)
namespace neon {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double squared_norm(const double* a, std::size_t n) noexcept;
void scale(double* a, std::size_t n, double factor) noexcept;
}  // namespace neon
#endif

}  // namespace ctxsql::simd
