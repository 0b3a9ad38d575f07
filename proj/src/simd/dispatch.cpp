// Dispatch only; no intrinsics here.

#include "ctxsql/simd/vector_kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace ctxsql::simd {

namespace {

// -1: follow detection, otherwise a Level value.
std::atomic<int> g_forced{-1};

Level level_from_env_or_detect() noexcept {
    if (const char* env = std::getenv("CTXSQL_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
        return Level::scalar;
    }
    return detected_level();
}

using DotFn = double (*)(const double*, const double*, std::size_t) noexcept;
using NormFn = double (*)(const double*, std::size_t) noexcept;
using ScaleFn = void (*)(double*, std::size_t, double) noexcept;

struct KernelTable {
    DotFn dot;
    NormFn squared_norm;
    ScaleFn scale;
};

KernelTable table_for(Level level) noexcept {
    switch (level) {
#if defined(CTXSQL_HAVE_AVX2_KERNELS)
    case Level::avx2:
        return {&avx2::dot, &avx2::squared_norm, &avx2::scale};
#endif
#if defined(CTXSQL_HAVE_NEON_KERNELS)
    case Level::neon:
        return {&neon::dot, &neon::squared_norm, &neon::scale};
#endif
    default:
        return {&scalar::dot, &scalar::squared_norm, &scalar::scale};
    }
}

KernelTable active_table() noexcept {
    return table_for(active_level());
}

}  // namespace

std::string_view level_name(Level level) noexcept {
    switch (level) {
    case Level::avx2:
        return "avx2";
    case Level::neon:
        return "neon";
    case Level::scalar:
        break;
    }
    return "scalar";
}

bool level_supported(Level level) noexcept {
    switch (level) {
    case Level::scalar:
        return true;
    case Level::avx2:
#if defined(CTXSQL_HAVE_AVX2_KERNELS)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Level::neon:
#if defined(CTXSQL_HAVE_NEON_KERNELS)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Level detected_level() noexcept {
    if (level_supported(Level::avx2)) {
        return Level::avx2;
    }
    if (level_supported(Level::neon)) {
        return Level::neon;
    }
    return Level::scalar;
}

Level active_level() noexcept {
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) {
        return static_cast<Level>(forced);
    }
    static const Level resolved = level_from_env_or_detect();
    return resolved;
}

void force_level(std::optional<Level> level) noexcept {
    if (!level) {
        g_forced.store(-1, std::memory_order_relaxed);
        return;
    }
    const Level effective = level_supported(*level) ? *level : Level::scalar;
    g_forced.store(static_cast<int>(effective), std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    const std::size_t n = a.size() < b.size() ? a.size() : b.size();
    return active_table().dot(a.data(), b.data(), n);
}

double squared_norm(std::span<const double> a) noexcept {
    return active_table().squared_norm(a.data(), a.size());
}

void scale(std::span<double> a, double factor) noexcept {
    active_table().scale(a.data(), a.size(), factor);
}

void dot_rows(std::span<const double> rows, std::size_t dim, std::span<const double> query,
              std::span<double> out) noexcept {
    const KernelTable table = active_table();
    const std::size_t n = dim < query.size() ? dim : query.size();
    for (std::size_t r = 0; r < out.size() && (r + 1) * dim <= rows.size(); ++r) {
        out[r] = table.dot(rows.data() + r * dim, query.data(), n);
    }
}

}  // namespace ctxsql::simd
