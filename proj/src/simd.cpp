#include "abr/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace abr::simd {

namespace {

Level detect() {
    const char* env = std::getenv("ABR_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return Level::scalar;
    return avx2_available() ? Level::avx2 : Level::scalar;
}

std::atomic<Level>& current() {
    static std::atomic<Level> level{detect()};
    return level;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Level active_level() { return current().load(std::memory_order_relaxed); }

void set_level(Level level) {
    if (level == Level::avx2 && !avx2_available()) level = Level::scalar;
    current().store(level, std::memory_order_relaxed);
}

const char* level_name(Level level) { return level == Level::avx2 ? "avx2" : "scalar"; }

void bracket_sums(Level level, const BracketBatch& batch, const double* b2, const double* sinphi, int count,
                  cplx* out) {
    if (level == Level::avx2 && avx2_available())
        detail::bracket_sums_avx2(batch, b2, sinphi, count, out);
    else
        detail::bracket_sums_scalar(batch, b2, sinphi, count, out);
}

void bracket_sums(const BracketBatch& batch, const double* b2, const double* sinphi, int count, cplx* out) {
    bracket_sums(active_level(), batch, b2, sinphi, count, out);
}

void cgemv(Level level, const cplx* a, int rows, int cols, const cplx* x, cplx* y) {
    if (level == Level::avx2 && avx2_available())
        detail::cgemv_avx2(a, rows, cols, x, y);
    else
        detail::cgemv_scalar(a, rows, cols, x, y);
}

void cgemv(const cplx* a, int rows, int cols, const cplx* x, cplx* y) { cgemv(active_level(), a, rows, cols, x, y); }

}  // namespace abr::simd
