#include "abr/simd.hpp"

#include <immintrin.h>

namespace abr::simd::detail {

namespace {

__attribute__((target("avx2,fma"))) inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

__attribute__((target("avx2,fma"))) void bracket_sums_avx2(const BracketBatch& bt, const double* b2,
                                                           const double* sinphi, int count, cplx* out) {
    const std::size_t n4 = bt.n & ~std::size_t(3);
    const __m256d cexp = _mm256_set1_pd(bt.c_exp);
    const __m256d cfrac = _mm256_set1_pd(bt.c_frac);
    for (int a = 0; a < count; ++a) {
        const __m256d vb2 = _mm256_set1_pd(b2[a]);
        const __m256d vsp = _mm256_set1_pd(-sinphi[a] * bt.c_frac);
        __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();
        for (std::size_t q = 0; q < n4; q += 4) {
            const __m256d t = _mm256_div_pd(_mm256_set1_pd(1.0), _mm256_add_pd(_mm256_loadu_pd(bt.dd + q), vb2));
            const __m256d num = _mm256_mul_pd(_mm256_add_pd(_mm256_loadu_pd(bt.em1 + q), vb2),
                                              _mm256_loadu_pd(bt.sh + q));
            const __m256d br = _mm256_fmadd_pd(cexp, _mm256_loadu_pd(bt.e1 + q), _mm256_mul_pd(cfrac, _mm256_mul_pd(num, t)));
            const __m256d bi = _mm256_mul_pd(vsp, _mm256_mul_pd(_mm256_loadu_pd(bt.ch + q), t));
            const __m256d wr = _mm256_loadu_pd(bt.wf_re + q);
            const __m256d wi = _mm256_loadu_pd(bt.wf_im + q);
            acc_re = _mm256_fmadd_pd(wr, br, acc_re);
            acc_re = _mm256_fnmadd_pd(wi, bi, acc_re);
            acc_im = _mm256_fmadd_pd(wr, bi, acc_im);
            acc_im = _mm256_fmadd_pd(wi, br, acc_im);
        }
        double re = hsum(acc_re), im = hsum(acc_im);
        for (std::size_t q = n4; q < bt.n; ++q) {
            const double t = 1.0 / (bt.dd[q] + b2[a]);
            const double br = bt.c_exp * bt.e1[q] + bt.c_frac * (bt.em1[q] + b2[a]) * bt.sh[q] * t;
            const double bi = -bt.c_frac * sinphi[a] * bt.ch[q] * t;
            re += bt.wf_re[q] * br - bt.wf_im[q] * bi;
            im += bt.wf_re[q] * bi + bt.wf_im[q] * br;
        }
        out[a] = {re, im};
    }
}

__attribute__((target("avx2,fma"))) void cgemv_avx2(const cplx* a, int rows, int cols, const cplx* x, cplx* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    const int c2 = cols & ~1;
    for (int i = 0; i < rows; ++i) {
        const double* row = reinterpret_cast<const double*>(a + static_cast<std::size_t>(i) * cols);
        __m256d acc1 = _mm256_setzero_pd(), acc2 = _mm256_setzero_pd();
        for (int j = 0; j < c2; j += 2) {
            const __m256d va = _mm256_loadu_pd(row + 2 * j);
            const __m256d vx = _mm256_loadu_pd(xd + 2 * j);
            acc1 = _mm256_fmadd_pd(va, _mm256_movedup_pd(vx), acc1);
            acc2 = _mm256_fmadd_pd(_mm256_permute_pd(va, 0b0101), _mm256_permute_pd(vx, 0b1111), acc2);
        }
        const __m256d prod = _mm256_addsub_pd(acc1, acc2);
        const __m128d s = _mm_add_pd(_mm256_castpd256_pd128(prod), _mm256_extractf128_pd(prod, 1));
        cplx sum(_mm_cvtsd_f64(s), _mm_cvtsd_f64(_mm_unpackhi_pd(s, s)));
        for (int j = c2; j < cols; ++j) sum += a[static_cast<std::size_t>(i) * cols + j] * x[j];
        y[i] = sum;
    }
}

}  // namespace abr::simd::detail
