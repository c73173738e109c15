#pragma once
//! Hot loops with scalar and AVX2 variants selected at runtime (override with ABR_SIMD=scalar).

#include <complex>
#include <cstddef>

namespace abr::simd {

using cplx = std::complex<double>;

enum class Level { scalar, avx2 };

bool avx2_available();
//! Detected level, unless ABR_SIMD=scalar or set_level() says otherwise.
Level active_level();
void set_level(Level level);
const char* level_name(Level level);

//! Structure-of-arrays node data for the diffractive bracket sum.
struct BracketBatch {
    const double* wf_re;
    const double* wf_im;
    const double* e1;
    const double* em1;
    const double* sh;
    const double* ch;
    const double* dd;
    std::size_t n;
    double c_exp;
    double c_frac;
};

//! out[a] = Σ_q wf_q·[c_exp·e1_q + c_frac·((em1_q + b2_a)·sh_q - i·sinphi_a·ch_q)/(dd_q + b2_a)].
void bracket_sums(Level level, const BracketBatch& batch, const double* b2, const double* sinphi, int count,
                  cplx* out);
void bracket_sums(const BracketBatch& batch, const double* b2, const double* sinphi, int count, cplx* out);

//! y = A x with A row-major (rows × cols).
void cgemv(Level level, const cplx* a, int rows, int cols, const cplx* x, cplx* y);
void cgemv(const cplx* a, int rows, int cols, const cplx* x, cplx* y);

namespace detail {
void bracket_sums_scalar(const BracketBatch& batch, const double* b2, const double* sinphi, int count, cplx* out);
void bracket_sums_avx2(const BracketBatch& batch, const double* b2, const double* sinphi, int count, cplx* out);
void cgemv_scalar(const cplx* a, int rows, int cols, const cplx* x, cplx* y);
void cgemv_avx2(const cplx* a, int rows, int cols, const cplx* x, cplx* y);
}  // namespace detail

}  // namespace abr::simd
