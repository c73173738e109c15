#include "abr/simd.hpp"

namespace abr::simd::detail {

void bracket_sums_scalar(const BracketBatch& bt, const double* b2, const double* sinphi, int count, cplx* out) {
    for (int a = 0; a < count; ++a) {
        double re = 0.0, im = 0.0;
        for (std::size_t q = 0; q < bt.n; ++q) {
            const double t = 1.0 / (bt.dd[q] + b2[a]);
            const double br = bt.c_exp * bt.e1[q] + bt.c_frac * (bt.em1[q] + b2[a]) * bt.sh[q] * t;
            const double bi = -bt.c_frac * sinphi[a] * bt.ch[q] * t;
            re += bt.wf_re[q] * br - bt.wf_im[q] * bi;
            im += bt.wf_re[q] * bi + bt.wf_im[q] * br;
        }
        out[a] = {re, im};
    }
}

void cgemv_scalar(const cplx* a, int rows, int cols, const cplx* x, cplx* y) {
    for (int i = 0; i < rows; ++i) {
        const cplx* row = a + static_cast<std::size_t>(i) * cols;
        double re = 0.0, im = 0.0;
        for (int j = 0; j < cols; ++j) {
            re += row[j].real() * x[j].real() - row[j].imag() * x[j].imag();
            im += row[j].real() * x[j].imag() + row[j].imag() * x[j].real();
        }
        y[i] = {re, im};
    }
}

}  // namespace abr::simd::detail
