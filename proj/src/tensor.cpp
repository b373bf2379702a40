#include "rlab/tensor.hpp"

namespace rlab {

void contract_axis(std::span<const cplx> data, std::size_t outer, std::size_t n,
                   std::size_t inner, std::span<const cplx> w, std::span<cplx> out) {
    if (inner == 1) {
        // contiguous reduction along the last axis
        for (std::size_t o = 0; o < outer; ++o) {
            const cplx* row = data.data() + o * n;
            double re = 0.0, im = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double ar = row[k].real(), ai = row[k].imag();
                const double br = w[k].real(), bi = w[k].imag();
                re += ar * br - ai * bi;
                im += ar * bi + ai * br;
            }
            out[o] = cplx(re, im);
        }
        return;
    }
    for (std::size_t o = 0; o < outer; ++o) {
        const cplx* blk = data.data() + o * n * inner;
        cplx* dst = out.data() + o * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] = cplx{};
        for (std::size_t k = 0; k < n; ++k) {
            const cplx wk = w[k];
            const double br = wk.real(), bi = wk.imag();
            const cplx* src = blk + k * inner;
            for (std::size_t i = 0; i < inner; ++i) {
                const double ar = src[i].real(), ai = src[i].imag();
                dst[i] += cplx(ar * br - ai * bi, ar * bi + ai * br);
            }
        }
    }
}

void zgemm_acc(std::span<const cplx> a, std::size_t rows, std::size_t k,
               std::span<const cplx> b, std::size_t cols, std::span<cplx> c) {
    for (std::size_t i = 0; i < rows; ++i) {
        const cplx* arow = a.data() + i * k;
        cplx* crow = c.data() + i * cols;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double ar = arow[kk].real(), ai = arow[kk].imag();
            if (ar == 0.0 && ai == 0.0) continue;
            const cplx* brow = b.data() + kk * cols;
            for (std::size_t j = 0; j < cols; ++j) {
                const double br = brow[j].real(), bi = brow[j].imag();
                crow[j] += cplx(ar * br - ai * bi, ar * bi + ai * br);
            }
        }
    }
}

} // namespace rlab
