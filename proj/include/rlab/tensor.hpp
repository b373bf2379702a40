#pragma once
// Small dense helpers shared by the interpolation and chain code paths:
// axis contractions of row-major complex tensors and a blocked complex
// matrix product used to batch many off-grid frequency evaluations.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "rlab/grid.hpp"

namespace rlab {

// out[outer,inner] = sum_k data[outer,k,inner] * w[k] for a tensor of shape
// (outer, n, inner) flattened row-major. Works for any axis of a Field once
// the caller folds leading/trailing axes into outer/inner.
void contract_axis(std::span<const cplx> data, std::size_t outer, std::size_t n,
                   std::size_t inner, std::span<const cplx> w, std::span<cplx> out);

// C (rows x cols) += A (rows x k) * B (k x cols), all row-major.
// B is expected small (k, cols ~ grid axis / node-block sizes); the i-k-j
// loop keeps A streaming and the C row hot.
void zgemm_acc(std::span<const cplx> a, std::size_t rows, std::size_t k,
               std::span<const cplx> b, std::size_t cols, std::span<cplx> c);

inline std::vector<cplx> contract_axis_field(const Field& f, int axis,
                                             std::span<const cplx> w) {
    const int n = f.grid.n;
    std::size_t outer = 1, inner = 1;
    for (int a = 0; a < axis; ++a) outer *= n;
    for (int a = axis + 1; a < f.grid.dim; ++a) inner *= n;
    std::vector<cplx> out(outer * inner);
    contract_axis(f.values, outer, n, inner, w, out);
    return out;
}

} // namespace rlab
