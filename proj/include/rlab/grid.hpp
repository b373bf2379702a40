#pragma once
// Uniform grids and complex-valued fields on [-L, L)^dim.
//
// Transform convention (kept literal everywhere):
//   fhat(xi) = int exp(-i x.xi) f(x) dx,   f(x) = (2pi)^-d int exp(i x.xi) fhat(xi) dxi
// Physical nodes  x_j  = -L + j*dx,        dx  = 2L/N
// Frequency nodes xi_k = (k - N/2)*dxi,    dxi = pi/L
// so that dx*dxi*N = 2pi exactly.

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlab {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

using cplx = std::complex<double>;

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class Side { Physical, Frequency };

struct GridSpec {
    int dim = 1;            // 1..4
    int n = 8;              // points per axis, even
    double half_extent = 1; // L

    double dx() const { return 2.0 * half_extent / n; }
    double dxi() const { return kPi / half_extent; }
    double xi_max() const { return 0.5 * n * dxi(); } // box covers [-xi_max, xi_max)
    double x(int j) const { return -half_extent + j * dx(); }
    double xi(int k) const { return (k - n / 2) * dxi(); }

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
        return s;
    }
    std::size_t stride(int axis) const {
        std::size_t s = 1;
        for (int a = axis + 1; a < dim; ++a) s *= static_cast<std::size_t>(n);
        return s;
    }
    GridSpec reduced() const; // same N, L, one dimension fewer

    bool operator==(const GridSpec&) const = default;
};

// dim in {1,..,4}, N even and >= 8, L > 0, N^dim <= 2^28.
GridSpec make_grid(int dim, int n, double half_extent);

struct Field {
    GridSpec grid;
    Side side = Side::Physical;
    std::vector<cplx> values;
    // Axes already carried to frequency variables. All-true for a full
    // transform; a partial transform marks its axis only.
    std::array<bool, 4> transformed{false, false, false, false};

    Field() = default;
    Field(GridSpec g, Side s) : grid(g), side(s), values(g.size(), cplx{}) {}

    std::size_t index(const std::array<int, 4>& idx) const {
        std::size_t lin = 0;
        for (int a = 0; a < grid.dim; ++a) lin = lin * grid.n + idx[a];
        return lin;
    }
    bool fully_transformed() const {
        for (int a = 0; a < grid.dim; ++a)
            if (!transformed[a]) return false;
        return true;
    }
};

// Largest |value| over the physical boundary faces divided by the global
// maximum. The plumbing keeps this as a diagnostic: callers pick the budget.
double boundary_decay(const Field& f);

void require(bool cond, const std::string& msg);

} // namespace rlab
