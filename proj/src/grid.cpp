#include "rlab/grid.hpp"

#include <cmath>

namespace rlab {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

GridSpec GridSpec::reduced() const {
    GridSpec g = *this;
    require(dim >= 2, "reduced(): dim must be >= 2");
    g.dim = dim - 1;
    return g;
}

GridSpec make_grid(int dim, int n, double half_extent) {
    require(dim >= 1 && dim <= 4, "make_grid: dim must be in {1,2,3,4}");
    require(n >= 8, "make_grid: points_per_axis must be >= 8");
    require(n % 2 == 0, "make_grid: points_per_axis must be even");
    require(half_extent > 0.0, "make_grid: half_extent must be positive");
    double logcells = dim * std::log2(static_cast<double>(n));
    require(logcells <= 28.0 + 1e-9, "make_grid: N^dim exceeds the 2^28 memory guard");
    return GridSpec{dim, n, half_extent};
}

double boundary_decay(const Field& f) {
    const int n = f.grid.n;
    const int d = f.grid.dim;
    double global = 0.0;
    for (const cplx& v : f.values) global = std::max(global, std::abs(v));
    if (global == 0.0) return 0.0;

    double edge = 0.0;
    std::array<int, 4> idx{0, 0, 0, 0};
    const std::size_t total = f.values.size();
    for (std::size_t lin = 0; lin < total; ++lin) {
        std::size_t rest = lin;
        bool on_edge = false;
        for (int a = d - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(rest % n);
            rest /= n;
            if (idx[a] == 0 || idx[a] == n - 1) on_edge = true;
        }
        if (on_edge) edge = std::max(edge, std::abs(f.values[lin]));
    }
    return edge / global;
}

} // namespace rlab
