#include "rlab/interpolation.hpp"

#include <cmath>

#include "rlab/tensor.hpp"

namespace rlab {

std::vector<cplx> dirichlet_weights(const GridSpec& g, double t) {
    const int n = g.n;
    std::vector<cplx> w(n);
    for (int k = 0; k < n; ++k) {
        const double theta = g.xi(k) - t;
        const double phi = g.dx() * theta;
        const double m = std::round(phi / (2.0 * kPi));
        const double phir = phi - 2.0 * kPi * m;
        double ratio;
        if (std::abs(phir) < 1e-9) {
            ratio = static_cast<double>(n); // grid-offset limit
        } else {
            ratio = std::sin(0.5 * n * phir) / std::sin(0.5 * phir);
        }
        // sin(N phi/2)/sin(phi/2) picks up (-1)^{m(N-1)} when unwrapping
        if (static_cast<long long>(m) % 2 != 0 && n % 2 == 0) ratio = -ratio;
        const double arg = -g.half_extent * theta + 0.5 * (n - 1) * phi;
        w[k] = (ratio / n) * std::polar(1.0, arg);
    }
    return w;
}

std::vector<cplx> physical_phase_weights(const GridSpec& g, double t) {
    const int n = g.n;
    const double dx = g.dx();
    std::vector<cplx> w(n);
    const cplx step = std::polar(1.0, -dx * t);
    cplx cur;
    for (int j = 0; j < n; ++j) {
        if (j % 16 == 0) cur = std::polar(1.0, -g.x(j) * t); // refresh drift
        w[j] = dx * cur;
        cur *= step;
    }
    return w;
}

cplx interpolate_spectrum(const Field& fhat, std::span<const double> point) {
    require(fhat.side == Side::Frequency && fhat.fully_transformed(),
            "interpolate_spectrum: field must be fully frequency-side");
    const GridSpec& g = fhat.grid;
    require(static_cast<int>(point.size()) == g.dim,
            "interpolate_spectrum: point dimension mismatch");

    const double bound = g.xi_max() * (1.0 + 1e-12);
    std::array<int, 4> node{0, 0, 0, 0};
    bool on_node = true;
    for (int a = 0; a < g.dim; ++a) {
        require(std::abs(point[a]) <= bound, "interpolate_spectrum: point outside the frequency box");
        const double pos = point[a] / g.dxi() + g.n / 2;
        const double r = std::round(pos);
        node[a] = static_cast<int>(r);
        if (std::abs(pos - r) > 1e-12 || node[a] < 0 || node[a] >= g.n) on_node = false;
    }
    if (on_node) return fhat.values[fhat.index(node)];

    std::vector<cplx> work(fhat.values.begin(), fhat.values.end());
    std::size_t inner = 1;
    for (int a = 1; a < g.dim; ++a) inner *= g.n;
    for (int a = 0; a < g.dim; ++a) {
        const std::vector<cplx> w = dirichlet_weights(g, point[a]);
        std::vector<cplx> next(inner);
        contract_axis(work, 1, g.n, inner, w, next);
        work.swap(next);
        inner = (a + 1 < g.dim) ? inner / g.n : 1;
    }
    return work[0];
}

} // namespace rlab
