#include "rlab/families.hpp"

#include <cmath>
#include <cstdio>

#include "rlab/fft.hpp"
#include "rlab/quadrature.hpp"

namespace rlab {
namespace {

double get_coord(const std::vector<double>& v, int a) {
    return a < static_cast<int>(v.size()) ? v[a] : 0.0;
}

Field sample_gaussian(const Gaussian& fam, const GridSpec& g) {
    require(fam.width > 0.0, "Gaussian: width must be positive");
    for (int a = 0; a < g.dim; ++a)
        require(std::abs(get_coord(fam.center, a)) < g.half_extent,
                "Gaussian: center outside the physical box");
    Field f(g, Side::Physical);
    std::array<int, 4> idx{0, 0, 0, 0};
    const double inv2w2 = 1.0 / (2.0 * fam.width * fam.width);
    for (std::size_t lin = 0; lin < f.values.size(); ++lin) {
        double q = 0.0, phase = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double x = g.x(idx[a]);
            const double dxc = x - get_coord(fam.center, a);
            q += dxc * dxc;
            phase += get_coord(fam.modulation, a) * x;
        }
        f.values[lin] = std::exp(-q * inv2w2) * std::polar(1.0, phase);
        for (int a = g.dim - 1; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    return f;
}

Field sample_tensor(const TensorProduct& fam, const GridSpec& g) {
    require(static_cast<int>(fam.factors.size()) == g.dim,
            "TensorProduct: need one 1-D factor per axis");
    std::vector<std::vector<cplx>> axis_vals(g.dim);
    for (int a = 0; a < g.dim; ++a) {
        const Gaussian1D& fac = fam.factors[a];
        require(fac.width > 0.0, "TensorProduct: factor width must be positive");
        axis_vals[a].resize(g.n);
        for (int j = 0; j < g.n; ++j) {
            const double x = g.x(j);
            const double d = x - fac.center;
            axis_vals[a][j] =
                std::exp(-d * d / (2.0 * fac.width * fac.width)) * std::polar(1.0, fac.modulation * x);
        }
    }
    Field f(g, Side::Physical);
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t lin = 0; lin < f.values.size(); ++lin) {
        cplx v = 1.0;
        for (int a = 0; a < g.dim; ++a) v *= axis_vals[a][idx[a]];
        f.values[lin] = v;
        for (int a = g.dim - 1; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    return f;
}

Field sample_ring(const RingBump& fam, const GridSpec& g) {
    require(fam.inner > 0.0 && fam.inner < fam.outer, "RingBump: need 0 < inner < outer");
    require(fam.outer <= g.xi_max(), "RingBump: outer radius outside the frequency box");
    // annulus indicator mollified by a two-cell Gaussian (erf profile); the
    // support is soft but the physical tails stay below the box boundary
    const double sigma = std::min(2.0 * g.dxi(), 0.25 * (fam.outer - fam.inner));
    const double inv = 1.0 / (std::sqrt(2.0) * sigma);
    Field fhat(g, Side::Frequency);
    for (int a = 0; a < g.dim; ++a) fhat.transformed[a] = true;
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t lin = 0; lin < fhat.values.size(); ++lin) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double c = g.xi(idx[a]);
            r2 += c * c;
        }
        const double r = std::sqrt(r2);
        fhat.values[lin] =
            0.5 * (std::erf((r - fam.inner) * inv) - std::erf((r - fam.outer) * inv));
        for (int a = g.dim - 1; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    return inverse_transform(fhat);
}

Field sample_knapp(const KnappPacket& fam, const GridSpec& g) {
    require(fam.surface.ambient_dim == 2 && g.dim == 2,
            "KnappPacket: desk scale realizes caps on circles in R^2");
    require(fam.delta > 0.0 && fam.delta <= 1.0, "KnappPacket: need 0 < delta <= 1");
    const double R = fam.surface.radius;
    require(R > 0.0 && R * (1.0 + fam.delta) <= g.xi_max(),
            "KnappPacket: cap neighborhood outside the frequency box");
    const double arc_half = 0.5 * R * fam.delta;        // tangential half-extent
    const double thick_half = 0.125 * R * fam.delta * fam.delta; // radial half-extent (sagitta scale)
    require(arc_half * 2.0 >= 4.0 * g.dxi(), "KnappPacket: delta below 4 grid cells");
    require(thick_half >= 4.0 * g.dxi(),
            "KnappPacket: delta^2 thickness unresolved at this grid");
    // Cap-box indicator mollified by Gaussians proportional to the cap
    // extents, so the packet family is self-similar across delta and the
    // L^p norms follow the cap power laws; the guards above keep the
    // mollifier scales resolvable on the grid.
    const double st = arc_half / 6.0, sr = thick_half / 3.0;
    auto box = [](double half, double sg, double t) {
        const double inv = 1.0 / (std::sqrt(2.0) * sg);
        return 0.5 * (std::erf((half - t) * inv) + std::erf((half + t) * inv));
    };
    const double ux = std::cos(fam.cap_angle), uy = std::sin(fam.cap_angle);

    Field fhat(g, Side::Frequency);
    fhat.transformed = {true, true, false, false};
    for (int k0 = 0; k0 < g.n; ++k0)
        for (int k1 = 0; k1 < g.n; ++k1) {
            const double a = g.xi(k0), b = g.xi(k1);
            const double r = std::hypot(a, b);
            if (r == 0.0) continue;
            const double ang = std::atan2(b * ux - a * uy, a * ux + b * uy);
            fhat.values[static_cast<std::size_t>(k0) * g.n + k1] =
                box(arc_half, st, R * ang) * box(thick_half, sr, r - R);
        }
    return inverse_transform(fhat);
}

Field sample_hyperplane(const HyperplaneDecay& fam, const GridSpec& g) {
    require(g.dim >= 2, "HyperplaneDecay: need dim >= 2");
    require(fam.profile_width > 0.0, "HyperplaneDecay: profile width must be positive");
    Field f(g, Side::Physical);
    std::array<int, 4> idx{0, 0, 0, 0};
    const double inv2w2 = 1.0 / (2.0 * fam.profile_width * fam.profile_width);
    for (std::size_t lin = 0; lin < f.values.size(); ++lin) {
        double q = 0.0;
        for (int a = 0; a < g.dim - 1; ++a) {
            const double x = g.x(idx[a]);
            q += x * x;
        }
        const double xd = g.x(idx[g.dim - 1]);
        f.values[lin] = std::exp(-q * inv2w2) / std::sqrt(1.0 + xd * xd);
        for (int a = g.dim - 1; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    return f;
}

} // namespace

Field sample(const TestFunctionFamily& family, const GridSpec& grid, double decay_budget) {
    Field f = std::visit(
        [&](const auto& fam) -> Field {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Gaussian>) return sample_gaussian(fam, grid);
            if constexpr (std::is_same_v<T, RingBump>) return sample_ring(fam, grid);
            if constexpr (std::is_same_v<T, KnappPacket>) return sample_knapp(fam, grid);
            if constexpr (std::is_same_v<T, TensorProduct>) return sample_tensor(fam, grid);
            if constexpr (std::is_same_v<T, HyperplaneDecay>) return sample_hyperplane(fam, grid);
        },
        family);
    const double decay = boundary_decay(f);
    if (decay > decay_budget) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "sample: boundary decay %.3e exceeds the budget %.3e",
                      decay, decay_budget);
        throw ValidationError(msg);
    }
    return f;
}

cplx gaussian_transform(const Gaussian& g, int dim, std::span<const double> xi) {
    const double w = g.width;
    double q = 0.0, phase = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double d = xi[a] - get_coord(g.modulation, a);
        q += d * d;
        phase -= d * get_coord(g.center, a);
    }
    return std::pow(2.0 * kPi, 0.5 * dim) * std::pow(w, dim) * std::exp(-0.5 * w * w * q) *
           std::polar(1.0, phase);
}

} // namespace rlab
