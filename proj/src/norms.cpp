#include "rlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rlab/fft.hpp"

namespace rlab {

Rational::Rational(long long n, long long d) : num(n), den(d) {
    require(den != 0, "Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(std::abs(num), den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational Rational::parse(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return {std::stoll(text), 1};
        return {std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1))};
    } catch (const std::exception&) {
        throw ValidationError("Rational::parse: cannot parse '" + text + "'");
    }
}

ExponentProfile exponent_profile(int d) {
    require(d >= 2, "exponent_profile: d must be >= 2");
    ExponentProfile e;
    e.d = d;
    e.p0 = Rational(2 * (d + 1), d + 3);
    e.p0_prime = Rational(2 * (d + 1), d - 1);
    e.alpha = Rational(d - 1, 2 * (d + 1));
    e.s = e.alpha - Rational(1, 2);
    return e;
}

namespace {

double cell_volume(const Field& f) {
    const double h = f.side == Side::Physical ? f.grid.dx() : f.grid.dxi();
    return std::pow(h, f.grid.dim);
}

} // namespace

double lp_norm(const Field& f, double p) {
    require(p >= 1.0, "lp_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const cplx& v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    double acc = 0.0;
    for (const cplx& v : f.values) acc += std::pow(std::abs(v), p);
    return std::pow(acc * cell_volume(f), 1.0 / p);
}

double mixed_norm(const Field& f, const std::vector<int>& outer_axes,
                  const std::vector<int>& inner_axes, double q_outer, double r_inner) {
    require(q_outer >= 1.0 && r_inner >= 1.0, "mixed_norm: exponents must be >= 1");
    const int d = f.grid.dim;
    std::vector<int> seen(d, 0);
    for (int a : outer_axes) {
        require(a >= 0 && a < d, "mixed_norm: axis out of range");
        seen[a]++;
    }
    for (int a : inner_axes) {
        require(a >= 0 && a < d, "mixed_norm: axis out of range");
        seen[a]++;
    }
    for (int a = 0; a < d; ++a)
        require(seen[a] == 1, "mixed_norm: axes must partition the dimensions");

    const int n = f.grid.n;
    const double h = f.side == Side::Physical ? f.grid.dx() : f.grid.dxi();
    const double cell_in = std::pow(h, static_cast<double>(inner_axes.size()));
    const double cell_out = std::pow(h, static_cast<double>(outer_axes.size()));

    std::size_t n_out = 1;
    for (std::size_t i = 0; i < outer_axes.size(); ++i) n_out *= n;
    std::size_t n_in = f.values.size() / n_out;

    const bool q_inf = std::isinf(q_outer);
    const bool r_inf = std::isinf(r_inner);

    double acc_out = 0.0;
    std::array<int, 4> idx{0, 0, 0, 0};
    std::vector<int> out_idx(outer_axes.size(), 0);
    for (std::size_t io = 0; io < n_out; ++io) {
        // inner reduction at this outer multi-index
        double acc_in = 0.0;
        std::vector<int> in_idx(inner_axes.size(), 0);
        for (std::size_t ii = 0; ii < n_in; ++ii) {
            for (std::size_t k = 0; k < outer_axes.size(); ++k) idx[outer_axes[k]] = out_idx[k];
            for (std::size_t k = 0; k < inner_axes.size(); ++k) idx[inner_axes[k]] = in_idx[k];
            const double m = std::abs(f.values[f.index(idx)]);
            if (r_inf)
                acc_in = std::max(acc_in, m);
            else
                acc_in += std::pow(m, r_inner);
            for (int k = static_cast<int>(inner_axes.size()) - 1; k >= 0; --k) {
                if (++in_idx[k] < n) break;
                in_idx[k] = 0;
            }
        }
        const double inner_val = r_inf ? acc_in : std::pow(acc_in * cell_in, 1.0 / r_inner);
        if (q_inf)
            acc_out = std::max(acc_out, inner_val);
        else
            acc_out += std::pow(inner_val, q_outer);
        for (int k = static_cast<int>(outer_axes.size()) - 1; k >= 0; --k) {
            if (++out_idx[k] < n) break;
            out_idx[k] = 0;
        }
    }
    return q_inf ? acc_out : std::pow(acc_out * cell_out, 1.0 / q_outer);
}

double sobolev_norm(const Field& f, double s) {
    require(f.side == Side::Physical, "sobolev_norm: field must be physical-side");
    require(s > -0.5 * f.grid.dim, "sobolev_norm: need s > -dim/2");
    const Field fhat = forward_transform(f);
    const GridSpec& g = fhat.grid;
    const int n = g.n;
    double acc = 0.0;
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t lin = 0; lin < fhat.values.size(); ++lin) {
        double xi2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double c = g.xi(idx[a]);
            xi2 += c * c;
        }
        const double m = std::abs(fhat.values[lin]);
        if (xi2 > 0.0) {
            acc += std::pow(xi2, s) * m * m;
        } else if (s == 0.0) {
            acc += m * m; // |xi|^0 = 1 keeps Plancherel literal
        }
        for (int a = g.dim - 1; a >= 0; --a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    return std::sqrt(acc * std::pow(g.dxi(), g.dim));
}

ReducedField sobolev_norm_along_axis(const Field& f, int axis, double s) {
    require(f.side == Side::Physical, "sobolev_norm_along_axis: field must be physical-side");
    require(axis >= 0 && axis < f.grid.dim, "sobolev_norm_along_axis: axis out of range");
    require(f.grid.dim >= 2, "sobolev_norm_along_axis: need dim >= 2");
    require(s > -0.5, "sobolev_norm_along_axis: need s > -1/2");

    const Field ft = partial_transform(f, axis);
    const GridSpec& g = ft.grid;
    const int n = g.n;
    std::size_t outer = 1, inner = 1;
    for (int a = 0; a < axis; ++a) outer *= n;
    for (int a = axis + 1; a < g.dim; ++a) inner *= n;

    ReducedField out{g.reduced(), std::vector<double>(outer * inner, 0.0)};
    for (std::size_t o = 0; o < outer; ++o) {
        for (int k = 0; k < n; ++k) {
            const double xi = g.xi(k);
            double w;
            if (xi == 0.0)
                w = (s == 0.0) ? 1.0 : 0.0;
            else
                w = std::pow(xi * xi, s);
            if (w == 0.0) continue;
            const cplx* src = ft.values.data() + (o * n + k) * inner;
            double* dst = out.values.data() + o * inner;
            for (std::size_t i = 0; i < inner; ++i) dst[i] += w * std::norm(src[i]);
        }
    }
    const double scale = g.dxi();
    for (double& v : out.values) v = std::sqrt(v * scale);
    return out;
}

} // namespace rlab
