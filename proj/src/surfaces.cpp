#include "rlab/surfaces.hpp"

#include <cmath>

#include "rlab/fft.hpp"
#include "rlab/interpolation.hpp"
#include "rlab/quadrature.hpp"
#include "rlab/tensor.hpp"

namespace rlab {

int ambient_dim(const SurfaceSpec& s) {
    return std::visit(
        [](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Sphere>) return v.ambient_dim;
            if constexpr (std::is_same_v<T, ConeGraph>) return v.base_dim + 1;
            if constexpr (std::is_same_v<T, MGraph>) return 4;
            if constexpr (std::is_same_v<T, MFGraph>) return 4;
            if constexpr (std::is_same_v<T, HyperplaneGraph>) return v.base_dim + 1;
        },
        s);
}

bool is_graph(const SurfaceSpec& s) { return !std::holds_alternative<Sphere>(s); }

namespace {

double norm2(std::span<const double> xi) {
    double a = 0.0;
    for (double c : xi) a += c * c;
    return a;
}

void validate_graph(const SurfaceSpec& s) {
    if (const auto* c = std::get_if<ConeGraph>(&s)) {
        require(c->slope != 0.0, "ConeGraph: slope 0 degenerates to a hyperplane; use HyperplaneGraph");
        require(c->base_dim >= 2 && c->base_dim <= 3, "ConeGraph: base dimension must be 2 or 3");
    } else if (const auto* m = std::get_if<MFGraph>(&s)) {
        require(m->froude > 1.0 && std::isfinite(m->froude), "MFGraph: F must lie in (1, inf)");
    }
}

} // namespace

double graph_value(const SurfaceSpec& s, std::span<const double> xi) {
    const double r = std::sqrt(norm2(xi));
    if (const auto* c = std::get_if<ConeGraph>(&s)) return c->slope * r;
    if (std::get_if<MGraph>(&s)) return r > 0.0 ? xi[2] / r : 0.0;
    if (const auto* m = std::get_if<MFGraph>(&s)) {
        if (r == 0.0) return 0.0;
        const double F = m->froude;
        const double xif = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + F * F * xi[2] * xi[2]);
        return xif / (F * r);
    }
    if (const auto* h = std::get_if<HyperplaneGraph>(&s)) return h->height;
    throw ValidationError("graph_value: not a graph surface");
}

double graph_weight(const SurfaceSpec& s, std::span<const double> xi) {
    const double r2 = norm2(xi);
    if (std::get_if<ConeGraph>(&s)) return r2 > 0.0 ? 1.0 / std::sqrt(r2) : 0.0;
    if (std::get_if<MGraph>(&s) || std::get_if<MFGraph>(&s)) return r2 > 0.0 ? 1.0 / r2 : 0.0;
    if (std::get_if<HyperplaneGraph>(&s)) return 1.0;
    throw ValidationError("graph_weight: not a graph surface");
}

SphereRule circle_rule(double radius, int m) {
    require(radius > 0.0 && m >= 4, "circle_rule: need radius > 0 and m >= 4");
    SphereRule r;
    const double dtheta = 2.0 * kPi / m;
    for (int i = 0; i < m; ++i) {
        const double th = i * dtheta;
        r.points.push_back({radius * std::cos(th), radius * std::sin(th), 0.0});
        r.weights.push_back(radius * dtheta); // arclength
    }
    return r;
}

SphereRule sphere_rule(double radius, int n_theta, int n_phi) {
    require(radius > 0.0 && n_theta >= 2 && n_phi >= 4, "sphere_rule: degenerate node counts");
    SphereRule r;
    const Rule1D gl = gauss_legendre(n_theta); // in cos(theta)
    const double dphi = 2.0 * kPi / n_phi;
    for (int i = 0; i < n_theta; ++i) {
        const double c = gl.nodes[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (int j = 0; j < n_phi; ++j) {
            const double ph = j * dphi;
            r.points.push_back({radius * s * std::cos(ph), radius * s * std::sin(ph), radius * c});
            r.weights.push_back(radius * radius * gl.weights[i] * dphi);
        }
    }
    return r;
}

namespace {

SurfaceTrace sphere_trace(const Field& fhat, const Sphere& sp) {
    const GridSpec& g = fhat.grid;
    require(g.dim == sp.ambient_dim, "restrict_to_surface: grid dim must match sphere ambient dim");
    require(sp.ambient_dim == 2 || sp.ambient_dim == 3, "restrict_to_surface: spheres live in R^2 or R^3");
    require(sp.radius > 0.0 && sp.radius <= g.xi_max(),
            "restrict_to_surface: sphere radius outside the frequency box");

    SurfaceTrace tr;
    if (sp.ambient_dim == 2) {
        const int m = sp.node_count > 0 ? sp.node_count : 4 * g.n;
        const SphereRule rule = circle_rule(sp.radius, m);
        tr.weights = rule.weights;
        tr.values.resize(rule.points.size());
        for (std::size_t i = 0; i < rule.points.size(); ++i) {
            const std::array<double, 2> p{rule.points[i][0], rule.points[i][1]};
            tr.values[i] = interpolate_spectrum(fhat, p);
            tr.nodes.push_back({p[0], p[1], 0.0, 0.0});
        }
        return tr;
    }

    // S^2: share the axis-2 contraction across each polar ring.
    int n_theta = 2 * g.n, n_phi = 4 * g.n;
    if (sp.node_count > 0) {
        n_theta = sp.node_count;
        n_phi = 2 * sp.node_count;
    }
    const Rule1D gl = gauss_legendre(n_theta);
    const double dphi = 2.0 * kPi / n_phi;
    Field slice(g.reduced(), Side::Frequency);
    slice.transformed = {true, true, false, false};
    for (int i = 0; i < n_theta; ++i) {
        const double c = gl.nodes[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        const double z = sp.radius * c;
        const std::vector<cplx> wz = dirichlet_weights(g, z);
        slice.values = contract_axis_field(fhat, 2, wz);
        const double ring_r = sp.radius * s;
        for (int j = 0; j < n_phi; ++j) {
            const double ph = j * dphi;
            const std::array<double, 2> p{ring_r * std::cos(ph), ring_r * std::sin(ph)};
            tr.values.push_back(interpolate_spectrum(slice, p));
            tr.nodes.push_back({p[0], p[1], z, 0.0});
            tr.weights.push_back(sp.radius * sp.radius * gl.weights[i] * dphi);
        }
    }
    return tr;
}

SurfaceTrace graph_trace_impl(const Field& part, const SurfaceSpec& spec) {
    validate_graph(spec);
    const GridSpec& g = part.grid;
    require(g.dim == ambient_dim(spec), "restrict_to_surface: grid dim must match surface ambient dim");
    const int last = g.dim - 1;
    const int n = g.n;
    const double ximax = g.xi_max();

    if (const auto* h = std::get_if<HyperplaneGraph>(&spec))
        require(std::abs(h->height) <= ximax, "restrict_to_surface: hyperplane height outside last-axis range");

    const double dx = g.dx();
    const double cell = std::pow(g.dxi(), g.dim - 1);

    SurfaceTrace tr;
    std::array<int, 4> idx{0, 0, 0, 0};
    std::array<double, 4> xi{0.0, 0.0, 0.0, 0.0};
    std::size_t base_count = 1;
    for (int a = 0; a < last; ++a) base_count *= n;
    tr.nodes.reserve(base_count);

    const cplx* data = part.values.data();
    for (std::size_t b = 0; b < base_count; ++b) {
        for (int a = 0; a < last; ++a) xi[a] = g.xi(idx[a]);
        const std::span<const double> base(xi.data(), last);
        const double w = graph_weight(spec, base);
        const double r2 = norm2(base);
        if (w > 0.0 && r2 <= ximax * ximax * (1.0 + 1e-12)) {
            const double phi = graph_value(spec, base);
            if (std::abs(phi) <= ximax) {
                // dx * sum_j exp(-i phi x_j) part(xi, x_j)
                const cplx* row = data + b * n;
                const cplx step = std::polar(1.0, -dx * phi);
                cplx cur;
                double re = 0.0, im = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (j % 16 == 0) cur = std::polar(1.0, -g.x(j) * phi);
                    const double ar = row[j].real(), ai = row[j].imag();
                    re += ar * cur.real() - ai * cur.imag();
                    im += ar * cur.imag() + ai * cur.real();
                    cur *= step;
                }
                std::array<double, 4> node{0.0, 0.0, 0.0, 0.0};
                for (int a = 0; a < last; ++a) node[a] = xi[a];
                node[last] = phi;
                tr.nodes.push_back(node);
                tr.values.push_back(cplx(re, im) * dx);
                tr.weights.push_back(w * cell);
            }
        }
        for (int a = last - 1; a >= 0; --a) {
            if (++idx[a] < n) break;
            idx[a] = 0;
        }
    }
    return tr;
}

} // namespace

namespace detail {
SurfaceTrace graph_trace_partial(const Field& part, const SurfaceSpec& spec) {
    const int last = part.grid.dim - 1;
    for (int a = 0; a < last; ++a)
        require(part.transformed[a], "graph_trace_partial: leading axes must be transformed");
    require(!part.transformed[last], "graph_trace_partial: last axis must stay physical");
    return graph_trace_impl(part, spec);
}
} // namespace detail

SurfaceTrace restrict_to_surface(const Field& fhat, const SurfaceSpec& spec) {
    require(fhat.side == Side::Frequency && fhat.fully_transformed(),
            "restrict_to_surface: field must be fully frequency-side");
    if (const auto* sp = std::get_if<Sphere>(&spec)) return sphere_trace(fhat, *sp);
    Field part = partial_inverse_transform(fhat, fhat.grid.dim - 1);
    return graph_trace_impl(part, spec);
}

double trace_lq_norm(const SurfaceTrace& trace, double q) {
    require(q >= 1.0, "trace_lq_norm: q must be >= 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < trace.values.size(); ++i)
        acc += trace.weights[i] * std::pow(std::abs(trace.values[i]), q);
    return std::pow(acc, 1.0 / q);
}

Field extension_operator(const Field& density, const SurfaceSpec& spec, double t) {
    require(is_graph(spec), "extension_operator: spec must be a graph surface");
    validate_graph(spec);
    require(density.side == Side::Frequency && density.fully_transformed(),
            "extension_operator: density must be frequency-side on the base grid");
    const GridSpec& g = density.grid;
    require(g.dim == ambient_dim(spec) - 1, "extension_operator: density grid must match the base dimension");

    Field mult = density;
    std::array<int, 4> idx{0, 0, 0, 0};
    std::array<double, 4> xi{0.0, 0.0, 0.0, 0.0};
    for (std::size_t lin = 0; lin < mult.values.size(); ++lin) {
        for (int a = 0; a < g.dim; ++a) xi[a] = g.xi(idx[a]);
        const std::span<const double> p(xi.data(), g.dim);
        const double w = graph_weight(spec, p);
        if (w == 0.0)
            mult.values[lin] = cplx{};
        else
            mult.values[lin] *= w * std::polar(1.0, t * graph_value(spec, p));
        for (int a = g.dim - 1; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    return inverse_transform(mult);
}

SurfaceTrace product_restrict(const Field& fhat, const SurfaceSpec& a, const SurfaceSpec& b) {
    require(fhat.side == Side::Frequency && fhat.fully_transformed(),
            "product_restrict: field must be fully frequency-side");
    const int da = ambient_dim(a), db = ambient_dim(b);
    require(da + db == fhat.grid.dim, "product_restrict: factor dimensions must add up to the grid dim");
    const auto* sa = std::get_if<Sphere>(&a);
    const auto* sb = std::get_if<Sphere>(&b);
    require(sa && sb && sa->ambient_dim == 2 && sb->ambient_dim == 2,
            "product_restrict: desk scale supports products of circles in R^2 x R^2");

    const GridSpec& g = fhat.grid;
    const int n = g.n;
    require(sa->radius <= g.xi_max() && sb->radius <= g.xi_max(),
            "product_restrict: circle radius outside the frequency box");
    const SphereRule ra = circle_rule(sa->radius, sa->node_count > 0 ? sa->node_count : 4 * n);
    const SphereRule rb = circle_rule(sb->radius, sb->node_count > 0 ? sb->node_count : 4 * n);

    // Contract axes 3 then 2 for a block of B nodes at a time (GEMM shape),
    // then interpolate axes (0,1) per node pair.
    const std::size_t nb = rb.points.size();
    const std::size_t na = ra.points.size();
    SurfaceTrace tr;
    tr.nodes.reserve(na * nb);
    tr.values.assign(na * nb, cplx{});
    tr.weights.reserve(na * nb);

    const std::size_t block = 16;
    std::vector<cplx> w3(n * block), stage(static_cast<std::size_t>(n) * n * n * block);
    GridSpec g2 = g;
    g2.dim = 2;
    Field slice(g2, Side::Frequency);
    slice.transformed = {true, true, false, false};

    for (std::size_t b0 = 0; b0 < nb; b0 += block) {
        const std::size_t bs = std::min(block, nb - b0);
        // weight matrix for axis 3 over this node block
        for (int k = 0; k < n; ++k)
            for (std::size_t m = 0; m < bs; ++m) w3[k * bs + m] = cplx{};
        for (std::size_t m = 0; m < bs; ++m) {
            const std::vector<cplx> wv = dirichlet_weights(g, rb.points[b0 + m][1]);
            for (int k = 0; k < n; ++k) w3[k * bs + m] = wv[k];
        }
        // stage[(x0,x1,k2), m] = sum_k3 fhat[(x0,x1,k2,k3)] w3[k3, m]
        std::fill(stage.begin(), stage.begin() + static_cast<std::size_t>(n) * n * n * bs, cplx{});
        zgemm_acc(fhat.values, static_cast<std::size_t>(n) * n * n, n,
                  std::span<const cplx>(w3.data(), n * bs), bs,
                  std::span<cplx>(stage.data(), static_cast<std::size_t>(n) * n * n * bs));

        for (std::size_t m = 0; m < bs; ++m) {
            // pull out the axis-2 contraction for this node
            const std::vector<cplx> w2 = dirichlet_weights(g, rb.points[b0 + m][0]);
            for (int x0 = 0; x0 < n; ++x0)
                for (int x1 = 0; x1 < n; ++x1) {
                    cplx acc{};
                    const cplx* src = stage.data() + ((static_cast<std::size_t>(x0) * n + x1) * n) * bs + m;
                    for (int k2 = 0; k2 < n; ++k2) acc += src[static_cast<std::size_t>(k2) * bs] * w2[k2];
                    slice.values[static_cast<std::size_t>(x0) * n + x1] = acc;
                }
            for (std::size_t ia = 0; ia < na; ++ia) {
                const std::array<double, 2> p{ra.points[ia][0], ra.points[ia][1]};
                tr.values[ia * nb + (b0 + m)] = interpolate_spectrum(slice, p);
            }
        }
    }
    for (std::size_t ia = 0; ia < na; ++ia)
        for (std::size_t ib = 0; ib < nb; ++ib) {
            tr.nodes.push_back({ra.points[ia][0], ra.points[ia][1], rb.points[ib][0], rb.points[ib][1]});
            tr.weights.push_back(ra.weights[ia] * rb.weights[ib]);
        }
    return tr;
}

} // namespace rlab
