#pragma once
// Surfaces with their measures, spectrum restriction to them, and the
// adjoint extension realized through graph dispersion relations.
//
// Graph surfaces {(xi, phi(xi))} carry measure weight w(xi):
//   ConeGraph   phi = rho|xi|,            w = 1/|xi|
//   MGraph      phi = xi_3/|xi|  (d=3),   w = 1/|xi|^2
//   MFGraph     phi = |xi|_F/(F|xi|),     w = 1/|xi|^2,  |xi|_F^2 = |xi_h|^2 + F^2 xi_3^2
//   Hyperplane  phi = const,              w = 1
// Spheres use the standard surface-area measure with product quadrature.

#include <array>
#include <span>
#include <variant>
#include <vector>

#include "rlab/grid.hpp"

namespace rlab {

struct Sphere {
    int ambient_dim = 2; // 2: circle in R^2, 3: sphere in R^3
    double radius = 1.0;
    int node_count = 0;  // 0: defaults (4N circle, 2N x 4N sphere)
};
struct ConeGraph {
    int base_dim = 2; // surface lives in R^{base_dim+1}
    double slope = 1.0;
};
struct MGraph {};
struct MFGraph {
    double froude = 2.0; // F in (1, inf)
};
struct HyperplaneGraph {
    int base_dim = 2;
    double height = 0.0;
};

using SurfaceSpec = std::variant<Sphere, ConeGraph, MGraph, MFGraph, HyperplaneGraph>;

int ambient_dim(const SurfaceSpec& s);
bool is_graph(const SurfaceSpec& s);
// phi(xi) and w(xi) for graph specs; xi is the base-frequency point.
double graph_value(const SurfaceSpec& s, std::span<const double> xi);
double graph_weight(const SurfaceSpec& s, std::span<const double> xi);

struct SurfaceTrace {
    std::vector<std::array<double, 4>> nodes; // embedded points (xi, phi) / sphere points
    std::vector<cplx> values;
    std::vector<double> weights; // strictly positive, measure x cell
};

struct SphereRule {
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;
};
SphereRule circle_rule(double radius, int m);
SphereRule sphere_rule(double radius, int n_theta, int n_phi);

// fhat fully frequency-side. Sphere values come from band-limited
// interpolation at the quadrature nodes; graph values from 1-D band-limited
// interpolation along the last axis at (xi, phi(xi)). Graph nodes are kept
// when 0 < |xi| <= xi_max and |phi(xi)| <= xi_max (grid truncation of the
// non-compact surfaces; singular-weight origin excluded).
SurfaceTrace restrict_to_surface(const Field& fhat, const SurfaceSpec& spec);

// (sum weights |values|^q)^{1/q}
double trace_lq_norm(const SurfaceTrace& trace, double q);

// Physical-side field: inverse transform of xi -> e^{i t phi(xi)} g(xi) w(xi).
// g is a frequency-side density on the base grid; the origin mode is dropped
// where w is singular.
Field extension_operator(const Field& density, const SurfaceSpec& spec, double t);

// Trace on A x B with product nodes and weights. Desk scale: both specs are
// circles in R^2 (the only sphere product fitting the dim <= 4 guard).
SurfaceTrace product_restrict(const Field& fhat, const SurfaceSpec& a, const SurfaceSpec& b);

namespace detail {
// Graph trace from the representation with all leading axes transformed and
// the last axis physical (what the chain verifier caches anyway).
SurfaceTrace graph_trace_partial(const Field& part, const SurfaceSpec& spec);
} // namespace detail

} // namespace rlab
