#pragma once
// 1-D quadrature building blocks: Gauss-Legendre rules, geometric grids for
// integrals with endpoint weight singularities, an exact-support smoothstep,
// and the tail-corrected oscillatory transform of 1/sqrt(1+x^2) used by the
// counterexample oracles.

#include <functional>
#include <vector>

namespace rlab {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1].
Rule1D gauss_legendre(int n);

// Composite Gauss-Legendre on [a, b] with `panels` panels of `order` points.
Rule1D composite_gauss(double a, double b, int panels, int order);

// Geometric midpoint rule for int_a^b g(t) dt, 0 < a < b: nodes at the
// log-midpoints, weights t_i * dlog t. Integrable endpoint singularities get
// their clip distance from `a`.
Rule1D log_grid(double a, double b, int n);

// C-infinity transition: 0 for u <= 0, 1 for u >= 1, exp(-1/u)-based between.
double smoothstep(double u);

// Fourier transform of g(x) = 1/sqrt(1+x^2):
//   ghat(tau) = 2 int_0^inf cos(tau x) g(x) dx   ( = 2 K_0(|tau|) )
// computed by composite quadrature on [0, X] plus an integration-by-parts
// tail series at X; this is the quadrature oracle, the Bessel identity only
// cross-checks it in tests.
double inverse_sqrt_profile_transform(double tau, double cutoff = 512.0);

// Same integrand truncated to |x| <= T, no tail correction:
//   int_{|x|<=T} exp(-i tau x) g(x) dx  (real by symmetry).
double inverse_sqrt_profile_truncated(double tau, double T);

} // namespace rlab
