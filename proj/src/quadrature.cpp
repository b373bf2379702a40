#include "rlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "rlab/grid.hpp"

namespace rlab {

Rule1D gauss_legendre(int n) {
    require(n >= 1, "gauss_legendre: need at least one node");
    Rule1D r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton from the Chebyshev-like initial guess
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

Rule1D composite_gauss(double a, double b, int panels, int order) {
    const Rule1D base = gauss_legendre(order);
    Rule1D r;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int i = 0; i < order; ++i) {
            r.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
            r.weights.push_back(0.5 * h * base.weights[i]);
        }
    }
    return r;
}

Rule1D log_grid(double a, double b, int n) {
    require(a > 0.0 && b > a && n >= 1, "log_grid: need 0 < a < b and n >= 1");
    Rule1D r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double dl = std::log(b / a) / n;
    for (int i = 0; i < n; ++i) {
        const double t = a * std::exp((i + 0.5) * dl);
        r.nodes[i] = t;
        r.weights[i] = t * dl;
    }
    return r;
}

double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double s0 = std::exp(-1.0 / u);
    const double s1 = std::exp(-1.0 / (1.0 - u));
    return s0 / (s0 + s1);
}

namespace {

// g = (1+x^2)^{-1/2} and its first three derivatives, for the IBP tail
// series  int_X^inf e^{i tau x} g dx = sum_k (-1)^{k+1} g^(k)(X) e^{i tau X}/(i tau)^{k+1}.
double g0(double x) { return 1.0 / std::sqrt(1.0 + x * x); }
double g1(double x) { return -x * std::pow(1.0 + x * x, -1.5); }
double g2(double x) { return (2.0 * x * x - 1.0) * std::pow(1.0 + x * x, -2.5); }
double g3(double x) { return (9.0 * x - 6.0 * x * x * x) * std::pow(1.0 + x * x, -3.5); }

double tail_cos(double tau, double X) {
    // Re of the series above, tau > 0.
    const double c = std::cos(tau * X), s = std::sin(tau * X);
    const double it = 1.0 / tau;
    // (i tau)^{-1} = -i/tau ; real parts alternate between sin and cos terms
    const double t0 = -(g0(X)) * (s * it);                  // -g/(i tau) -> Re = -g * sin/tau * ...
    const double t1 = g1(X) * (-c * it * it);               // +g'/(i tau)^2 = -g' / tau^2 * e^{i tau X}
    const double t2 = -(g2(X)) * (-s * it * it * it);       // -g''/(i tau)^3 ; Re = +g'' sin/tau^3 ...
    const double t3 = g3(X) * (c * it * it * it * it);      // +g'''/(i tau)^4
    return t0 + t1 + t2 + t3;
}

} // namespace

double inverse_sqrt_profile_transform(double tau, double cutoff) {
    tau = std::abs(tau);
    require(tau >= 1e-7, "inverse_sqrt_profile_transform: tau too close to zero");
    // The IBP remainder decays like (tau X)^-5, so push the cutoff out for
    // small tau; graded panels track both the x~1 profile scale and the
    // 1/tau oscillation scale.
    const double X = std::max(cutoff, 24.0 / tau);
    const Rule1D base = gauss_legendre(8);
    double acc = 0.0;
    double x = 0.0;
    while (x < X) {
        double h = std::max(0.125, 0.25 * x);
        h = std::min({h, 0.5 * kPi / tau, X - x});
        const double mid = x + 0.5 * h;
        for (std::size_t i = 0; i < base.nodes.size(); ++i) {
            const double t = mid + 0.5 * h * base.nodes[i];
            acc += 0.5 * h * base.weights[i] * std::cos(tau * t) * g0(t);
        }
        x += h;
    }
    return 2.0 * (acc + tail_cos(tau, X));
}

double inverse_sqrt_profile_truncated(double tau, double T) {
    require(T > 0.0, "inverse_sqrt_profile_truncated: T must be positive");
    tau = std::abs(tau);
    const Rule1D base = gauss_legendre(8);
    double acc = 0.0, x = 0.0;
    while (x < T) {
        double h = std::max(0.125, 0.25 * x);
        if (tau > 0.0) h = std::min(h, 0.5 * kPi / tau);
        h = std::min(h, T - x);
        const double mid = x + 0.5 * h;
        for (std::size_t i = 0; i < base.nodes.size(); ++i) {
            const double t = mid + 0.5 * h * base.nodes[i];
            acc += 0.5 * h * base.weights[i] * std::cos(tau * t) * g0(t);
        }
        x += h;
    }
    return 2.0 * acc;
}

} // namespace rlab
