#pragma once
// Lebesgue, mixed and homogeneous Sobolev norms on grid fields, plus the
// exact exponent bookkeeping p0 = 2(d+1)/(d+3), alpha = 1/p0', s = alpha - 1/2.

#include <vector>

#include "rlab/grid.hpp"

namespace rlab {

struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);
    static Rational parse(const std::string& text); // "6/5" or "2"

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    Rational operator+(const Rational& o) const { return {num * o.den + o.num * den, den * o.den}; }
    Rational operator-(const Rational& o) const { return {num * o.den - o.num * den, den * o.den}; }
    Rational operator*(const Rational& o) const { return {num * o.num, den * o.den}; }
    Rational operator/(const Rational& o) const { return {num * o.den, den * o.num}; }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

struct ExponentProfile {
    int d = 2;
    Rational p0;       // 2(d+1)/(d+3)
    Rational p0_prime; // conjugate exponent
    Rational alpha;    // (d-1)/(2(d+1)) = 1/p0'
    Rational s;        // alpha - 1/2 = -1/(d+1)
};

ExponentProfile exponent_profile(int d); // d >= 2

// Riemann-sum L^p norm; the cell volume follows the field's side
// (dx^dim physical, dxi^dim frequency). p = inf is the max modulus.
double lp_norm(const Field& f, double p);

// Nested norm: the r-norm over `inner_axes` first, then the q-norm of the
// result over `outer_axes`. The two sets must partition the field's axes.
double mixed_norm(const Field& f, const std::vector<int>& outer_axes,
                  const std::vector<int>& inner_axes, double q_outer, double r_inner);

// Homogeneous Sobolev norm (sum |xi|^2s |fhat|^2 dxi^dim)^(1/2) of a
// physical-side field. The xi = 0 mode is dropped for s < 0 (one-cell
// mollification of the non-integrable discrete point mass); for s = 0 it
// carries weight 1 so that Plancherel holds literally.
double sobolev_norm(const Field& f, double s);

struct ReducedField {
    GridSpec grid; // dim reduced by one
    std::vector<double> values;
};

// Per-slice 1-D homogeneous Sobolev norm along `axis`, s > -1/2.
ReducedField sobolev_norm_along_axis(const Field& f, int axis, double s);

} // namespace rlab
