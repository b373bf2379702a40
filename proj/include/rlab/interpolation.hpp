#pragma once
// Band-limited evaluation of spectra at off-grid frequencies.
//
// The interpolant is the trigonometric polynomial with the physical samples
// as coefficients: fhat(t) = dx^d sum_j exp(-i x_j . t) f(x_j). Against
// frequency samples this is a Dirichlet-kernel sum with weights
// W(xi_k - t), W(theta) = (1/N) sum_j exp(i x_j theta), which reproduces the
// stored grid values and is exact on pure grid modes.

#include <span>
#include <vector>

#include "rlab/grid.hpp"

namespace rlab {

// Weights for interpolating a frequency-side axis at target t:
// value = sum_k data[k] * w[k].
std::vector<cplx> dirichlet_weights(const GridSpec& g, double t);

// Weights dx * exp(-i x_j t) that carry a physical axis to frequency t
// (a partial transform at one arbitrary frequency).
std::vector<cplx> physical_phase_weights(const GridSpec& g, double t);

// Fully frequency-side field evaluated at an arbitrary point in the box.
// O(N^dim) per point by direct summation.
cplx interpolate_spectrum(const Field& fhat, std::span<const double> point);

} // namespace rlab
