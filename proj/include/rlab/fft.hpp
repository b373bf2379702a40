#pragma once
// Centered discrete transforms in the integral convention of grid.hpp,
// backed by FFTW. The centered x/xi grids are handled with exact (-1)^j
// pre/post sign flips, so round trips are bit-clean up to FFTW arithmetic.

#include <array>

#include "rlab/grid.hpp"

namespace rlab {

// All axes, physical -> frequency. fhat(xi_k) ~= int exp(-i x.xi_k) f(x) dx.
Field forward_transform(const Field& f);

// All axes, frequency -> physical.
Field inverse_transform(const Field& fhat);

// One axis only; result tagged frequency with the axis marked in
// Field::transformed (mixed sides are not modeled beyond that metadata).
Field partial_transform(const Field& f, int axis);

// Inverse of a single-axis transform.
Field partial_inverse_transform(const Field& f, int axis);

namespace detail {
// In-place centered transform along the axes selected by `axes`.
// sign = -1 forward (adds dx per axis), +1 inverse (adds dxi/2pi per axis).
void transform_axes(Field& f, const std::array<bool, 4>& axes, int sign);
} // namespace detail

} // namespace rlab
