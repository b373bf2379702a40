#pragma once
// The two failure families: the slowly-decaying hyperplane profile
// phi(x')/sqrt(1+x_d^2), whose partial transform diverges logarithmically at
// the zero frequency, and the anisotropically squeezed family h_R whose
// trace on the d=2 surface {(xi, xi_2/|xi|)} outgrows every fixed constant
// while ||h_R||_{L^p} stays put.

#include <map>
#include <vector>

#include "rlab/grid.hpp"

namespace rlab {

struct CounterexampleReport {
    std::vector<double> parameters;    // truncations T or scales R, increasing
    std::vector<double> surface_value; // per-parameter surface-side value
    std::vector<double> data_norm;     // per-parameter L^p norm of the datum
    std::vector<double> ratio;         // surface value over data norm
    bool ratio_increasing = false;
    std::map<std::string, std::vector<double>> extras;
};

// Truncated partial transform of 1/sqrt(1+x^2) at the zero frequency per
// truncation T (grows like 2 log T), with the L^p norms of
// h = phi(x_1)/sqrt(1+x_2^2) recorded for p in {1.5, 2}.
CounterexampleReport hyperplane_failure(double profile_width,
                                        const std::vector<double>& truncations);

struct FlatnessProfile {
    double inner = 0.3;       // radial support of psi-hat starts here
    double edge = 0.12;       // transition width at |xi_1| = inner and 1
    double cone_margin = 0.3; // transition of the |xi_2| <= |xi_1| cutoff
};

// The h_R = psi(R x_1, x_2/R) f(x_3) family on the d=2 flat surface with
// measure d xi. Per R: the L^p norm (constant in R by the unit Jacobian),
// the lower bound inf_{|tau| <= 1/R} |fhat(tau)| ||psi-hat||_{L^q}, and the
// directly computed trace norm; the ratio column must increase without
// saturating.
CounterexampleReport m_flatness_family(const FlatnessProfile& profile,
                                       const std::vector<double>& r_values, double p,
                                       double q);

namespace detail {
// exact-support spectrum of psi: C-infinity, contained in
// { |xi_2| <= |xi_1|, inner-ish <= |xi_1| <= 1 }
double flatness_psi_hat(const FlatnessProfile& prof, double xi1, double xi2);
} // namespace detail

} // namespace rlab
