#pragma once
// Step-by-step numerical replay of the restriction-estimate derivations:
// level-set decompositions checked as identities, Minkowski exchanges and
// weight dominations checked literally, and the non-explicit constants
// estimated as suprema over the test family (never asserted against fixed
// values, only against trends and invariances).

#include <map>
#include <stdexcept>

#include "rlab/families.hpp"
#include "rlab/grid.hpp"
#include "rlab/norms.hpp"
#include "rlab/surfaces.hpp"

namespace rlab {

struct ChainStepError : std::runtime_error {
    std::string step;
    ChainStepError(std::string step_, const std::string& msg)
        : std::runtime_error(msg), step(std::move(step_)) {}
};

struct ChainStep {
    std::string label;
    std::string anchor;  // which move of the argument this replays
    double left = 0.0;
    double right = 0.0;
    double constant = 1.0; // left <= constant * right with this recorded value
    bool identity = false; // |left - right| <= tol * right enforced
    bool literal = false;  // left <= right with slack >= -1e-12 enforced
};

struct ChainReport {
    std::string chain;
    std::vector<ChainStep> steps;
    double lhs = 0.0;            // trace-side norm
    double rhs = 0.0;            // data-side norm
    double achieved_ratio = 0.0; // lhs / rhs
    double bound_constant = 0.0; // sqrt of the product of step constants
    double clip_distance = 0.0;  // singularity standoff of the level grids
    std::map<std::string, double> params;
};

struct RatioEstimate {
    double parameter = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
    double compensated = 0.0;
};

struct ChainOptions {
    double identity_tol = 0.01;    // level-decomposition identity tolerance
    double literal_slack = 1e-12;  // allowed negative slack on literal steps
    int level_points = 0;          // points of the level grid (0 -> 4N)
    int extension_points = 24;     // extra points per side for full-line weights
    double mu_span = 8.0;          // half-width of the full-line extension in mu
    bool throw_on_failure = true;  // abort with the step label vs record only
};

// ---- cone over spheres ------------------------------------------------------

struct PolarIdentity {
    double left = 0.0;   // squared cone-trace norm, graph pathway
    double right = 0.0;  // sphere-integrated pathway over the level grid
    double rel_error = 0.0;
};
// f physical over R^{d+1}, d in {2,3}; the sphere pathway is the reference.
PolarIdentity polar_identity_check(const Field& f, const ChainOptions& opts = {});

ChainReport verify_cone_chain(const Field& f, const ChainOptions& opts = {});

struct ScalingSweepOptions {
    int n = 128;
    double base_half_extent = 16.0; // grid for R = 1; scaled near-proportionally
    double p = 0.0;                 // 0 -> p0(d)
};
// Base family dilated to each radius (f -> f(R x) on an R-scaled grid);
// compensated column is ratio / R^alpha.
std::vector<RatioEstimate> sphere_scaling_sweep(const Gaussian& base, int d,
                                                const std::vector<double>& radii,
                                                const ScalingSweepOptions& opts = {});

struct SlopeSweepOptions {
    int n = 192;
    double half_extent = 25.0;
    double modulation = 1.0;  // base packet rides the unit cone at this |xi_h|
    double width = 2.0;
};
// Base packet rescaled in x_3 per slope; compensated column is ratio * |rho|^{1/6}.
std::vector<RatioEstimate> cone_slope_sweep(const std::vector<double>& slopes,
                                            const SlopeSweepOptions& opts = {});

// ---- M and M_F over cones ---------------------------------------------------

struct JacobianCheck {
    double xi3 = 0.0;
    double dxi3_dmu = 0.0;
    double xi_norm2 = 0.0;
    double fd_rel_error = 0.0; // centered-difference cross-check on dxi3/dmu
};
// mu = xi3/|xi| level change of variables, 0 < |mu| < 1.
JacobianCheck jacobian_check_M(const std::array<double, 2>& xi_h, double mu);
// mu = |xi|_F/(F|xi|) level change of variables, mu in (1/F, 1).
JacobianCheck jacobian_check_MF(const std::array<double, 2>& xi_h, double mu, double F);

ChainReport verify_M_chain(const Field& f, const ChainOptions& opts = {});
ChainReport verify_MF_chain(const Field& f, double froude, const ChainOptions& opts = {});

// ---- Product surfaces (two circles) -----------------------------------------

ChainReport product_chain_check(const Field& h, const Sphere& a, const Sphere& b,
                                const ChainOptions& opts = {});

// ---- Dual Sobolev embedding ratio -------------------------------------------

// Requires s = 1/2 - 1/p exactly (rational check), p in (1,2). Returns the
// ratio at dilations lambda in {1/2, 1, 2} realized by grid rescaling;
// parameter field carries lambda.
std::vector<RatioEstimate> sobolev_embedding_check(const Field& g, const Rational& p,
                                                   const Rational& s);

} // namespace rlab
