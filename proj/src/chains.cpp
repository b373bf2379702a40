#include "rlab/chains.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rlab/fft.hpp"
#include "rlab/interpolation.hpp"
#include "rlab/quadrature.hpp"
#include "rlab/tensor.hpp"

namespace rlab {
namespace {

Field leading_axes_transform(const Field& f) {
    require(f.side == Side::Physical, "chain verifier: field must be physical-side");
    Field part = f;
    std::array<bool, 4> axes{false, false, false, false};
    for (int a = 0; a + 1 < f.grid.dim; ++a) axes[a] = true;
    detail::transform_axes(part, axes, -1);
    part.side = Side::Frequency;
    for (int a = 0; a + 1 < f.grid.dim; ++a) part.transformed[a] = true;
    return part;
}

// Runs the consumer over band-limited slices fhat(.., mu) along the last
// axis, batching the phase contractions into matrix blocks.
void for_each_slice(const Field& part, std::span<const double> targets,
                    const std::function<void(std::size_t, Field&)>& consume) {
    const GridSpec& g = part.grid;
    const int n = g.n;
    const std::size_t rows = g.size() / static_cast<std::size_t>(n);
    Field slice(g.reduced(), Side::Frequency);
    for (int a = 0; a < slice.grid.dim; ++a) slice.transformed[a] = true;

    const std::size_t block =
        std::clamp<std::size_t>((64ull << 20) / (rows * sizeof(cplx)), 1, 32);
    std::vector<cplx> wmat, out;
    for (std::size_t b0 = 0; b0 < targets.size(); b0 += block) {
        const std::size_t bs = std::min(block, targets.size() - b0);
        wmat.assign(static_cast<std::size_t>(n) * bs, cplx{});
        for (std::size_t m = 0; m < bs; ++m) {
            const std::vector<cplx> w = physical_phase_weights(g, targets[b0 + m]);
            for (int k = 0; k < n; ++k) wmat[static_cast<std::size_t>(k) * bs + m] = w[k];
        }
        out.assign(rows * bs, cplx{});
        zgemm_acc(part.values, rows, n, wmat, bs, out);
        for (std::size_t m = 0; m < bs; ++m) {
            for (std::size_t r = 0; r < rows; ++r) slice.values[r] = out[r * bs + m];
            consume(b0 + m, slice);
        }
    }
}

// [ sum_x sq(x)^{p/2} dx^dim ]^{2/p} for a per-point array of squares
double nested_lp_of_sq(const std::vector<double>& sq, const GridSpec& g, double p) {
    double acc = 0.0;
    for (double v : sq) acc += std::pow(v, 0.5 * p);
    return std::pow(acc * std::pow(g.dx(), g.dim), 2.0 / p);
}

// per-base-point L^p norm along the last (physical) axis
std::vector<double> last_axis_lp(const Field& f, double p) {
    const int n = f.grid.n;
    const std::size_t rows = f.grid.size() / static_cast<std::size_t>(n);
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const cplx* row = f.values.data() + r * n;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += std::pow(std::abs(row[j]), p);
        out[r] = std::pow(acc * f.grid.dx(), 1.0 / p);
    }
    return out;
}

void check_identity(const ChainReport& rep, ChainStep& st, const ChainOptions& opts) {
    const double rel = std::abs(st.left - st.right) / std::max(1e-300, std::abs(st.right));
    st.constant = st.right > 0.0 ? st.left / st.right : 1.0;
    if (rel > opts.identity_tol && opts.throw_on_failure)
        throw ChainStepError(st.label, rep.chain + ": identity step '" + st.label +
                                           "' off by relative " + std::to_string(rel));
}

void check_literal(const ChainReport& rep, const ChainStep& st, const ChainOptions& opts) {
    if (st.left > st.right * (1.0 + opts.literal_slack) + 1e-300 && opts.throw_on_failure)
        throw ChainStepError(st.label, rep.chain + ": literal step '" + st.label +
                                           "' violated: left=" + std::to_string(st.left) +
                                           " right=" + std::to_string(st.right));
}

void finish_report(ChainReport& rep, const ChainOptions& opts) {
    double prod = 1.0;
    for (const ChainStep& st : rep.steps) prod *= st.constant;
    rep.bound_constant = std::sqrt(std::max(0.0, prod));
    rep.achieved_ratio = rep.lhs / std::max(1e-300, rep.rhs);
    if (rep.lhs > rep.bound_constant * rep.rhs * (1.0 + 1e-9) && opts.throw_on_failure)
        throw ChainStepError("telescoped bound", rep.chain + ": assembled bound fails");
}

} // namespace

// ---------------------------------------------------------------------------
// Jacobians of the level changes of variables
// ---------------------------------------------------------------------------

namespace {
double richardson_fd(const std::function<double(double)>& fn, double mu, double h) {
    auto fd = [&](double hh) { return (fn(mu + hh) - fn(mu - hh)) / (2.0 * hh); };
    const double d1 = fd(h), d2 = fd(0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}
} // namespace

JacobianCheck jacobian_check_M(const std::array<double, 2>& xi_h, double mu) {
    require(std::abs(mu) > 0.0 && std::abs(mu) < 1.0, "jacobian_check_M: need 0 < |mu| < 1");
    const double rh = std::hypot(xi_h[0], xi_h[1]);
    require(rh > 0.0, "jacobian_check_M: xi_h must be nonzero");
    const double om = 1.0 - mu * mu;
    JacobianCheck out;
    out.xi3 = mu / std::sqrt(om) * rh;
    out.dxi3_dmu = rh * std::pow(om, -1.5);
    out.xi_norm2 = rh * rh / om;
    auto xi3_of = [&](double m) { return m / std::sqrt(1.0 - m * m) * rh; };
    const double h = 1e-4 * std::min(std::abs(mu), 1.0 - std::abs(mu));
    const double fd = richardson_fd(xi3_of, mu, h);
    out.fd_rel_error = std::abs(fd - out.dxi3_dmu) / std::abs(out.dxi3_dmu);
    require(std::abs(out.xi3 / std::sqrt(out.xi_norm2) - mu) < 1e-12,
            "jacobian_check_M: mu recovery failed");
    return out;
}

JacobianCheck jacobian_check_MF(const std::array<double, 2>& xi_h, double mu, double F) {
    require(F > 1.0 && std::isfinite(F), "jacobian_check_MF: F must lie in (1, inf)");
    require(mu > 1.0 / F && mu < 1.0, "jacobian_check_MF: need mu in (1/F, 1)");
    const double rh = std::hypot(xi_h[0], xi_h[1]);
    require(rh > 0.0, "jacobian_check_MF: xi_h must be nonzero");
    const double iF2 = 1.0 / (F * F);
    const double om = 1.0 - mu * mu;
    JacobianCheck out;
    out.xi3 = std::sqrt((mu * mu - iF2) / om) * rh;
    out.dxi3_dmu = mu * (1.0 - iF2) * std::pow(om, -1.5) * std::pow(mu * mu - iF2, -0.5) * rh;
    out.xi_norm2 = rh * rh * (1.0 - iF2) / om;
    auto xi3_of = [&](double m) { return std::sqrt((m * m - iF2) / (1.0 - m * m)) * rh; };
    const double h = 1e-4 * std::min(mu - 1.0 / F, 1.0 - mu);
    const double fd = richardson_fd(xi3_of, mu, h);
    out.fd_rel_error = std::abs(fd - out.dxi3_dmu) / std::abs(out.dxi3_dmu);
    const double xif = std::sqrt(rh * rh + F * F * out.xi3 * out.xi3);
    require(std::abs(xif / (F * std::sqrt(rh * rh + out.xi3 * out.xi3)) - mu) < 1e-12,
            "jacobian_check_MF: mu recovery failed");
    return out;
}

// ---------------------------------------------------------------------------
// Cone decomposed over spheres
// ---------------------------------------------------------------------------

namespace {

struct ConeLevelData {
    double L0 = 0.0, R1 = 0.0, R2 = 0.0, C2 = 0.0;
    std::vector<double> acc, acc_full;
};

ConeLevelData cone_level_pass(const Field& f, const ChainOptions& opts, bool with_negative) {
    const int d = f.grid.dim - 1;
    require(d == 2 || d == 3, "cone chain: field must live over R^3 or R^4");
    const ExponentProfile prof = exponent_profile(d);
    const double p = prof.p0.value();
    const double alpha = prof.alpha.value();
    const double s = prof.s.value();

    Field part = leading_axes_transform(f);
    SurfaceTrace tr = detail::graph_trace_partial(part, ConeGraph{d, 1.0});

    ConeLevelData out;
    for (std::size_t i = 0; i < tr.values.size(); ++i)
        out.L0 += tr.weights[i] * std::norm(tr.values[i]);

    const GridSpec& g = f.grid;
    const int pts = opts.level_points > 0 ? opts.level_points : 4 * g.n;
    const Rule1D rho = log_grid(g.dxi(), g.xi_max(), pts);

    std::vector<double> targets(rho.nodes.begin(), rho.nodes.end());
    if (with_negative)
        for (double r : rho.nodes) targets.push_back(-r);

    const std::size_t slice_size = g.size() / g.n;
    out.acc.assign(slice_size, 0.0);
    out.acc_full.assign(slice_size, 0.0);

    std::vector<double> np(rho.nodes.size(), 0.0), tlev(rho.nodes.size(), 0.0);
    double np_max = 0.0;
    for_each_slice(part, targets, [&](std::size_t idx, Field& slice) {
        const bool level = idx < rho.nodes.size();
        const double qw = rho.weights[level ? idx : idx - rho.nodes.size()];
        const double w2s = std::pow(std::abs(targets[idx]), 2.0 * s);
        Field fslice = inverse_transform(slice);
        if (level) {
            const double r = rho.nodes[idx];
            SurfaceTrace sph = restrict_to_surface(slice, Sphere{d, r});
            double t2 = 0.0;
            for (std::size_t i = 0; i < sph.values.size(); ++i)
                t2 += sph.weights[i] * std::norm(sph.values[i]);
            tlev[idx] = t2;
            np[idx] = lp_norm(fslice, p);
            np_max = std::max(np_max, np[idx]);
            for (std::size_t x = 0; x < slice_size; ++x) {
                const double v = qw * w2s * std::norm(fslice.values[x]);
                out.acc[x] += v;
                out.acc_full[x] += v;
            }
        } else {
            for (std::size_t x = 0; x < slice_size; ++x)
                out.acc_full[x] += qw * w2s * std::norm(fslice.values[x]);
        }
    });

    for (std::size_t i = 0; i < rho.nodes.size(); ++i) {
        const double r = rho.nodes[i];
        out.R1 += rho.weights[i] / r * tlev[i];
        out.R2 += rho.weights[i] * std::pow(r, 2.0 * s) * np[i] * np[i];
        if (np[i] > 1e-9 * np_max)
            out.C2 = std::max(out.C2, std::sqrt(tlev[i]) / (std::pow(r, alpha) * np[i]));
    }
    return out;
}

} // namespace

PolarIdentity polar_identity_check(const Field& f, const ChainOptions& opts) {
    ConeLevelData lev = cone_level_pass(f, opts, /*with_negative=*/false);
    return PolarIdentity{lev.L0, lev.R1,
                         std::abs(lev.L0 - lev.R1) / std::max(1e-300, lev.R1)};
}

ChainReport verify_cone_chain(const Field& f, const ChainOptions& opts) {
    const int d = f.grid.dim - 1;
    const ExponentProfile prof = exponent_profile(d);
    const double p = prof.p0.value();

    ChainReport rep;
    rep.chain = "cone-over-spheres";
    rep.clip_distance = f.grid.dxi();
    rep.params["d"] = d;
    rep.params["p0"] = p;
    rep.params["alpha"] = prof.alpha.value();
    rep.params["s"] = prof.s.value();

    ConeLevelData lev = cone_level_pass(f, opts, /*with_negative=*/true);
    const GridSpec slice_grid = f.grid.reduced();
    const double R3 = nested_lp_of_sq(lev.acc, slice_grid, p);
    const double R4 = nested_lp_of_sq(lev.acc_full, slice_grid, p);

    const std::vector<double> B = last_axis_lp(f, p);
    const double rhs = lp_norm(f, p);
    double c_emb = 0.0, bmax = 0.0;
    for (double b : B) bmax = std::max(bmax, b);
    for (std::size_t x = 0; x < B.size(); ++x)
        if (B[x] > 1e-8 * bmax) c_emb = std::max(c_emb, std::sqrt(lev.acc_full[x]) / B[x]);

    rep.lhs = std::sqrt(lev.L0);
    rep.rhs = rhs;

    ChainStep s1{"polar decomposition", "trace rewritten as sphere integrals over levels",
                 lev.L0, lev.R1, 1.0, true, false};
    check_identity(rep, s1, opts);
    rep.steps.push_back(s1);

    ChainStep s2{"per-level sphere restriction", "radius-scaled compact restriction per level",
                 lev.R1, lev.R2, lev.C2 * lev.C2, false, false};
    rep.steps.push_back(s2);

    ChainStep s3{"Minkowski exchange", "outer L2(level) and inner Lp(x) swapped", lev.R2, R3,
                 1.0, false, true};
    check_literal(rep, s3, opts);
    rep.steps.push_back(s3);

    ChainStep s4{"half-line weight into the line",
                 "positive-level weight dominated by |rho|^{2s} over the whole line", R3, R4,
                 1.0, false, true};
    check_literal(rep, s4, opts);
    rep.steps.push_back(s4);

    ChainStep s5{"dual Sobolev embedding", "per-slice Hdot^s bounded via L^p of the slice", R4,
                 rhs * rhs, c_emb * c_emb, false, false};
    rep.steps.push_back(s5);
    rep.params["c_level"] = lev.C2;
    rep.params["c_embedding"] = c_emb;

    finish_report(rep, opts);
    return rep;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

std::vector<RatioEstimate> sphere_scaling_sweep(const Gaussian& base, int d,
                                                const std::vector<double>& radii,
                                                const ScalingSweepOptions& opts) {
    require(d == 2 || d == 3, "sphere_scaling_sweep: d must be 2 or 3");
    const ExponentProfile prof = exponent_profile(d);
    const double p = opts.p > 0.0 ? opts.p : prof.p0.value();
    const double alpha = prof.alpha.value();

    std::vector<RatioEstimate> out;
    int idx = 0;
    for (double R : radii) {
        require(R > 0.0, "sphere_scaling_sweep: radii must be positive");
        // near-proportional grids: exact proportionality would make the runs
        // identical up to scaling, mild detuning keeps them independent
        const double detune = 1.0 + 0.04 * ((idx % 3) - 1);
        GridSpec g = make_grid(d, opts.n, opts.base_half_extent / R * detune);
        Gaussian fam = base;
        fam.width = base.width / R;
        for (double& c : fam.center) c /= R;
        for (double& m : fam.modulation) m *= R;
        Field f = sample(fam, g, 1e-8);
        Field fhat = forward_transform(f);
        SurfaceTrace tr = restrict_to_surface(fhat, Sphere{d, R});
        RatioEstimate re;
        re.parameter = R;
        re.numerator = trace_lq_norm(tr, 2.0);
        re.denominator = lp_norm(f, p);
        re.ratio = re.numerator / re.denominator;
        re.compensated = re.ratio / std::pow(R, alpha);
        out.push_back(re);
        ++idx;
    }
    return out;
}

std::vector<RatioEstimate> cone_slope_sweep(const std::vector<double>& slopes,
                                            const SlopeSweepOptions& opts) {
    std::vector<RatioEstimate> out;
    const double kappa = opts.modulation;
    for (double rho : slopes) {
        require(rho >= 0.25 && rho <= 4.0, "cone_slope_sweep: slope outside [1/4, 4]");
        GridSpec g = make_grid(3, opts.n, opts.half_extent);
        // base packet riding the unit cone, rescaled in x3 to slope rho
        TensorProduct fam{{Gaussian1D{0.0, opts.width, kappa}, Gaussian1D{0.0, opts.width, 0.0},
                           Gaussian1D{0.0, opts.width / rho, kappa * rho}}};
        Field f = sample(fam, g, 1e-2);
        Field part = leading_axes_transform(f);
        SurfaceTrace tr = detail::graph_trace_partial(part, ConeGraph{2, rho});
        RatioEstimate re;
        re.parameter = rho;
        re.numerator = trace_lq_norm(tr, 2.0);
        re.denominator = lp_norm(f, 6.0 / 5.0);
        re.ratio = re.numerator / re.denominator;
        re.compensated = re.ratio * std::pow(std::abs(rho), 1.0 / 6.0);
        out.push_back(re);
    }
    return out;
}

// ---------------------------------------------------------------------------
// M and M_F decomposed over cones
// ---------------------------------------------------------------------------

namespace {

struct LevelNode {
    double mu = 0.0;
    double qw = 0.0;   // quadrature weight in d mu
    int interval = -1; // index into the interval table; -1 for extension nodes
    int center = -1;   // singular center whose full-line integral it feeds
};

struct IntervalSpec {
    double center;    // singular endpoint the shape refers to
    double c_dom;     // closed-form coefficient of the domination
    double dom_pow;   // |mu-center|^{-dom_pow} dominates W/c_dom on the interval
    double blunt_pow; // Sobolev power after blunting
};

// log grid marching away from `sing` in direction `dir`, distances [near, far]
void push_log_away(std::vector<LevelNode>& nodes, double sing, int dir, double near, double far,
                   int n, int interval, int center) {
    if (far <= near || n <= 0) return;
    const Rule1D r = log_grid(near, far, n);
    for (int i = 0; i < n; ++i)
        nodes.push_back(LevelNode{sing + dir * r.nodes[i], r.weights[i], interval, center});
}

struct MuChainData {
    double L0 = 0.0, R1 = 0.0, R2 = 0.0, C2 = 0.0;
    double dom_scan = 0.0;   // sup over level nodes of W / (c_dom shape)
    double blunt_scan = 0.0; // sup of shape_dom / shape_blunt
    std::vector<double> acc, acc_dom;
    std::vector<std::vector<double>> piece, ext; // per center
    std::vector<double> B;
    double rhs = 0.0;
};

MuChainData mu_chain_pass(const Field& f, const SurfaceSpec& spec,
                          const std::vector<LevelNode>& nodes,
                          const std::vector<IntervalSpec>& intervals,
                          const std::vector<double>& centers,
                          const std::function<double(double)>& weight_W,
                          const std::function<double(double)>& rho_of_mu,
                          const std::function<double(double)>& jac_of_mu,
                          bool positive_xi3_only) {
    require(f.grid.dim == 4, "mu chain: field must live over R^4");
    const double p = 6.0 / 5.0;

    Field part = leading_axes_transform(f);
    SurfaceTrace tr = detail::graph_trace_partial(part, spec);
    MuChainData out;
    for (std::size_t i = 0; i < tr.values.size(); ++i) {
        if (positive_xi3_only && tr.nodes[i][2] <= 0.0) continue;
        out.L0 += tr.weights[i] * std::norm(tr.values[i]);
    }

    const std::size_t slice_size = f.grid.size() / f.grid.n;
    out.acc.assign(slice_size, 0.0);
    out.acc_dom.assign(slice_size, 0.0);
    out.piece.assign(centers.size(), std::vector<double>(slice_size, 0.0));
    out.ext.assign(centers.size(), std::vector<double>(slice_size, 0.0));

    std::vector<double> targets(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) targets[i] = nodes[i].mu;

    double np_max = 0.0;
    std::vector<double> tlev(nodes.size(), 0.0), npv(nodes.size(), 0.0);
    std::vector<double> m2(slice_size);

    for_each_slice(part, targets, [&](std::size_t idx, Field& slice) {
        const LevelNode& nd = nodes[idx];
        Field fslice = inverse_transform(slice);
        for (std::size_t x = 0; x < slice_size; ++x) m2[x] = std::norm(fslice.values[x]);

        if (nd.interval >= 0) {
            const IntervalSpec& iv = intervals[nd.interval];
            SurfaceTrace ct = restrict_to_surface(slice, ConeGraph{2, rho_of_mu(nd.mu)});
            double t2 = 0.0;
            for (std::size_t i = 0; i < ct.values.size(); ++i)
                t2 += ct.weights[i] * std::norm(ct.values[i]);
            tlev[idx] = t2;
            npv[idx] = lp_norm(fslice, p);
            np_max = std::max(np_max, npv[idx]);

            const double W = weight_W(nd.mu);
            const double dist = std::abs(nd.mu - iv.center);
            const double shape_dom = iv.c_dom * std::pow(dist, -iv.dom_pow);
            const double shape_blunt = iv.c_dom * std::pow(dist, -iv.blunt_pow);
            out.dom_scan = std::max(out.dom_scan, W / shape_dom);
            out.blunt_scan = std::max(out.blunt_scan, shape_dom / shape_blunt);
            const double pw = std::pow(dist, -iv.blunt_pow);
            for (std::size_t x = 0; x < slice_size; ++x) {
                out.acc[x] += nd.qw * W * m2[x];
                out.acc_dom[x] += nd.qw * shape_dom * m2[x];
                out.piece[nd.center][x] += nd.qw * pw * m2[x];
            }
        } else {
            const double pw = std::pow(std::abs(nd.mu - centers[nd.center]), -2.0 / 3.0);
            for (std::size_t x = 0; x < slice_size; ++x)
                out.ext[nd.center][x] += nd.qw * pw * m2[x];
        }
    });

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const LevelNode& nd = nodes[i];
        if (nd.interval < 0) continue;
        out.R1 += nd.qw * jac_of_mu(nd.mu) * tlev[i];
        out.R2 += nd.qw * weight_W(nd.mu) * npv[i] * npv[i];
        if (npv[i] > 1e-9 * np_max)
            out.C2 = std::max(out.C2, std::sqrt(tlev[i]) /
                                          (std::pow(rho_of_mu(nd.mu), -1.0 / 6.0) * npv[i]));
    }
    out.B = last_axis_lp(f, p);
    out.rhs = lp_norm(f, p);
    return out;
}

ChainReport assemble_mu_chain(const char* name, const Field& f, const MuChainData& dat,
                              const std::vector<double>& center_coeff, const ChainOptions& opts,
                              double clip) {
    const double p = 6.0 / 5.0;
    ChainReport rep;
    rep.chain = name;
    rep.clip_distance = clip;
    rep.lhs = std::sqrt(dat.L0);
    rep.rhs = dat.rhs;

    const GridSpec slice_grid = f.grid.reduced();
    const double R3 = nested_lp_of_sq(dat.acc, slice_grid, p);
    const double R4 = nested_lp_of_sq(dat.acc_dom, slice_grid, p);

    ChainStep s1{"level decomposition", "trace rewritten as cone integrals over levels", dat.L0,
                 dat.R1, 1.0, true, false};
    check_identity(rep, s1, opts);
    rep.steps.push_back(s1);

    ChainStep s2{"per-level cone restriction", "slope-compensated cone bound per level", dat.R1,
                 dat.R2, dat.C2 * dat.C2, false, false};
    rep.steps.push_back(s2);

    ChainStep s3{"Minkowski exchange", "outer L2(level) and inner Lp(x) swapped", dat.R2, R3,
                 1.0, false, true};
    check_literal(rep, s3, opts);
    rep.steps.push_back(s3);

    if (dat.dom_scan > 1.0 + opts.literal_slack && opts.throw_on_failure)
        throw ChainStepError("split and weight domination",
                             std::string(name) + ": weight domination scan sup " +
                                 std::to_string(dat.dom_scan));
    ChainStep s4{"split and weight domination",
                 "level weight dominated by per-singularity Sobolev shapes", R3, R4, 1.0, false,
                 true};
    check_literal(rep, s4, opts);
    rep.steps.push_back(s4);

    // blunt the shapes to the Sobolev power; extensions then build the
    // full-line |mu - c|^{-2/3} integrals per singular center
    if (dat.blunt_scan > 1.0 + opts.literal_slack && opts.throw_on_failure)
        throw ChainStepError("blunted Sobolev shapes",
                             std::string(name) + ": blunting scan sup " +
                                 std::to_string(dat.blunt_scan));
    std::vector<double> blunt_sq(dat.acc.size(), 0.0);
    for (std::size_t x = 0; x < blunt_sq.size(); ++x) {
        double v = 0.0;
        for (std::size_t m = 0; m < center_coeff.size(); ++m)
            v += center_coeff[m] * dat.piece[m][x];
        blunt_sq[x] = v;
    }
    const double R5 = nested_lp_of_sq(blunt_sq, slice_grid, p);
    ChainStep s5{"blunted Sobolev shapes", "shape powers raised to the embedding exponent", R4,
                 R5, 1.0, false, true};
    check_literal(rep, s5, opts);
    rep.steps.push_back(s5);

    double bmax = 0.0, c_total = 0.0;
    for (double b : dat.B) bmax = std::max(bmax, b);
    std::vector<double> c_emb(center_coeff.size(), 0.0);
    for (std::size_t m = 0; m < center_coeff.size(); ++m) {
        for (std::size_t x = 0; x < dat.B.size(); ++x) {
            if (dat.B[x] <= 1e-8 * bmax) continue;
            const double Em = dat.piece[m][x] + dat.ext[m][x];
            c_emb[m] = std::max(c_emb[m], std::sqrt(Em) / dat.B[x]);
        }
        c_total += center_coeff[m] * c_emb[m] * c_emb[m];
    }
    ChainStep s6{"dual Sobolev embedding per level axis",
                 "full-line |mu-c|^{-2/3} integrals bounded via L^p slices", R5,
                 dat.rhs * dat.rhs, c_total, false, false};
    rep.steps.push_back(s6);

    for (std::size_t m = 0; m < c_emb.size(); ++m)
        rep.params["c_embedding_" + std::to_string(m)] = c_emb[m];
    rep.params["c_level"] = dat.C2;
    rep.params["dom_scan_sup"] = dat.dom_scan;

    finish_report(rep, opts);
    return rep;
}

} // namespace

ChainReport verify_M_chain(const Field& f, const ChainOptions& opts) {
    const GridSpec& g = f.grid;
    const int pts = (opts.level_points > 0 ? opts.level_points : 4 * g.n) / 4;
    const double clip = 0.5 / (4.0 * std::max(16, pts));
    const double box = 0.95 * g.xi_max();
    const int epts = opts.extension_points;

    const double c_dom = std::cbrt(4.0 / 3.0); // sup of the smooth cofactors at |mu| = 1/2
    const std::vector<IntervalSpec> intervals = {
        {-1.0, c_dom, 1.0 / 3.0, 2.0 / 3.0}, // [-1+clip, -1/2]: shape (1+mu)^{-1/3}
        {0.0, c_dom, 1.0 / 3.0, 2.0 / 3.0},  // [-1/2, -clip]
        {0.0, c_dom, 1.0 / 3.0, 2.0 / 3.0},  // [clip, 1/2]
        {1.0, c_dom, 1.0 / 3.0, 2.0 / 3.0},  // [1/2, 1-clip]: shape (1-mu)^{-1/3}
    };
    const std::vector<double> centers = {-1.0, 0.0, 1.0};
    const std::vector<double> center_coeff = {c_dom, c_dom, c_dom};

    std::vector<LevelNode> nodes;
    push_log_away(nodes, -1.0, +1, clip, 0.5, pts, 0, 0);
    push_log_away(nodes, 0.0, -1, clip, 0.5, pts, 1, 1);
    push_log_away(nodes, 0.0, +1, clip, 0.5, pts, 2, 1);
    push_log_away(nodes, 1.0, -1, clip, 0.5, pts, 3, 2);
    // full-line extensions, clamped to the frequency box
    const double span = std::min(opts.mu_span, box);
    push_log_away(nodes, -1.0, -1, clip, box - 1.0, epts, -1, 0);
    push_log_away(nodes, -1.0, +1, 0.5, std::min(span, box + 1.0), epts, -1, 0);
    push_log_away(nodes, 0.0, -1, 0.5, span, epts, -1, 1);
    push_log_away(nodes, 0.0, +1, 0.5, span, epts, -1, 1);
    push_log_away(nodes, 1.0, -1, 0.5, std::min(span, box + 1.0), epts, -1, 2);
    push_log_away(nodes, 1.0, +1, clip, box - 1.0, epts, -1, 2);

    auto W = [](double mu) {
        return std::pow(std::abs(mu), -1.0 / 3.0) * std::pow(1.0 - mu * mu, -1.0 / 3.0);
    };
    auto rho_of = [](double mu) { return mu / std::sqrt(1.0 - mu * mu); };
    auto jac = [](double mu) { return 1.0 / std::sqrt(1.0 - mu * mu); };

    MuChainData dat =
        mu_chain_pass(f, MGraph{}, nodes, intervals, centers, W, rho_of, jac, false);
    ChainReport rep = assemble_mu_chain("level-sets-of-M", f, dat, center_coeff, opts, clip);
    rep.params["d"] = 3;
    rep.params["p"] = 6.0 / 5.0;
    return rep;
}

ChainReport verify_MF_chain(const Field& f, double froude, const ChainOptions& opts) {
    require(froude > 1.05 && froude < 20.0,
            "verify_MF_chain: F outside the conditioning window (1.05, 20)");
    const double F = froude;
    const GridSpec& g = f.grid;
    const int pts = (opts.level_points > 0 ? opts.level_points : 4 * g.n) / 2;
    const double lo = 1.0 / F, split = (F + 1.0) / (2.0 * F);
    const double clip = std::min(split - lo, 1.0 - split) / (8.0 * std::max(16, pts));
    const double box = 0.95 * g.xi_max();
    const int epts = opts.extension_points;

    // Lower interval: the level weight is already the wanted Sobolev shape,
    // with coefficient F/(F-1)^{1/3}. Upper interval: substituting
    // (mu - 1/F)^{-2/3} <= (2F/(F-1))^{1/3} (1-mu)^{-1/3} (tight at the split)
    // and bounding the smooth cofactors at the split gives c_up.
    const double c_low = F * std::pow(F - 1.0, -1.0 / 3.0);
    const double hsup =
        std::pow(1.0 + split, -1.0 / 3.0) * std::pow((F + 3.0) / (2.0 * F), -2.0 / 3.0);
    const double c_up = std::cbrt(2.0 * F / (F - 1.0)) * hsup;
    const std::vector<IntervalSpec> intervals = {
        {lo, c_low, 2.0 / 3.0, 2.0 / 3.0},
        {1.0, c_up, 2.0 / 3.0, 2.0 / 3.0},
    };
    const std::vector<double> centers = {lo, 1.0};
    const std::vector<double> center_coeff = {c_low, c_up};

    std::vector<LevelNode> nodes;
    push_log_away(nodes, lo, +1, clip, split - lo, pts, 0, 0);
    push_log_away(nodes, 1.0, -1, clip, 1.0 - split, pts, 1, 1);
    const double span = std::min(opts.mu_span, box);
    push_log_away(nodes, lo, -1, clip, std::min(span, box + lo), epts, -1, 0);
    push_log_away(nodes, lo, +1, split - lo, std::min(span, box - lo), epts, -1, 0);
    push_log_away(nodes, 1.0, -1, 1.0 - split, std::min(span, box + 1.0), epts, -1, 1);
    push_log_away(nodes, 1.0, +1, clip, box - 1.0, epts, -1, 1);

    const double iF2 = 1.0 / (F * F);
    auto W = [iF2](double mu) {
        return mu * std::pow(1.0 - mu * mu, -1.0 / 3.0) * std::pow(mu * mu - iF2, -2.0 / 3.0);
    };
    auto rho_of = [iF2](double mu) { return std::sqrt((mu * mu - iF2) / (1.0 - mu * mu)); };
    auto jac = [iF2](double mu) {
        return mu * std::pow(1.0 - mu * mu, -0.5) * std::pow(mu * mu - iF2, -0.5);
    };

    // the chain runs on the xi_3 > 0 half; the surface is symmetric in xi_3,
    // so the full-surface bound is twice the half bound
    MuChainData dat =
        mu_chain_pass(f, MFGraph{F}, nodes, intervals, centers, W, rho_of, jac, true);
    ChainReport rep = assemble_mu_chain("level-sets-of-MF", f, dat, center_coeff, opts, clip);
    rep.params["froude"] = F;
    rep.params["c_dom_lower"] = c_low;
    rep.params["c_dom_upper"] = c_up;
    rep.params["f_trend_reference"] = std::pow(F, 5.0 / 3.0) * std::pow(F - 1.0, -5.0 / 9.0);
    return rep;
}

// ---------------------------------------------------------------------------
// Product of two circles (the A x B structure)
// ---------------------------------------------------------------------------

ChainReport product_chain_check(const Field& h, const Sphere& a, const Sphere& b,
                                const ChainOptions& opts) {
    require(h.grid.dim == 4, "product_chain_check: field must live over R^4 (2+2)");
    require(a.ambient_dim == 2 && b.ambient_dim == 2,
            "product_chain_check: desk scale uses circles in R^2 x R^2");
    const double p = exponent_profile(2).p0.value(); // 6/5 paired with q = 2

    ChainReport rep;
    rep.chain = "product-of-circles";
    rep.params["p"] = p;
    rep.params["radius_a"] = a.radius;
    rep.params["radius_b"] = b.radius;

    const GridSpec& g = h.grid;
    const int n = g.n;
    Sphere sa = a, sb = b;
    if (sa.node_count == 0) sa.node_count = 2 * n;
    if (sb.node_count == 0) sb.node_count = 2 * n;

    SurfaceTrace tr;
    {
        Field hhat = forward_transform(h);
        tr = product_restrict(hhat, sa, sb);
    }
    const SphereRule ra = circle_rule(sa.radius, sa.node_count);
    const SphereRule rb = circle_rule(sb.radius, sb.node_count);
    const std::size_t na = ra.points.size(), nb = rb.points.size();

    double L0 = 0.0;
    std::vector<double> inner_sq(na, 0.0); // squared trace over B per A node
    for (std::size_t ia = 0; ia < na; ++ia) {
        double acc = 0.0;
        for (std::size_t ib = 0; ib < nb; ++ib)
            acc += rb.weights[ib] * std::norm(tr.values[ia * nb + ib]);
        inner_sq[ia] = acc;
        L0 += ra.weights[ia] * acc;
    }

    // Aacute[y, node] = dx^2 sum_x h(x, y) e^{-i a.x}  (partial transform in
    // the first two coordinates at the A nodes), via a y-major transpose
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    std::vector<cplx> ht(n2 * n2);
    const std::size_t tile = 64;
    for (std::size_t x0 = 0; x0 < n2; x0 += tile)
        for (std::size_t y0 = 0; y0 < n2; y0 += tile)
            for (std::size_t x = x0; x < std::min(n2, x0 + tile); ++x)
                for (std::size_t y = y0; y < std::min(n2, y0 + tile); ++y)
                    ht[y * n2 + x] = h.values[x * n2 + y];

    std::vector<cplx> wa(n2 * na);
    for (int x0 = 0; x0 < n; ++x0)
        for (int x1 = 0; x1 < n; ++x1)
            for (std::size_t ia = 0; ia < na; ++ia) {
                const double phase = -(g.x(x0) * ra.points[ia][0] + g.x(x1) * ra.points[ia][1]);
                wa[(static_cast<std::size_t>(x0) * n + x1) * na + ia] =
                    g.dx() * g.dx() * std::polar(1.0, phase);
            }
    std::vector<cplx> aacute(n2 * na, cplx{});
    zgemm_acc(ht, n2, n2, wa, na, aacute);
    ht.clear();
    ht.shrink_to_fit();
    wa.clear();
    wa.shrink_to_fit();

    // restriction on B, applied per A node
    std::vector<double> np_b(na, 0.0);
    for (std::size_t y = 0; y < n2; ++y)
        for (std::size_t ia = 0; ia < na; ++ia)
            np_b[ia] += std::pow(std::abs(aacute[y * na + ia]), p);
    double c_b = 0.0, npb_max = 0.0, R1 = 0.0;
    for (std::size_t ia = 0; ia < na; ++ia) {
        np_b[ia] = std::pow(np_b[ia] * g.dx() * g.dx(), 1.0 / p);
        npb_max = std::max(npb_max, np_b[ia]);
    }
    for (std::size_t ia = 0; ia < na; ++ia) {
        R1 += ra.weights[ia] * np_b[ia] * np_b[ia];
        if (np_b[ia] > 1e-9 * npb_max)
            c_b = std::max(c_b, std::sqrt(inner_sq[ia]) / np_b[ia]);
    }
    ChainStep s1{"restriction on the second factor",
                 "circle restriction applied to the partial transform per node", L0, R1,
                 c_b * c_b, false, false};
    rep.steps.push_back(s1);

    // Minkowski: L2(dsigma_A) of Lp(y) against Lp(y) of L2(dsigma_A)
    std::vector<double> l2a_sq(n2, 0.0);
    for (std::size_t y = 0; y < n2; ++y) {
        double acc = 0.0;
        for (std::size_t ia = 0; ia < na; ++ia)
            acc += ra.weights[ia] * std::norm(aacute[y * na + ia]);
        l2a_sq[y] = acc;
    }
    GridSpec gy = g;
    gy.dim = 2;
    const double R2 = nested_lp_of_sq(l2a_sq, gy, p);
    ChainStep s2{"Minkowski exchange", "node integral and Lp(y) swapped, p <= 2", R1, R2, 1.0,
                 false, true};
    check_literal(rep, s2, opts);
    rep.steps.push_back(s2);

    // restriction on A, applied per y slice
    std::vector<double> np_a(n2, 0.0);
    for (std::size_t x = 0; x < n2; ++x) {
        const cplx* row = h.values.data() + x * n2;
        for (std::size_t y = 0; y < n2; ++y) np_a[y] += std::pow(std::abs(row[y]), p);
    }
    double c_a = 0.0, npa_max = 0.0;
    for (std::size_t y = 0; y < n2; ++y) {
        np_a[y] = std::pow(np_a[y] * g.dx() * g.dx(), 1.0 / p);
        npa_max = std::max(npa_max, np_a[y]);
    }
    for (std::size_t y = 0; y < n2; ++y)
        if (np_a[y] > 1e-9 * npa_max) c_a = std::max(c_a, std::sqrt(l2a_sq[y]) / np_a[y]);
    const double rhs = lp_norm(h, p);
    ChainStep s3{"restriction on the first factor", "circle restriction applied per y slice",
                 R2, rhs * rhs, c_a * c_a, false, false};
    rep.steps.push_back(s3);

    rep.lhs = std::sqrt(L0);
    rep.rhs = rhs;
    rep.params["c_b"] = c_b;
    rep.params["c_a"] = c_a;
    finish_report(rep, opts);
    return rep;
}

// ---------------------------------------------------------------------------
// Dual Sobolev embedding ratio with its dilation sweep
// ---------------------------------------------------------------------------

std::vector<RatioEstimate> sobolev_embedding_check(const Field& gfield, const Rational& p,
                                                   const Rational& s) {
    require(gfield.grid.dim == 1, "sobolev_embedding_check: field must be 1-D");
    require(p.value() > 1.0 && p.value() < 2.0, "sobolev_embedding_check: need p in (1,2)");
    require(Rational(1, 2) - Rational(p.den, p.num) == s,
            "sobolev_embedding_check: exponent relation s = 1/2 - 1/p violated");
    const double pv = p.value(), sv = s.value();
    if (lp_norm(gfield, pv) == 0.0)
        throw ValidationError("sobolev_embedding_check: degenerate input");

    std::vector<RatioEstimate> out;
    for (double lambda : {0.5, 1.0, 2.0}) {
        // g(lambda x) realized exactly by rescaling the grid
        Field gl = gfield;
        gl.grid.half_extent = gfield.grid.half_extent / lambda;
        RatioEstimate re;
        re.parameter = lambda;
        re.numerator = sobolev_norm(gl, sv);
        re.denominator = lp_norm(gl, pv);
        re.ratio = re.numerator / re.denominator;
        re.compensated = re.ratio; // scale-balanced exponents: flat as-is
        out.push_back(re);
    }
    return out;
}

} // namespace rlab
