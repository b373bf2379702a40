#include "rlab/counterexamples.hpp"

#include <algorithm>
#include <cmath>

#include "rlab/fft.hpp"
#include "rlab/quadrature.hpp"

namespace rlab {
namespace {

// || (1+x^2)^{-1/2} ||_{L^p(R)}^p-type integral with an algebraic tail
// correction at the cutoff
double inverse_sqrt_profile_lp(double p, double X = 1024.0) {
    const Rule1D base = gauss_legendre(8);
    double acc = 0.0, x = 0.0;
    while (x < X) {
        const double h = std::min(std::max(0.125, 0.25 * x), X - x);
        const double mid = x + 0.5 * h;
        for (std::size_t i = 0; i < base.nodes.size(); ++i) {
            const double t = mid + 0.5 * h * base.nodes[i];
            acc += 0.5 * h * base.weights[i] * std::pow(1.0 + t * t, -0.5 * p);
        }
        x += h;
    }
    // int_X^inf x^{-p}(1 + x^{-2})^{-p/2} dx to second order
    const double tail = std::pow(X, 1.0 - p) / (p - 1.0) -
                        0.5 * p * std::pow(X, -1.0 - p) / (p + 1.0);
    return std::pow(2.0 * (acc + tail), 1.0 / p);
}

double gaussian_lp_1d(double width, double p) {
    // || exp(-x^2/(2 w^2)) ||_{L^p(R)} = (w sqrt(2 pi / p))^{1/p}
    return std::pow(width * std::sqrt(2.0 * kPi / p), 1.0 / p);
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] <= v[i - 1]) return false;
    return !v.empty();
}

} // namespace

CounterexampleReport hyperplane_failure(double profile_width,
                                        const std::vector<double>& truncations) {
    require(profile_width > 0.0, "hyperplane_failure: profile width must be positive");
    require(!truncations.empty(), "hyperplane_failure: need at least one truncation");
    for (std::size_t i = 1; i < truncations.size(); ++i)
        require(truncations[i] > truncations[i - 1],
                "hyperplane_failure: truncations must increase");

    CounterexampleReport rep;
    rep.parameters = truncations;
    rep.extras["lp_norm_15"].push_back(gaussian_lp_1d(profile_width, 1.5) *
                                       inverse_sqrt_profile_lp(1.5));
    rep.extras["lp_norm_20"].push_back(gaussian_lp_1d(profile_width, 2.0) *
                                       inverse_sqrt_profile_lp(2.0));
    const double hnorm = rep.extras["lp_norm_15"].front();
    for (double T : truncations) {
        const double v = inverse_sqrt_profile_truncated(0.0, T);
        rep.surface_value.push_back(v);
        rep.data_norm.push_back(hnorm);
        rep.ratio.push_back(v / hnorm);
    }
    rep.ratio_increasing = strictly_increasing(rep.ratio);

    // increments along the truncation ladder grow like 2 log(T_{i+1}/T_i)
    std::vector<double>& incr = rep.extras["increment"];
    for (std::size_t i = 1; i < rep.surface_value.size(); ++i)
        incr.push_back(rep.surface_value[i] - rep.surface_value[i - 1]);
    return rep;
}

namespace detail {

double flatness_psi_hat(const FlatnessProfile& prof, double xi1, double xi2) {
    const double r = std::abs(xi1);
    if (r <= 0.0) return 0.0;
    const double radial =
        smoothstep((r - prof.inner) / prof.edge) * smoothstep((1.0 - r) / prof.edge);
    if (radial == 0.0) return 0.0;
    // |xi_2| <= |xi_1| with an exact-support transition
    const double cone = smoothstep((1.0 - std::abs(xi2) / r) / prof.cone_margin);
    return radial * cone;
}

} // namespace detail

namespace {

// base psi on a fixed physical grid (inverse transform of the exact-support
// spectrum) with a Catmull-Rom evaluator for the rescaled samples
struct PsiTable {
    GridSpec grid;
    std::vector<double> values; // psi is real: real spectrum, even in xi

    double at(double y1, double y2) const {
        const double L = grid.half_extent;
        if (std::abs(y1) >= L - 2.0 * grid.dx() || std::abs(y2) >= L - 2.0 * grid.dx())
            return 0.0;
        const double u = (y1 + L) / grid.dx();
        const double v = (y2 + L) / grid.dx();
        const int i0 = static_cast<int>(std::floor(u)), j0 = static_cast<int>(std::floor(v));
        const double fu = u - i0, fv = v - j0;
        auto cr = [](double f, double m1, double p0, double p1, double p2) {
            return p0 + 0.5 * f * (p1 - m1 + f * (2.0 * m1 - 5.0 * p0 + 4.0 * p1 - p2 +
                                                  f * (3.0 * (p0 - p1) + p2 - m1)));
        };
        double rows[4];
        for (int di = -1; di <= 2; ++di) {
            const int i = std::clamp(i0 + di, 0, grid.n - 1);
            const double* row = values.data() + static_cast<std::size_t>(i) * grid.n;
            const int jm = std::clamp(j0 - 1, 0, grid.n - 1);
            const int j1 = std::clamp(j0, 0, grid.n - 1);
            const int j2 = std::clamp(j0 + 1, 0, grid.n - 1);
            const int j3 = std::clamp(j0 + 2, 0, grid.n - 1);
            rows[di + 1] = cr(fv, row[jm], row[j1], row[j2], row[j3]);
        }
        return cr(fu, rows[0], rows[1], rows[2], rows[3]);
    }
};

PsiTable build_psi_table(const FlatnessProfile& prof) {
    PsiTable table;
    table.grid = make_grid(2, 1024, 96.0);
    Field psihat(table.grid, Side::Frequency);
    psihat.transformed = {true, true, false, false};
    const GridSpec& g = table.grid;
    for (int k0 = 0; k0 < g.n; ++k0)
        for (int k1 = 0; k1 < g.n; ++k1)
            psihat.values[static_cast<std::size_t>(k0) * g.n + k1] =
                detail::flatness_psi_hat(prof, g.xi(k0), g.xi(k1));
    Field psi = inverse_transform(psihat);
    table.values.resize(psi.values.size());
    for (std::size_t i = 0; i < psi.values.size(); ++i) table.values[i] = psi.values[i].real();
    return table;
}

} // namespace

CounterexampleReport m_flatness_family(const FlatnessProfile& profile,
                                       const std::vector<double>& r_values, double p, double q) {
    require(p > 1.0, "m_flatness_family: need p > 1 for the slow-decay factor");
    require(q >= 1.0, "m_flatness_family: need q >= 1");
    require(!r_values.empty(), "m_flatness_family: need at least one scale");
    for (std::size_t i = 1; i < r_values.size(); ++i)
        require(r_values[i] > r_values[i - 1], "m_flatness_family: scales must increase");

    const PsiTable psi = build_psi_table(profile);
    const GridSpec& bg = psi.grid;

    // R-independent ingredients
    const double f_lp = inverse_sqrt_profile_lp(p);
    double psihat_q = 0.0;
    for (int k0 = 0; k0 < bg.n; ++k0)
        for (int k1 = 0; k1 < bg.n; ++k1)
            psihat_q += std::pow(detail::flatness_psi_hat(profile, bg.xi(k0), bg.xi(k1)), q);
    psihat_q = std::pow(psihat_q * bg.dxi() * bg.dxi(), 1.0 / q);

    CounterexampleReport rep;
    rep.parameters = r_values;
    const double Y = bg.half_extent - 4.0 * bg.dx();

    int ridx = 0;
    for (double R : r_values) {
        require(R > 1.0, "m_flatness_family: scales must exceed 1");
        // (i) data norm on an R-adapted, de-commensurated tensor grid
        const int n1 = 1024 + 32 * (ridx % 3), n2 = 1024 + 48 * ((ridx + 1) % 3);
        const double off1 = 0.37 * (ridx + 1) / n1, off2 = 0.21 * (ridx + 2) / n2;
        double acc = 0.0;
        const double h1 = 2.0 * Y / R / n1, h2 = 2.0 * Y * R / n2;
        for (int i = 0; i < n1; ++i) {
            const double x1 = -Y / R + (i + 0.5 + off1) * h1;
            for (int j = 0; j < n2; ++j) {
                const double x2 = -Y * R + (j + 0.5 + off2) * h2;
                acc += std::pow(std::abs(psi.at(R * x1, x2 / R)), p);
            }
        }
        const double psi_lp = std::pow(acc * h1 * h2, 1.0 / p);
        const double hnorm = psi_lp * f_lp;

        // (ii) lower bound: fhat decreases in |tau|, so the infimum sits at 1/R
        const double inf_f = inverse_sqrt_profile_transform(1.0 / R);
        const double lower = inf_f * psihat_q;

        // (iii) direct trace over the support of psihat_R; the slow factor is
        // cached on a log grid in |tau|
        const Rule1D taugrid = log_grid(1e-7, 1.2 / R, 240);
        std::vector<double> flog(taugrid.nodes.size());
        for (std::size_t i = 0; i < flog.size(); ++i)
            flog[i] = inverse_sqrt_profile_transform(taugrid.nodes[i]);
        auto fhat_of = [&](double tau) {
            const double a = std::abs(tau);
            if (a <= taugrid.nodes.front()) return flog.front();
            if (a >= taugrid.nodes.back()) return flog.back();
            const double pos = std::log(a / taugrid.nodes.front()) /
                               std::log(taugrid.nodes.back() / taugrid.nodes.front()) *
                               (flog.size() - 1);
            const std::size_t i0 = std::min(flog.size() - 2, static_cast<std::size_t>(pos));
            const double f = pos - i0;
            return (1.0 - f) * flog[i0] + f * flog[i0 + 1];
        };

        const int m1 = 720, m2 = 480;
        const double g1 = 2.1 * R / m1, g2 = 2.2 / R / m2;
        double tacc = 0.0;
        for (int i = 0; i < m1; ++i) {
            const double xi1 = -1.05 * R + (i + 0.5) * g1;
            for (int j = 0; j < m2; ++j) {
                const double xi2 = -1.1 / R + (j + 0.5) * g2;
                const double ps = detail::flatness_psi_hat(profile, xi1 / R, R * xi2);
                if (ps == 0.0) continue;
                const double tau = xi2 / std::hypot(xi1, xi2);
                tacc += std::pow(ps * fhat_of(tau), q);
            }
        }
        const double trace = std::pow(tacc * g1 * g2, 1.0 / q);

        rep.data_norm.push_back(hnorm);
        rep.surface_value.push_back(lower);
        rep.ratio.push_back(trace / hnorm);
        rep.extras["trace"].push_back(trace);
        rep.extras["inf_fhat"].push_back(inf_f);
        rep.extras["psi_lp"].push_back(psi_lp);
        rep.extras["psihat_q"].push_back(psihat_q);
        ++ridx;
    }
    rep.ratio_increasing = strictly_increasing(rep.ratio);
    return rep;
}

} // namespace rlab
