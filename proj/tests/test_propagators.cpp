// Half-wave and rotating semigroups: decomposition algebra, initial
// conditions, unimodular multipliers, group laws, energy conservation, the
// discrete d'Alembert refinement, and streamed Strichartz ratios.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rlab/fft.hpp"
#include "rlab/propagators.hpp"
#include "rlab/surfaces.hpp"

using namespace rlab;

namespace {
double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

double radius_at(const GridSpec& g, const std::array<int, 4>& idx) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) r2 += g.xi(idx[a]) * g.xi(idx[a]);
    return std::sqrt(r2);
}

// kill the zero mode exactly so the field qualifies as a wave velocity
Field mean_free(Field f) {
    cplx mean{};
    for (const cplx& v : f.values) mean += v;
    mean /= static_cast<double>(f.values.size());
    for (cplx& v : f.values) v -= mean;
    return f;
}
} // namespace

TEST_CASE("gamma decomposition algebra") {
    GridSpec g = make_grid(3, 24, 6.0);
    Field f = sample(RingBump{1.5, 3.5}, g, 1e-3);
    Field zero(g, Side::Physical);

    // g = 0: both halves are fhat/2 (away from the dropped origin)
    auto [gp0, gm0] = gamma_decompose(WaveData{f, zero});
    Field fhat = forward_transform(f);
    std::array<int, 4> origin{12, 12, 12, 0};
    for (std::size_t i = 0; i < fhat.values.size(); ++i) {
        if (i == fhat.index(origin)) continue;
        CHECK(std::abs(gp0.values[i] - 0.5 * fhat.values[i]) < 1e-13);
        CHECK(std::abs(gm0.values[i] - 0.5 * fhat.values[i]) < 1e-13);
    }

    // f = 0, ring g: gamma(+-) = (+-) ghat/(2 i |xi|)
    Field gv = mean_free(sample(RingBump{1.0, 3.0}, g, 1e-3));
    auto [gpv, gmv] = gamma_decompose(WaveData{zero, gv});
    Field ghat = forward_transform(gv);
    std::array<int, 4> idx{0, 0, 0, 0};
    double worst = 0.0;
    for (std::size_t i = 0; i < ghat.values.size(); ++i) {
        const double r = radius_at(g, idx);
        if (r > 0.0) {
            const cplx expect = ghat.values[i] / (cplx(0.0, 2.0) * r);
            worst = std::max(worst, std::abs(gpv.values[i] - expect));
            worst = std::max(worst, std::abs(gmv.values[i] + expect));
        }
        for (int a = 2; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    CHECK(worst < 1e-13);

    // inversion: gamma+ + gamma- = fhat and i|xi|(gamma+ - gamma-) = ghat
    auto [gp, gm] = gamma_decompose(WaveData{f, gv});
    idx = {0, 0, 0, 0};
    double w1 = 0.0, w2 = 0.0;
    for (std::size_t i = 0; i < fhat.values.size(); ++i) {
        const double r = radius_at(g, idx);
        if (r > 0.0) {
            w1 = std::max(w1, std::abs(gp.values[i] + gm.values[i] - fhat.values[i]));
            w2 = std::max(w2, std::abs(cplx(0.0, r) * (gp.values[i] - gm.values[i]) -
                                       ghat.values[i]));
        }
        for (int a = 2; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    CHECK(w1 < 1e-12);
    CHECK(w2 < 1e-12);

    // a velocity with mean fails the precondition
    Field bad = sample(Gaussian{{}, 1.0, {}}, g, 1e-3);
    CHECK_THROWS_AS(gamma_decompose(WaveData{f, bad}), ValidationError);
}

TEST_CASE("wave evolution: initial conditions and time reversal") {
    GridSpec g = make_grid(3, 24, 6.0);
    // the decomposition drops the origin mode, so exact initial-condition
    // recovery needs mean-free position data as well
    Field f = mean_free(sample(RingBump{1.5, 3.5}, g, 1e-3));
    Field gv = mean_free(sample(RingBump{1.0, 3.0}, g, 1e-3));
    WaveData data{f, gv};

    Field u0 = wave_state(data, 0.0);
    CHECK(max_abs_diff(u0, f) < 1e-12);

    const double dt = 1e-3;
    Field up = wave_state(data, dt), um = wave_state(data, -dt);
    double worst = 0.0;
    for (std::size_t i = 0; i < up.values.size(); ++i)
        worst = std::max(worst,
                         std::abs((up.values[i] - um.values[i]) / (2.0 * dt) - gv.values[i]));
    CHECK(worst < 1e-4); // O(dt^2) against an O(1) velocity

    // time reversal: (f, -g) at t equals (f, g) at -t
    Field neg = gv;
    for (cplx& v : neg.values) v = -v;
    Field a = wave_state(WaveData{f, neg}, 0.7);
    Field b = wave_state(data, -0.7);
    CHECK(max_abs_diff(a, b) < 1e-10);
}

TEST_CASE("single wave mode oscillates at cos(t|xi0|)") {
    GridSpec g = make_grid(3, 16, 4.0);
    Field f(g, Side::Physical);
    const std::array<int, 4> k{11, 6, 9, 0};
    const double r = radius_at(g, k);
    // physical field with a single frequency mode
    Field fhat(g, Side::Frequency);
    fhat.transformed = {true, true, true, false};
    fhat.values[fhat.index(k)] = 1.0;
    f = inverse_transform(fhat);
    Field zero(g, Side::Physical);
    WaveData data{f, zero};
    for (double t : {0.3, 1.1}) {
        Field ut = wave_state(data, t);
        double worst = 0.0;
        for (std::size_t i = 0; i < ut.values.size(); ++i)
            worst = std::max(worst, std::abs(ut.values[i] - std::cos(t * r) * f.values[i]));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("discrete d'Alembert: second time difference vs spectral Laplacian") {
    GridSpec g = make_grid(3, 24, 6.0);
    Field f = sample(RingBump{1.5, 3.5}, g, 1e-3);
    Field gv = mean_free(sample(RingBump{1.0, 3.0}, g, 1e-3));
    WaveData data{f, gv};
    const double t0 = 0.4;

    Field ut = wave_state(data, t0);
    Field uhat = forward_transform(ut);
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t i = 0; i < uhat.values.size(); ++i) {
        const double r = radius_at(g, idx);
        uhat.values[i] *= -r * r;
        for (int a = 2; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    Field lap = inverse_transform(uhat);
    double lap_scale = 0.0;
    for (const cplx& v : lap.values) lap_scale = std::max(lap_scale, std::abs(v));

    auto second_diff_err = [&](double dt) {
        Field up = wave_state(data, t0 + dt), um = wave_state(data, t0 - dt);
        double worst = 0.0;
        for (std::size_t i = 0; i < lap.values.size(); ++i) {
            const cplx dd =
                (up.values[i] - 2.0 * ut.values[i] + um.values[i]) / (dt * dt);
            worst = std::max(worst, std::abs(dd - lap.values[i]));
        }
        return worst / lap_scale;
    };
    const double e1 = second_diff_err(0.02), e2 = second_diff_err(0.01);
    const double order = std::log2(e1 / e2);
    CHECK(order >= 1.9);
}

TEST_CASE("wave evolution matches the cone extension pathway") {
    GridSpec g = make_grid(3, 24, 6.0);
    Field f = sample(RingBump{1.5, 3.5}, g, 1e-3);
    Field gv = mean_free(sample(RingBump{1.0, 3.0}, g, 1e-3));
    WaveData data{f, gv};
    auto [gp, gm] = gamma_decompose(data);

    // densities gamma * |xi| cancel the cone measure weight 1/|xi|
    Field dp = gp, dm = gm;
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t i = 0; i < dp.values.size(); ++i) {
        const double r = radius_at(g, idx);
        dp.values[i] *= r;
        dm.values[i] *= r;
        for (int a = 2; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    const double t = 0.9;
    Field up = extension_operator(dp, ConeGraph{3, 1.0}, t);
    Field um = extension_operator(dm, ConeGraph{3, -1.0}, t);
    Field sum = up;
    for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += um.values[i];
    Field direct = wave_state(data, t);
    CHECK(max_abs_diff(sum, direct) < 1e-10);
}

TEST_CASE("rotating semigroup: identity, single-mode phase, group law, energy") {
    GridSpec g = make_grid(3, 24, 6.0);
    Field u0 = sample(Gaussian{{}, 1.0, {1.0, 0.5, 1.5}}, g, 1e-4);

    Field id = rotating_state(u0, 0.0, +1);
    CHECK(max_abs_diff(id, u0) < 1e-12);

    // mode on the xi_3 axis picks up exactly e^{+-it}
    Field mode(g, Side::Frequency);
    mode.transformed = {true, true, true, false};
    const std::array<int, 4> kaxis{12, 12, 16, 0};
    mode.values[mode.index(kaxis)] = 1.0;
    Field m0 = inverse_transform(mode);
    for (int sign : {+1, -1}) {
        Field mt = rotating_state(m0, 0.8, sign);
        double worst = 0.0;
        const cplx phase = std::polar(1.0, sign * 0.8);
        for (std::size_t i = 0; i < mt.values.size(); ++i)
            worst = std::max(worst, std::abs(mt.values[i] - phase * m0.values[i]));
        CHECK(worst < 1e-12);
    }

    // group law: evolve(t1) then evolve(t2) = evolve(t1 + t2)
    Field step = rotating_state(rotating_state(u0, 0.6, +1), 1.1, +1);
    Field direct = rotating_state(u0, 1.7, +1);
    CHECK(max_abs_diff(step, direct) < 1e-10);

    // energy conservation at every snapshot
    TimeGrid tg{4.0, 16};
    SpaceTimeField stf = rotating_evolve(u0, tg, +1);
    const double e0 = lp_norm(u0, 2.0);
    for (const Field& u : stf.snapshots) CHECK(rel_err(lp_norm(u, 2.0), e0) < 1e-10);

    // per-mode modulus constant in t (unimodular multiplier)
    Field h0 = forward_transform(u0), h1 = forward_transform(stf.snapshots.back());
    double worst = 0.0;
    for (std::size_t i = 0; i < h0.values.size(); ++i)
        worst = std::max(worst, std::abs(std::abs(h1.values[i]) - std::abs(h0.values[i])));
    CHECK(worst < 1e-12);
}

TEST_CASE("origin-mode convention is immaterial for mean-free data") {
    GridSpec g = make_grid(3, 24, 6.0);
    Field u0 = mean_free(sample(RingBump{1.0, 3.0}, g, 1e-3));
    const double t = 1.3;
    Field via_op = rotating_state(u0, t, +1);
    // hand-built multiplier with the origin set to zero instead of one
    Field uhat = forward_transform(u0);
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t i = 0; i < uhat.values.size(); ++i) {
        double r2 = 0.0, x3 = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double c = g.xi(idx[a]);
            r2 += c * c;
            if (a == 2) x3 = c;
        }
        uhat.values[i] *= r2 > 0.0 ? std::polar(1.0, t * x3 / std::sqrt(r2)) : cplx{};
        for (int a = 2; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    Field via_zero = inverse_transform(uhat);
    CHECK(max_abs_diff(via_op, via_zero) < 1e-12);
}

TEST_CASE("rotating Strichartz ratio: dilation invariance and diagnostics") {
    std::vector<double> ratios;
    for (double lambda : {0.5, 1.0, 2.0}) {
        const double L = 6.0 / lambda * (1.0 + 0.03 * (lambda - 1.0));
        GridSpec g = make_grid(3, 32, L);
        Field u0 = sample(Gaussian{{}, 1.0 / lambda, {1.0 * lambda, 0.5 * lambda, 1.5 * lambda}},
                          g, 1e-3);
        TimeGrid tg{8.0 * 6.0, 96}; // the time profile is dilation invariant
        StrichartzResult res = strichartz_ratio(u0, rotating_spec(), tg);
        CHECK(res.tail_fraction < 0.01);
        ratios.push_back(res.ratio.ratio);
    }
    for (double r : ratios) CHECK(rel_err(r, ratios[1]) < 0.1);

    GridSpec g = make_grid(3, 32, 6.0);
    Field zero(g, Side::Physical);
    CHECK_THROWS_AS(strichartz_ratio(zero, rotating_spec(), TimeGrid{48.0, 96}),
                    ValidationError);

    // a pure mode never decays: a short window flunks the tail budget
    Field mode(g, Side::Frequency);
    mode.transformed = {true, true, true, false};
    mode.values[mode.index({20, 16, 18, 0})] = 1.0;
    Field m0 = inverse_transform(mode);
    CHECK_THROWS_AS(strichartz_ratio(m0, rotating_spec(), TimeGrid{48.0, 64}),
                    TailBudgetError);
}

TEST_CASE("wave Strichartz ratio at the restriction-derived exponents") {
    CHECK(wave_spec(3).q_t == doctest::Approx(4.0));
    std::vector<double> ratios;
    for (double lambda : {0.5, 1.0, 2.0}) {
        const double L = 6.0 / lambda * (1.0 + 0.03 * (lambda - 1.0));
        GridSpec g = make_grid(3, 32, L);
        // space-time dilation family: (f(lx), l g(lx)) with window T/l
        Field f = sample(RingBump{1.5 * lambda, 3.5 * lambda}, g, 2e-3);
        Field gv = mean_free(sample(RingBump{1.0 * lambda, 3.0 * lambda}, g, 2e-3));
        for (cplx& v : gv.values) v *= lambda;
        // waves wrap the periodic box at t ~ 2L; the window stays inside the
        // dispersal regime and scales with the space-time dilation
        TimeGrid tg{9.0 / lambda, 96};
        StrichartzResult res = strichartz_ratio(WaveData{f, gv}, wave_spec(3), tg);
        CHECK(res.tail_fraction < 0.01);
        ratios.push_back(res.ratio.ratio);
    }
    for (double r : ratios) CHECK(rel_err(r, ratios[1]) < 0.1);
}

TEST_CASE("anisotropic norm order and comparison record") {
    GridSpec g = make_grid(3, 24, 6.0);
    // constant-modulus single mode: both norm orders have closed forms
    Field mode(g, Side::Frequency);
    mode.transformed = {true, true, true, false};
    mode.values[mode.index({16, 12, 14, 0})] = 1.0;
    Field m0 = inverse_transform(mode);
    const double amp = std::abs(m0.values[0]);
    const TimeGrid tg{2.0, 32};
    // |u(t,x)| = amp everywhere: L6_x L3_t = amp T^{1/3} (2L)^{1/2} and the
    // time-outer order gives the same number
    double expect = amp * std::pow(tg.t_end, 1.0 / 3.0) * std::pow(2.0 * g.half_extent, 0.5);
    AnisotropicResult ar;
    try {
        ar = anisotropic_ratio(m0, tg);
    } catch (const TailBudgetError&) {
        // constant modulus cannot satisfy the tail budget; recompute pieces
        // through the public API with the budget disabled is not offered, so
        // assert through the evolve pathway instead
        SpaceTimeField stf = rotating_evolve(m0, tg, +1);
        double acc = 0.0;
        std::vector<double> cubes(g.size(), 0.0);
        for (int k = 0; k <= tg.steps; ++k) {
            const double w = (k == 0 || k == tg.steps) ? 0.5 * tg.dt() : tg.dt();
            for (std::size_t x = 0; x < cubes.size(); ++x) {
                const double m = std::abs(stf.snapshots[k].values[x]);
                cubes[x] += w * m * m * m;
            }
        }
        for (double c : cubes) acc += c * c;
        const double aniso = std::pow(acc * std::pow(g.dx(), 3), 1.0 / 6.0);
        CHECK(rel_err(aniso, expect) < 1e-6);
        return;
    }
    CHECK(rel_err(ar.ratio.numerator, expect) < 1e-6);
}

TEST_CASE("anisotropic ratio: finite and dilation invariant for Gaussians") {
    std::vector<double> ratios;
    for (double lambda : {0.5, 1.0, 2.0}) {
        const double L = 9.0 / lambda * (1.0 + 0.03 * (lambda - 1.0));
        GridSpec g = make_grid(3, 48, L);
        Field u0 = sample(Gaussian{{}, 1.0 / lambda, {1.0 * lambda, 0.5 * lambda, 1.5 * lambda}},
                          g, 1e-3);
        AnisotropicResult res = anisotropic_ratio(u0, TimeGrid{40.0, 96});
        CHECK(res.tail_fraction < 0.01);
        CHECK(res.time_outer_value > 0.0); // comparison record, no inequality asserted
        ratios.push_back(res.ratio.ratio);
    }
    for (double r : ratios) CHECK(rel_err(r, ratios[1]) < 0.1);
}
