#include "rlab/propagators.hpp"

#include <cmath>
#include <functional>

#include "rlab/fft.hpp"
#include "rlab/norms.hpp"

namespace rlab {
namespace {

// |xi| per frequency node, reused by the multiplier loops
std::vector<double> radius_table(const GridSpec& g) {
    std::vector<double> out(g.size());
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t lin = 0; lin < out.size(); ++lin) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const double c = g.xi(idx[a]);
            r2 += c * c;
        }
        out[lin] = std::sqrt(r2);
        for (int a = g.dim - 1; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    return out;
}

// xi_3/|xi| with the origin frozen at 1
std::vector<double> rotating_phase_table(const GridSpec& g) {
    require(g.dim == 3, "rotating semigroup: field must live over R^3");
    std::vector<double> out(g.size());
    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t lin = 0; lin < out.size(); ++lin) {
        double r2 = 0.0, x3 = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double c = g.xi(idx[a]);
            r2 += c * c;
            if (a == 2) x3 = c;
        }
        out[lin] = r2 > 0.0 ? x3 / std::sqrt(r2) : 1.0;
        for (int a = 2; a >= 0; --a) {
            if (++idx[a] < g.n) break;
            idx[a] = 0;
        }
    }
    return out;
}

} // namespace

TimeGrid default_window(const GridSpec& g) { return TimeGrid{8.0 * g.half_extent, 256}; }

std::pair<Field, Field> gamma_decompose(const WaveData& data) {
    require(data.position.grid == data.velocity.grid,
            "gamma_decompose: position and velocity must share the grid");
    Field fhat = forward_transform(data.position);
    Field ghat = forward_transform(data.velocity);
    double gmax = 0.0;
    for (const cplx& v : ghat.values) gmax = std::max(gmax, std::abs(v));
    std::array<int, 4> origin{};
    for (int a = 0; a < fhat.grid.dim; ++a) origin[a] = fhat.grid.n / 2;
    const std::size_t o = fhat.index(origin);
    require(std::abs(ghat.values[o]) <= 1e-12 * std::max(1.0, gmax),
            "gamma_decompose: velocity spectrum must vanish at xi = 0");

    const std::vector<double> r = radius_table(fhat.grid);
    Field gp = fhat, gm = fhat;
    for (std::size_t i = 0; i < fhat.values.size(); ++i) {
        if (r[i] == 0.0) {
            gp.values[i] = gm.values[i] = cplx{};
            continue;
        }
        const cplx divided = ghat.values[i] / (cplx(0.0, 1.0) * r[i]);
        gp.values[i] = 0.5 * (fhat.values[i] + divided);
        gm.values[i] = 0.5 * (fhat.values[i] - divided);
    }
    return {gp, gm};
}

namespace {

Field wave_state_from(const Field& gp, const Field& gm, const std::vector<double>& r, double t) {
    Field mixed = gp;
    for (std::size_t i = 0; i < mixed.values.size(); ++i) {
        const cplx ep = std::polar(1.0, t * r[i]);
        mixed.values[i] = ep * gp.values[i] + std::conj(ep) * gm.values[i];
    }
    return inverse_transform(mixed);
}

Field rotating_state_from(const Field& u0hat, const std::vector<double>& phase, double t,
                          int sign) {
    Field mult = u0hat;
    for (std::size_t i = 0; i < mult.values.size(); ++i)
        mult.values[i] *= std::polar(1.0, sign * t * phase[i]);
    return inverse_transform(mult);
}

} // namespace

Field wave_state(const WaveData& data, double t) {
    auto [gp, gm] = gamma_decompose(data);
    return wave_state_from(gp, gm, radius_table(gp.grid), t);
}

SpaceTimeField wave_evolve(const WaveData& data, const TimeGrid& tg) {
    auto [gp, gm] = gamma_decompose(data);
    const std::vector<double> r = radius_table(gp.grid);
    SpaceTimeField out;
    out.time = tg;
    out.snapshots.reserve(tg.steps + 1);
    for (int k = 0; k <= tg.steps; ++k)
        out.snapshots.push_back(wave_state_from(gp, gm, r, tg.t(k)));
    return out;
}

Field rotating_state(const Field& u0, double t, int sign) {
    Field u0hat = forward_transform(u0);
    return rotating_state_from(u0hat, rotating_phase_table(u0.grid), t, sign);
}

SpaceTimeField rotating_evolve(const Field& u0, const TimeGrid& tg, int sign) {
    Field u0hat = forward_transform(u0);
    const std::vector<double> phase = rotating_phase_table(u0.grid);
    SpaceTimeField out;
    out.time = tg;
    out.snapshots.reserve(tg.steps + 1);
    for (int k = 0; k <= tg.steps; ++k)
        out.snapshots.push_back(rotating_state_from(u0hat, phase, tg.t(k), sign));
    return out;
}

StrichartzSpec rotating_spec() {
    return StrichartzSpec{StrichartzSpec::Equation::Rotating, 6.0, 6.0, 1.0};
}

StrichartzSpec rotating_spec_interpolated(double q_t) {
    require(q_t >= 6.0, "rotating_spec_interpolated: interpolation range needs q >= 6");
    // interpolation against energy conservation: 1/r = 1/2 - 2/q, s = 6/q
    const double r = 1.0 / (0.5 - 2.0 / q_t);
    return StrichartzSpec{StrichartzSpec::Equation::Rotating, q_t, r, 6.0 / q_t};
}

StrichartzSpec wave_spec(int d) {
    const double q = exponent_profile(d).p0_prime.value();
    return StrichartzSpec{StrichartzSpec::Equation::Wave, q, q, 0.5};
}

namespace {

StrichartzResult streamed_ratio(const std::function<Field(double)>& state, const TimeGrid& tg,
                                double q, double r, double data_norm) {
    require(tg.t_end > 0.0 && tg.steps >= 8, "strichartz_ratio: degenerate time window");
    require(data_norm > 0.0, "strichartz_ratio: degenerate input data");
    double total = 0.0, tail = 0.0;
    const double tail_start = 0.9 * tg.t_end;
    for (int k = 0; k <= tg.steps; ++k) {
        const double t = tg.t(k);
        const double w = (k == 0 || k == tg.steps) ? 0.5 * tg.dt() : tg.dt();
        const double nr = lp_norm(state(t), r);
        const double contrib = w * std::pow(nr, q);
        total += contrib;
        if (t >= tail_start) tail += contrib;
    }
    const double tail_fraction = tail / std::max(1e-300, total);
    if (tail_fraction > 0.01)
        throw TailBudgetError("strichartz_ratio: window too short, tail fraction " +
                                  std::to_string(tail_fraction),
                              tail_fraction);
    StrichartzResult res;
    res.window = tg.t_end;
    res.tail_fraction = tail_fraction;
    res.ratio.numerator = std::pow(total, 1.0 / q);
    res.ratio.denominator = data_norm;
    res.ratio.ratio = res.ratio.numerator / data_norm;
    res.ratio.compensated = res.ratio.ratio;
    return res;
}

} // namespace

StrichartzResult strichartz_ratio(const WaveData& data, const StrichartzSpec& spec,
                                  const TimeGrid& tg) {
    require(spec.equation == StrichartzSpec::Equation::Wave,
            "strichartz_ratio: wave data needs a wave spec");
    auto [gp, gm] = gamma_decompose(data);
    const std::vector<double> r = radius_table(gp.grid);
    const double dn = sobolev_norm(data.position, 0.5) + sobolev_norm(data.velocity, -0.5);
    StrichartzResult res = streamed_ratio(
        [&](double t) { return wave_state_from(gp, gm, r, t); }, tg, spec.q_t, spec.r_x, dn);
    res.ratio.parameter = spec.q_t;
    return res;
}

StrichartzResult strichartz_ratio(const Field& u0, const StrichartzSpec& spec,
                                  const TimeGrid& tg, int sign) {
    require(spec.equation == StrichartzSpec::Equation::Rotating,
            "strichartz_ratio: scalar data needs a rotating spec");
    Field u0hat = forward_transform(u0);
    const std::vector<double> phase = rotating_phase_table(u0.grid);
    const double dn = sobolev_norm(u0, spec.sobolev_order);
    StrichartzResult res = streamed_ratio(
        [&](double t) { return rotating_state_from(u0hat, phase, t, sign); }, tg, spec.q_t,
        spec.r_x, dn);
    res.ratio.parameter = spec.q_t;
    return res;
}

AnisotropicResult anisotropic_ratio(const Field& u0, const TimeGrid& tg, int sign) {
    require(tg.t_end > 0.0 && tg.steps >= 8, "anisotropic_ratio: degenerate time window");
    Field u0hat = forward_transform(u0);
    const std::vector<double> phase = rotating_phase_table(u0.grid);
    const double dn = sobolev_norm(u0, 1.0);
    require(dn > 0.0, "anisotropic_ratio: degenerate input data");

    const GridSpec& g = u0.grid;
    std::vector<double> cubes(g.size(), 0.0); // per-x int |u|^3 dt
    double t_outer = 0.0, tail = 0.0;
    const double tail_start = 0.9 * tg.t_end;
    for (int k = 0; k <= tg.steps; ++k) {
        const double t = tg.t(k);
        const double w = (k == 0 || k == tg.steps) ? 0.5 * tg.dt() : tg.dt();
        Field u = rotating_state_from(u0hat, phase, t, sign);
        double six = 0.0;
        for (std::size_t x = 0; x < u.values.size(); ++x) {
            const double m = std::abs(u.values[x]);
            cubes[x] += w * m * m * m;
            six += std::pow(m, 6.0);
        }
        const double l6 = std::pow(six * std::pow(g.dx(), 3), 1.0 / 6.0);
        const double contrib = w * l6 * l6 * l6;
        t_outer += contrib;
        if (t >= tail_start) tail += contrib;
    }
    const double tail_fraction = tail / std::max(1e-300, t_outer);
    if (tail_fraction > 0.01)
        throw TailBudgetError("anisotropic_ratio: window too short, tail fraction " +
                                  std::to_string(tail_fraction),
                              tail_fraction);

    // L6_x of the per-point L3_t norms: (sum (int |u|^3 dt)^2 dx)^{1/6}
    double acc = 0.0;
    for (double c : cubes) acc += c * c;
    AnisotropicResult res;
    res.window = tg.t_end;
    res.tail_fraction = tail_fraction;
    res.ratio.numerator = std::pow(acc * std::pow(g.dx(), 3), 1.0 / 6.0);
    res.ratio.denominator = dn;
    res.ratio.ratio = res.ratio.numerator / dn;
    res.ratio.compensated = res.ratio.ratio;
    res.time_outer_value = std::pow(t_outer, 1.0 / 3.0);
    return res;
}

} // namespace rlab
