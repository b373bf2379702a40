#pragma once
// Dispersive semigroups as Fourier multipliers: the half-wave pair through
// the gamma decomposition of wave data, and the degree-zero-homogeneous
// rotating semigroup e^{+-i t xi_3/|xi|}. Space-time norms stream over the
// snapshots; nothing here materializes more than one field per time node.

#include "rlab/chains.hpp"
#include "rlab/grid.hpp"

namespace rlab {

struct TailBudgetError : std::runtime_error {
    double tail_fraction;
    TailBudgetError(const std::string& msg, double tail)
        : std::runtime_error(msg), tail_fraction(tail) {}
};

struct WaveData {
    Field position; // u(0)
    Field velocity; // du/dt(0), mean-free
};

struct TimeGrid {
    double t_end = 0.0; // window [0, T]
    int steps = 256;    // snapshot count (trapezoid rule in t)
    double dt() const { return t_end / steps; }
    double t(int k) const { return k * dt(); }
};

// default window T = 8 L, 256 snapshots
TimeGrid default_window(const GridSpec& g);

struct SpaceTimeField {
    TimeGrid time;
    std::vector<Field> snapshots; // steps + 1 fields on one spatial grid
};

// gamma(+-) = (fhat -+ ... ) / 2 on the frequency side; the zero mode is
// dropped, so the velocity spectrum must vanish there.
std::pair<Field, Field> gamma_decompose(const WaveData& data);

// u(t) = F^{-1}[ e^{it|xi|} gamma_+ + e^{-it|xi|} gamma_- ]
Field wave_state(const WaveData& data, double t);
SpaceTimeField wave_evolve(const WaveData& data, const TimeGrid& tg);

// (e^{+-i t D3/|D|} u0); the excluded origin mode carries multiplier 1
Field rotating_state(const Field& u0, double t, int sign);
SpaceTimeField rotating_evolve(const Field& u0, const TimeGrid& tg, int sign);

struct StrichartzSpec {
    enum class Equation { Wave, Rotating } equation = Equation::Rotating;
    double q_t = 6.0;
    double r_x = 6.0;
    double sobolev_order = 1.0; // data regularity; wave uses +-1/2 pairs
};

// (6,6) against Hdot^1
StrichartzSpec rotating_spec();
// interpolated rotating family: q >= 6, 1/r = 1/2 - 2/q, s = 6/q
StrichartzSpec rotating_spec_interpolated(double q_t);
// (p0', p0') against Hdot^{1/2} x Hdot^{-1/2} in dimension d
StrichartzSpec wave_spec(int d);

struct StrichartzResult {
    RatioEstimate ratio;   // numerator: space-time norm, denominator: data norm
    double window = 0.0;
    double tail_fraction = 0.0; // share of the last 10% of the window in ||.||^q
};

// Streaming mixed space-time norm over the data norm. The truncation
// diagnostic requires the last 10% of the window to carry < 1% of the
// time-norm mass, otherwise the window is rejected as too short.
StrichartzResult strichartz_ratio(const WaveData& data, const StrichartzSpec& spec,
                                  const TimeGrid& tg);
StrichartzResult strichartz_ratio(const Field& u0, const StrichartzSpec& spec,
                                  const TimeGrid& tg, int sign = +1);

struct AnisotropicResult {
    RatioEstimate ratio;        // L6_x L3_t over Hdot^1 (space outside)
    double time_outer_value = 0.0; // the L3_t L6_x value from the same run
    double window = 0.0;
    double tail_fraction = 0.0;
};

// Remark-style anisotropic norm with the space norm outside.
AnisotropicResult anisotropic_ratio(const Field& u0, const TimeGrid& tg, int sign = +1);

} // namespace rlab
