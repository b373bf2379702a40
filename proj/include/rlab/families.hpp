#pragma once
// Concrete test-function families standing in for "any Schwartz f":
// modulated Gaussians, frequency-side ring cutoffs, Knapp cap packets,
// tensor products of 1-D Gaussians, and the slowly-decaying hyperplane
// counterexample profile phi(x')/sqrt(1+x_d^2).

#include <optional>
#include <variant>
#include <vector>

#include "rlab/grid.hpp"
#include "rlab/surfaces.hpp"

namespace rlab {

struct Gaussian {
    std::vector<double> center;     // physical-side center (empty = origin)
    double width = 1.0;             // exp(-|x-c|^2 / (2 width^2))
    std::vector<double> modulation; // e^{i k.x} (empty = none)
};

struct Gaussian1D {
    double center = 0.0;
    double width = 1.0;
    double modulation = 0.0;
};

struct RingBump {
    double inner = 1.0; // frequency-side annulus inner/outer radii,
    double outer = 2.0; // exact support, C-infinity smoothed inside
};

struct KnappPacket {
    Sphere surface;          // cap lives on this sphere (circles at desk scale)
    double cap_angle = 0.0;  // cap center direction
    double delta = 0.25;     // angular width, 0 < delta <= 1
};

struct TensorProduct {
    std::vector<Gaussian1D> factors; // one per axis
};

struct HyperplaneDecay {
    double profile_width = 1.0; // phi = Gaussian of this width in x'
};

using TestFunctionFamily =
    std::variant<Gaussian, RingBump, KnappPacket, TensorProduct, HyperplaneDecay>;

// Physical-side samples. Throws when the family parameters do not fit in the
// box or the measured boundary decay exceeds `decay_budget` (pass a looser
// budget for deliberately wide sweeps; the measured value is always
// recoverable via boundary_decay()).
Field sample(const TestFunctionFamily& family, const GridSpec& grid,
             double decay_budget = 1e-12);

// Closed-form transform of a (modulated, shifted) Gaussian under the
// convention of grid.hpp: (2pi)^{d/2} w^d exp(-w^2|xi-k|^2/2) e^{-i(xi-k).c}.
cplx gaussian_transform(const Gaussian& g, int dim, std::span<const double> xi);

} // namespace rlab
