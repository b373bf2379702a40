// The two divergence families, checked against closed forms (asinh growth,
// the Bessel-K shape of the slow profile's transform) and scale invariance.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rlab/counterexamples.hpp"
#include "rlab/quadrature.hpp"

using namespace rlab;

namespace {
double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }
} // namespace

TEST_CASE("slow-profile transform oracle against the Bessel identity") {
    for (double tau : {1.0 / 32.0, 0.1, 0.5, 1.0, 3.0}) {
        const double got = inverse_sqrt_profile_transform(tau);
        const double expect = 2.0 * std::cyl_bessel_k(0.0, tau);
        CHECK(rel_err(got, expect) < 1e-5);
    }
}

TEST_CASE("corrected transform converges in the cutoff") {
    const double a = inverse_sqrt_profile_transform(1.0, 64.0);
    const double b = inverse_sqrt_profile_transform(1.0, 256.0);
    CHECK(std::abs(a - b) < 1e-6);
}

TEST_CASE("truncated zero-frequency value matches 2 asinh(T)") {
    for (double T : {2.0, 16.0, 64.0}) {
        CHECK(rel_err(inverse_sqrt_profile_truncated(0.0, T), 2.0 * std::asinh(T)) < 1e-12);
    }
}

TEST_CASE("hyperplane failure: log growth and finite L^p norms") {
    std::vector<double> T;
    for (int k = 1; k <= 7; ++k) T.push_back(std::pow(2.0, k));
    CounterexampleReport rep = hyperplane_failure(1.0, T);
    CHECK(rep.ratio_increasing);

    // increments between successive doublings settle at 2 log 2
    const std::vector<double>& inc = rep.extras.at("increment");
    for (std::size_t i = 4; i < inc.size(); ++i) {
        CHECK(rel_err(inc[i], 2.0 * std::log(2.0)) < 0.05);
        CHECK(rel_err(inc[i], inc[i - 1]) < 0.05);
    }

    // || h ||_{L^2(R^2)} = ||phi||_2 sqrt(pi) for the separable profile
    const double expect = std::pow(kPi, 0.25) * std::sqrt(kPi);
    CHECK(rel_err(rep.extras.at("lp_norm_20").front(), expect) < 1e-6);
    CHECK(rep.extras.at("lp_norm_15").front() > 0.0);

    CHECK_THROWS_AS(hyperplane_failure(1.0, {4.0, 2.0}), ValidationError);
}

TEST_CASE("flatness family spectrum stays inside the cone set") {
    FlatnessProfile prof;
    for (double xi1 = -1.5; xi1 <= 1.5; xi1 += 0.013)
        for (double xi2 = -1.5; xi2 <= 1.5; xi2 += 0.017) {
            const double v = detail::flatness_psi_hat(prof, xi1, xi2);
            if (v != 0.0) {
                CHECK(std::abs(xi1) <= 1.0);
                CHECK(std::abs(xi2) <= std::abs(xi1));
            }
        }
}

TEST_CASE("flatness family: constant L^p norms, growing trace ratio") {
    FlatnessProfile prof;
    const std::vector<double> R{2.0, 4.0, 8.0, 16.0, 32.0};
    CounterexampleReport rep = m_flatness_family(prof, R, 1.5, 2.0);

    // (i) the anisotropic rescaling has unit Jacobian
    const std::vector<double>& dn = rep.data_norm;
    for (double v : dn) CHECK(rel_err(v, dn[0]) < 0.01);

    // (ii) the lower bound grows like the log of the shrinking window
    const std::vector<double>& inf_f = rep.extras.at("inf_fhat");
    std::vector<double> incr;
    for (std::size_t i = 1; i < inf_f.size(); ++i) {
        CHECK(inf_f[i] > inf_f[i - 1]);
        incr.push_back(inf_f[i] - inf_f[i - 1]);
    }
    for (std::size_t i = 1; i < incr.size(); ++i) CHECK(rel_err(incr[i], incr[i - 1]) < 0.1);
    // the quadrature oracle also matches the Bessel closed form here
    for (std::size_t i = 0; i < R.size(); ++i)
        CHECK(rel_err(inf_f[i], 2.0 * std::cyl_bessel_k(0.0, 1.0 / R[i])) < 1e-4);

    // (iii) strictly increasing trace ratio across the factor-16 range
    CHECK(rep.ratio_increasing);
    const std::vector<double>& tr = rep.extras.at("trace");
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr[i] > tr[i - 1]);

    CHECK_THROWS_AS(m_flatness_family(prof, R, 1.0, 2.0), ValidationError);
}

TEST_CASE("flatness family: L^p invariance at several exponents") {
    FlatnessProfile prof;
    const std::vector<double> R{2.0, 8.0, 32.0};
    for (double p : {1.5, 2.0, 3.0}) {
        CounterexampleReport rep = m_flatness_family(prof, R, p, 2.0);
        for (double v : rep.data_norm) CHECK(rel_err(v, rep.data_norm[0]) < 0.01);
    }
}
