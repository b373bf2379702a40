"""Python smoke tests over the compiled module."""

import math

import numpy as np
import pytest

import restriction_lab as rl


def test_grid_and_transform_roundtrip():
    g = rl.make_grid(2, 32, 8.0)
    assert g.dx() * g.dxi() * g.n == pytest.approx(2.0 * math.pi, rel=1e-14)

    f = rl.sample(rl.Gaussian(width=1.0), g, 1e-6)
    fhat = rl.forward_transform(f)
    back = rl.inverse_transform(fhat)
    assert np.max(np.abs(back.values - f.values)) < 1e-12

    # Plancherel with the explicit 2-pi factors
    lhs = rl.lp_norm(fhat, 2.0)
    rhs = (2.0 * math.pi) * rl.lp_norm(f, 2.0)
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_grid_guards():
    with pytest.raises(rl.ValidationError):
        rl.make_grid(2, 63, 8.0)
    with pytest.raises(rl.ValidationError):
        rl.make_grid(5, 16, 8.0)


def test_exponent_profile_rationals():
    e = rl.exponent_profile(2)
    assert (e.p0.num, e.p0.den) == (6, 5)
    assert (e.p0_prime.num, e.p0_prime.den) == (6, 1)
    assert (e.alpha.num, e.alpha.den) == (1, 6)
    assert (e.s.num, e.s.den) == (-1, 3)


def test_constant_spectrum_circle_trace():
    g = rl.make_grid(2, 64, 8.0)
    f = rl.Field(g, rl.Side.frequency)
    f.mark_transformed()
    f.values = np.ones((g.n, g.n), dtype=complex)
    tr = rl.restrict_to_surface(f, rl.Sphere(2, 2.0))
    assert rl.trace_lq_norm(tr, 2.0) == pytest.approx(math.sqrt(4.0 * math.pi), rel=1e-11)


def test_cone_chain_small():
    g = rl.make_grid(3, 32, 10.0)
    k3 = math.hypot(1.3, 0.8)
    f = rl.sample(rl.Gaussian(width=1.0, modulation=[1.3, 0.8, k3]), g, 1e-4)
    opts = rl.ChainOptions()
    opts.identity_tol = 0.05
    rep = rl.verify_cone_chain(f, opts)
    assert len(rep.steps) == 5
    assert rep.lhs <= rep.bound_constant * rep.rhs * (1 + 1e-9)
    for st in rep.steps:
        if st.literal:
            assert st.left <= st.right * (1 + 1e-12)


def test_rotating_group_law():
    g = rl.make_grid(3, 24, 6.0)
    u0 = rl.sample(rl.Gaussian(width=1.0, modulation=[1.0, 0.5, 1.5]), g, 1e-3)
    a = rl.rotating_state(rl.rotating_state(u0, 0.4), 0.6)
    b = rl.rotating_state(u0, 1.0)
    assert np.max(np.abs(a.values - b.values)) < 1e-10
    assert rl.lp_norm(a, 2.0) == pytest.approx(rl.lp_norm(u0, 2.0), rel=1e-10)


def test_jacobians():
    j = rl.jacobian_check_m(1.0, 0.0, 1.0 / math.sqrt(2.0))
    assert j.xi3 == pytest.approx(1.0, rel=1e-12)
    assert j.xi_norm2 == pytest.approx(2.0, rel=1e-12)
    assert j.fd_rel_error < 1e-8

    jf = rl.jacobian_check_mf(1.0, 0.0, math.sqrt(5.0 / 8.0), 2.0)
    assert jf.xi3 == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(rl.ValidationError):
        rl.jacobian_check_mf(1.0, 0.0, 0.4, 2.0)


def test_hyperplane_counterexample():
    rep = rl.hyperplane_failure(1.0, [2.0, 4.0, 8.0, 16.0])
    assert rep.ratio_increasing
    incs = rep.extras["increment"]
    assert incs[-1] == pytest.approx(2.0 * math.log(2.0), rel=0.1)


def test_experiment_runner(tmp_path):
    code, err = rl.run_experiment(
        "plancherel", {"dim": "1", "N": "64", "out": str(tmp_path)}
    )
    assert code == 0 and err == ""
    assert (tmp_path / "plancherel" / "data.csv").exists()

    code, err = rl.run_experiment("plancherel", {"N": "63", "out": str(tmp_path)})
    assert code == 2
    assert "points_per_axis" in err

    assert "m-chain" in rl.experiments
