from math import lgamma, log, pi, sqrt
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perisolve.modes import solve_geometric
from perisolve.necessity import (
    NormParams,
    build_witness_pair,
    diophantine_counterexample,
    diophantine_mode_data,
    gs_norm,
    hormander_curve,
    laplace_blowup,
    laplace_mode_data,
    locate_peak,
    witness_invariants,
    zero_order,
)
from perisolve.spectral import custom_spectrum, harmonic_1d
from perisolve.torus import Coefficient, TorusFunction, nodes


def _brute_norm(lam, k, params, m=2):
    # ||P^M d_t^g e^{ikt}|| = lam^M k^g sqrt(2 pi)
    best = -np.inf
    for M in range(params.M_cap + 1):
        for g in range(params.gamma_cap + 1):
            v = (M * log(lam) + g * log(k) + 0.5 * log(2 * pi)
                 - (M + g) * log(params.C) - m * params.mu * lgamma(M + 1) - params.sigma * lgamma(g + 1))
            best = max(best, v)
    return best


@pytest.mark.parametrize("lam,k", [(1.0, 1), (7.0, 3), (41.0, 12)])
def test_gs_norm_of_single_exponential(lam, k):
    params = NormParams()
    g = TorusFunction(np.exp(1j * k * nodes(64)))
    val = gs_norm([(lam, g, 0.0)], params)
    assert val.log_value == pytest.approx(_brute_norm(lam, k, params), rel=1e-12)
    assert not val.saturated


def test_gs_norm_scales_with_log_scale():
    g = TorusFunction(np.cos(nodes(64)) + 0j)
    a = gs_norm([(3.0, g, 0.0)], NormParams())
    b = gs_norm([(3.0, g, 123.0)], NormParams())
    assert b.log_value - a.log_value == pytest.approx(123.0)


def test_gs_norm_flags_saturation():
    g = TorusFunction(np.exp(1j * 30 * nodes(128)))
    assert gs_norm([(1e6, g, 0.0)], NormParams()).saturated


def test_norm_params_validation():
    with pytest.raises(ValueError):
        NormParams(sigma=1.0)
    with pytest.raises(ValueError):
        NormParams(M_cap=4)


def test_witness_pair_for_sin2t():
    c = Coefficient.from_callables(lambda t: 1.0 + 0 * t, lambda t: np.sin(2 * t), 2048)
    w = build_witness_pair(c.B_periodic)
    inv = witness_invariants(w)
    assert w.level == pytest.approx(0.5, abs=1e-6)
    assert len(w.components) == 2
    assert inv["mean_f0"] < 1e-12
    assert not inv["f0_in_components"]
    assert not inv["dv0_outside_components"]
    assert abs(inv["pairing"]) > 0.1
    assert w.M < w.eps < w.r0


def test_witness_pair_rejects_connected_superlevel_sets():
    c = Coefficient.from_callables(lambda t: 1.0 + 0 * t, np.sin, 512)
    with pytest.raises(ValueError):
        build_witness_pair(c.B_periodic)


def test_hormander_ratio_grows():
    c = Coefficient.from_callables(lambda t: 1.0 + 0.3 * np.cos(t), lambda t: np.sin(2 * t), 1024)
    w, pts = hormander_curve(c, harmonic_1d(), [2, 8, 32], N=1024)
    # pairing over the product of norms is unbounded along the modes
    ratios = [p.log_ratio for p in pts]
    assert ratios[0] < ratios[1] < ratios[2]
    assert all(p.admissible for p in pts)
    # the pairing depends only on the witness, not on the mode
    assert pts[0].pairing == pytest.approx(pts[2].pairing, rel=1e-9)


def test_hormander_curve_needs_all_modes_resonant():
    c = Coefficient.from_callables(lambda t: 0.3 + 0 * t, lambda t: np.sin(2 * t), 512)
    with pytest.raises(ValueError):
        hormander_curve(c, harmonic_1d(), [1], N=512)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(-0.5, 0.5))
def test_zero_order_of_quadratic_and_quartic(a, s0):
    k, d = zero_order(lambda s: a * (s - s0) ** 2, s0)
    assert k == 1 and d == pytest.approx(2 * a, rel=1e-6)
    k, d = zero_order(lambda s: a * (s - s0) ** 4, s0)
    assert k == 2 and d == pytest.approx(24 * a, rel=1e-6)


def test_locate_peak_for_sin():
    # Backward exponent int_{t-s}^t sin = cos(t - s) - cos t peaks at 2 with s = pi, t = pi
    c = Coefficient.from_callables(lambda t: 0.3 + 0 * t, np.sin, 256)
    s, t, peak = locate_peak(c, "Backward")
    assert peak == pytest.approx(2.0, abs=1e-12)
    assert s == pytest.approx(pi, abs=1e-6) and t == pytest.approx(pi, abs=1e-6)


def _laplace_coef(b0=0.0):
    return Coefficient.from_callables(lambda t: 0.37 + 0.2 * np.cos(t), lambda t: b0 + np.sin(t + 0.4), 2048)


@pytest.mark.parametrize("b0,direction", [(0.0, "Backward"), (0.05, "Forward"), (-0.05, "Backward")])
def test_laplace_direction(b0, direction):
    curve = laplace_blowup(_laplace_coef(b0), harmonic_1d(), [1, 2])
    assert curve.direction == direction


@pytest.mark.parametrize("b0", [0.0, 0.05, -0.05])
def test_laplace_value_matches_direct_solve(b0):
    c = _laplace_coef(b0)
    sys = harmonic_1d()
    curve = laplace_blowup(c, sys, [1, 2])
    for p in curve.points:
        m = laplace_mode_data(c, p.j, p.lam, curve)
        sol = solve_geometric(m, c, curve.direction, route="spectral")
        u_star = sol.u(np.array([curve.t_star]))[0] * np.exp(sol.log_scale)
        assert np.log(abs(u_star)) == pytest.approx(p.log_abs_u, abs=1e-8)


def test_laplace_blowup_grows():
    curve = laplace_blowup(_laplace_coef(), harmonic_1d(), [2 ** k for k in range(0, 12, 2)])
    assert curve.k == 1 and curve.increasing


def test_laplace_requires_sign_change():
    c = Coefficient.from_callables(lambda t: 0.37 + 0 * t, lambda t: 1 + 0 * t, 64)
    with pytest.raises(ValueError):
        laplace_blowup(c, harmonic_1d(), [1])


def test_diophantine_counterexample_matches_direct_solve():
    c = Coefficient.from_callables(lambda t: 0.41 + 0.2 * np.cos(t), lambda t: 0 * t, 1024)
    sys = harmonic_1d()
    scan = SimpleNamespace(verdict="Violated", witnesses=[3, 8])
    curve = diophantine_counterexample(c, sys, scan)
    for p in curve.points:
        m = diophantine_mode_data(c, p.j, p.lam, curve.eps0)
        sol = solve_geometric(m, c, "Backward", route="quadrature")
        u_pi = sol.u(np.array([pi]))[0] * np.exp(sol.log_scale)
        assert np.log(abs(u_pi)) == pytest.approx(p.log_abs_u, abs=1e-8)
        assert p.lower_bound_ok


def test_diophantine_counterexample_rejects_satisfied_scan():
    c = Coefficient.from_callables(lambda t: (sqrt(5) - 1) / 2 + 0 * t, lambda t: 0 * t, 64)
    with pytest.raises(ValueError):
        diophantine_counterexample(c, harmonic_1d(), SimpleNamespace(verdict="Satisfied", witnesses=[]))


def test_gs_norm_maximizer_for_constant_mode():
    # sup_M 9^M / M! ties at M = 8 and 9; the larger index is reported
    g = TorusFunction(np.ones(64, dtype=complex))
    v = gs_norm([(9.0, g, 0.0)], NormParams(C=1.0, mu=0.5), m=2)
    assert v.M == 9 and v.gamma == 0
    assert v.log_value == pytest.approx(9 * log(9) - lgamma(10) + 0.5 * log(2 * pi), rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(1.0, 50.0), st.floats(1.5, 20.0))
def test_gs_norm_nonincreasing_in_C(lam, C):
    g = TorusFunction(np.exp(1j * np.cos(nodes(64))))
    small = gs_norm([(lam, g, 0.0)], NormParams(C=C))
    large = gs_norm([(lam, g, 0.0)], NormParams(C=2 * C))
    assert large.log_value <= small.log_value + 1e-12


def test_laplace_on_nonresonant_subsequence():
    # zero mean of b with c0 = 1/3: modes with 2j + 1 not divisible by 3 are non-resonant
    c = Coefficient.from_callables(lambda t: 1 / 3 + 0 * t, np.sin, 1024)
    js = [j for j in (2 ** k for k in range(2, 12)) if (2 * j + 1) % 3]
    curve = laplace_blowup(c, harmonic_1d(), js)
    assert curve.increasing and curve.k == 1


def test_diophantine_counterexample_negative_eigenvalues():
    c = Coefficient.from_callables(lambda t: 0.41 + 0.2 * np.cos(t), lambda t: 0 * t, 1024)
    sys = custom_spectrum([-7.0, -17.0])
    curve = diophantine_counterexample(c, sys, SimpleNamespace(verdict="Violated", witnesses=[0, 1]))
    for p in curve.points:
        m = diophantine_mode_data(c, p.j, p.lam, curve.eps0)
        sol = solve_geometric(m, c, "Forward", route="quadrature")
        u_pi = sol.u(np.array([pi]))[0] * np.exp(sol.log_scale)
        assert np.log(abs(u_pi)) == pytest.approx(p.log_abs_u, abs=1e-8)
