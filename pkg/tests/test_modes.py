import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perisolve.admissibility import ModeData
from perisolve.modes import (
    ArcError,
    PeriodicityError,
    auto_select,
    cauchy_solve,
    decay_fit,
    homogeneous_mode,
    is_resonant,
    log_prefactor,
    residual,
    solve_all,
    solve_arc,
    solve_geometric,
    solve_mode,
    solve_resonant,
)
from perisolve.spectral import harmonic_1d
from perisolve.torus import Coefficient, TorusFunction, nodes, spectral_derivative

N = 256


def _const(a, b=0.0, n=N):
    return Coefficient.from_callables(lambda t: a + 0 * t, lambda t: b + 0 * t, n)


def _image(u, lam, c):
    """Right-hand side f with u' + i lam c u = i f."""
    return -1j * spectral_derivative(u) + lam * (c.c * u)


@pytest.mark.parametrize("k", [0, 1, -3])
@pytest.mark.parametrize("direction", ["Backward", "Forward"])
@pytest.mark.parametrize("route", ["spectral", "quadrature"])
def test_constant_coefficient_exponential_data(k, direction, route):
    # u' + i lam c u = i e^{ikt} has the periodic solution e^{ikt} / (k + lam c)
    a, b, lam = 0.37, 0.1, 3.0
    c = _const(a, b)
    t = nodes(N)
    f = TorusFunction(np.exp(1j * k * t))
    sol = solve_geometric(ModeData(1, lam, f), c, direction, route=route)
    exact = np.exp(1j * k * t) / (k + lam * complex(a, b))
    assert np.allclose(sol.values(), exact, atol=1e-11)


@pytest.mark.parametrize("direction", ["Backward", "Forward"])
def test_log_prefactor_matches_direct_formula(direction):
    lam, c0 = 5.0, 0.23 + 0.04j
    if direction == "Backward":
        direct = 1j / (1 - cmath.exp(-2j * math.pi * lam * c0))
    else:
        direct = 1j / (cmath.exp(2j * math.pi * lam * c0) - 1)
    lp = log_prefactor(lam, c0, direction)
    assert cmath.exp(lp) == pytest.approx(direct, rel=1e-12)


def test_log_prefactor_rejects_resonance():
    with pytest.raises(ValueError):
        log_prefactor(3.0, 1 / 3, "Backward")


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.45), st.floats(-0.5, 0.5), st.floats(0.5, 6.0),
       st.lists(st.floats(-1, 1), min_size=3, max_size=3))
def test_backward_and_forward_agree(a0, b_amp, lam, cf):
    c = Coefficient.from_callables(lambda t: a0 + 0.3 * np.cos(t), lambda t: b_amp * np.sin(t), N)
    if is_resonant(lam, c.c0) or abs(lam * a0 - round(lam * a0)) < 1e-3:
        return
    t = nodes(N)
    f = TorusFunction(cf[0] + cf[1] * np.cos(2 * t) + 1j * cf[2] * np.sin(t))
    m = ModeData(1, lam, f)
    ub = solve_geometric(m, c, "Backward", route="quadrature")
    uf = solve_geometric(m, c, "Forward", route="quadrature")
    scale = max(ub.sup_norm, 1e-12)
    assert np.max(np.abs(ub.values() - uf.values())) < 1e-8 * scale
    assert ub.residual < 1e-8 and uf.residual < 1e-8


def test_geometric_recovers_manufactured_solution():
    c = Coefficient.from_callables(lambda t: 0.41 + 0.2 * np.sin(t), lambda t: 0.3 * np.cos(t), N)
    u = TorusFunction(np.exp(1j * np.sin(2 * nodes(N))))
    lam = 7.0
    sol = solve_mode(ModeData(3, lam, _image(u, lam, c)), c)
    assert np.allclose(sol.values(), u.samples, atol=1e-9)


def test_geometric_rejects_resonant_mode():
    with pytest.raises(ValueError):
        solve_geometric(ModeData(1, 3.0, TorusFunction(np.ones(N))), _const(1 / 3))


def test_resonant_duhamel_zero_initial_value():
    c = Coefficient.from_callables(lambda t: 1 / 3 + 0.2 * np.cos(t), lambda t: np.sin(2 * t), N)
    u = TorusFunction(np.exp(1j * np.sin(nodes(N))) - 1)
    sol = solve_resonant(ModeData(1, 3.0, _image(u, 3.0, c)), c)
    # u(0) = 0 pins the solution down uniquely
    assert np.allclose(sol.values(), u.samples, atol=1e-9)
    assert sol.residual < 1e-10


def test_resonant_duhamel_rejects_incompatible_data():
    c = _const(1 / 3)
    with pytest.raises(PeriodicityError):
        solve_resonant(ModeData(1, 3.0, TorusFunction(np.exp(-1j * nodes(N)))), c)


def test_arc_path_matches_duhamel_on_connected_superlevel_sets():
    c = Coefficient.from_callables(lambda t: 1 / 3 + 0 * t, lambda t: 0.5 * np.sin(t), N)
    u = TorusFunction(np.cos(nodes(N)) + 0.2j)
    m = ModeData(1, 3.0, _image(u, 3.0, c))
    arc = solve_arc(m, c)
    duh = solve_resonant(m, c)
    # both solve the same ODE and differ by a homogeneous solution
    diff = arc.values() - duh.values()
    hom = homogeneous_mode(3.0, c).u.samples
    ratio = diff / hom
    assert np.allclose(ratio, ratio[0], atol=1e-8)
    assert arc.residual < 1e-8


def test_arc_path_rejects_disconnected_superlevel_sets():
    c = Coefficient.from_callables(lambda t: 1 / 3 + 0 * t, lambda t: np.sin(2 * t), N)
    with pytest.raises(ArcError):
        solve_arc(ModeData(1, 3.0, TorusFunction(np.ones(N))), c)


@pytest.mark.parametrize("b,lam,expected", [
    (lambda t: 0 * t, 1.0, "GeometricBackward"),
    (lambda t: 1 + np.sin(t), 1.0, "GeometricBackward"),
    (lambda t: 1 + np.sin(t), -1.0, "GeometricForward"),
    (lambda t: -1 + np.sin(t), 1.0, "GeometricForward"),
])
def test_auto_select_by_sign_profile(b, lam, expected):
    c = Coefficient.from_callables(lambda t: 0.3 + 0 * t, b, 64)
    assert auto_select(ModeData(0, lam, TorusFunction(np.ones(64))), c) == expected


def test_auto_select_resonant():
    c = Coefficient.from_callables(lambda t: 1 / 3 + 0 * t, np.sin, 64)
    assert auto_select(ModeData(1, 3.0, TorusFunction(np.ones(64))), c) == "ArcPath"
    c0 = _const(1 / 3, n=64)
    assert auto_select(ModeData(1, 3.0, TorusFunction(np.ones(64))), c0) == "ResonantDuhamel"


def test_homogeneous_mode_periodicity_flag():
    assert homogeneous_mode(3.0, _const(1 / 3)).periodic
    h = homogeneous_mode(1.0, _const(1 / 3))
    assert not h.periodic
    assert h.gap == pytest.approx(abs(1 - cmath.exp(-2j * math.pi / 3)))


def test_residual_is_scale_invariant():
    c = _const(0.3)
    u = TorusFunction(np.cos(nodes(N)) + 0j)
    m = ModeData(0, 2.0, _image(u, 2.0, c))
    assert residual(u, m, c) < 1e-13
    bad = ModeData(0, 2.0, TorusFunction(np.ones(N)))
    r1 = residual(u, bad, c)
    r2 = residual(TorusFunction(u.samples * 1e-5), bad, c, np.log(1e5))
    assert r1 == pytest.approx(r2, rel=1e-10)


def test_decay_fit_recovers_planted_rate():
    j = np.arange(1, 200)
    y = 2.0 - 0.7 * j ** 0.5
    fit = decay_fit(j, y, n=1)
    assert fit.mu_hat == 1.0
    assert fit.eps_hat == pytest.approx(0.7, rel=1e-10)


def test_decay_fit_undefined_with_too_few_points():
    assert not decay_fit([1, 2], [0.0, -1.0]).defined


def test_solve_all_thread_count_does_not_change_results():
    c = Coefficient.from_callables(lambda t: 0.41 + 0.1 * np.cos(t), lambda t: 0.2 * np.sin(t), 128)
    sys = harmonic_1d()
    t = nodes(128)
    modes = [ModeData(j, sys.eigenvalue(j), TorusFunction(np.exp(-j) * np.exp(1j * np.cos(t))))
             for j in range(8)]
    r1 = solve_all(c, sys, modes, threads=1)
    r4 = solve_all(c, sys, modes, threads=4)
    for a, b in zip(r1.solutions, r4.solutions):
        assert np.array_equal(a.u.samples, b.u.samples) and a.log_scale == b.log_scale
    assert r1.failures == []


def test_solve_all_projects_incompatible_resonant_modes():
    c = _const(1 / 3, n=64)
    t = nodes(64)
    modes = [ModeData(1, 3.0, TorusFunction(np.exp(-1j * t) + np.cos(2 * t)))]
    with pytest.warns(RuntimeWarning):
        r = solve_all(c, harmonic_1d(), modes, project=True)
    assert r.solutions[0].residual < 1e-8


def test_cauchy_resonant_modes_take_initial_value():
    c = Coefficient.from_callables(lambda t: 1 / 3 + 0.1 * np.cos(t), lambda t: 0 * t, 128)
    sys = harmonic_1d()
    g = np.array([0.5, 1.0 + 1j, 0.0, 0.0, 2.0])
    out = cauchy_solve(c, sys, [], g, 4)
    t = nodes(128)
    for cm in out:
        if cm.resonant:
            exact = g[cm.j] * np.exp(-1j * cm.lam * (t / 3 + 0.1 * np.sin(t)))
            assert np.allclose(cm.solution.values(), exact, atol=1e-10)
        else:
            # non-resonant modes have only the zero periodic solution
            assert cm.mismatch == pytest.approx(abs(g[cm.j]))
    assert [cm.j for cm in out if cm.resonant] == [1, 4]


def test_resonant_duhamel_with_zero_coefficient():
    # u' = i e^{it} with u(0) = 0 gives e^{it} - 1
    t = nodes(64)
    sol = solve_resonant(ModeData(0, 5.0, TorusFunction(np.exp(1j * t))), _const(0.0, n=64))
    assert np.allclose(sol.values(), np.exp(1j * t) - 1, atol=1e-13)


def test_geometric_constant_solution():
    # u' + (i/2) u = i has the constant periodic solution 2
    sol = solve_geometric(ModeData(0, 1.0, TorusFunction(np.ones(64))), _const(0.5, n=64))
    assert np.allclose(sol.values(), 2.0, atol=1e-13)
