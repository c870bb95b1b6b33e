"""Acceptance criteria, one test group per criterion.

A pass/fail line per criterion is printed in the pytest terminal summary.
Run alone with ``python3 -m pytest tests/test_acceptance.py``.
"""

import time
from fractions import Fraction

import numpy as np
import pytest

from perisolve.admissibility import ModeData, project_mode, resonant_indices
from perisolve.classifier import classify
from perisolve.diophantine import condition_A_scan, condition_B_scan, zset
from perisolve.modes import is_resonant, cauchy_solve, solve_all, solve_geometric, solve_mode
from perisolve.necessity import hormander_curve, laplace_blowup
from perisolve.normal_form import normal_form_coefficient, roundtrip_error, transfer_admissibility, verify_conjugation
from perisolve.problem import planted_decay_modes
from perisolve.spectral import harmonic_1d, harmonic_nd, weyl_fit
from perisolve.torus import Coefficient, TorusFunction, connectedness_scan, nodes


def _coef(a, b, N=512):
    return Coefficient.from_callables(a, b, N)


# -- 1 ------------------------------------------------------------------------------


@pytest.mark.criterion(1)
def test_example2_cauchy_matches_closed_form():
    sys = harmonic_1d()
    J = 64
    c = _coef(lambda t: np.sin(t) + np.cos(t), lambda t: 0 * t, 256)
    rng = np.random.default_rng(11)
    g = np.zeros(J + 1, dtype=complex)
    idx = rng.choice(J + 1, size=16, replace=False)
    g[idx] = rng.normal(size=16) + 1j * rng.normal(size=16)
    start = time.perf_counter()
    res = cauchy_solve(c, sys, [], g, J)
    elapsed = time.perf_counter() - start
    worst = 0.0
    for cm in res:
        sol = cm.solution
        t = nodes(sol.N)
        exact = g[cm.j] * np.exp(-1j * cm.lam * (np.sin(t) - np.cos(t) + 1))
        worst = max(worst, float(np.max(np.abs(sol.values() - exact))))
    assert worst <= 1e-8
    assert elapsed < 5.0


# -- 2 ------------------------------------------------------------------------------


@pytest.mark.criterion(2)
def test_example1_classified_solvable_branch_a():
    sys = harmonic_1d()
    c = _coef(lambda t: 0 * t + 1 / 3, lambda t: 0 * t)
    v = classify(c, sys, J=4096, c0=Fraction(1, 3))
    assert v.branch == "a"
    assert v.decision == "SolvableAtScale"
    assert abs(v.scan.min_distance - 1 / 3) <= 1e-12


@pytest.mark.criterion(2)
@pytest.mark.parametrize("c0", [Fraction(1, 3), 1 / 3])
def test_example1_resonant_set_matches_congruence(c0):
    J = 4096
    zs = zset(harmonic_1d(), c0, J)
    expected = [j for j in range(J + 1) if (2 * j + 1) % 3 == 0]
    assert zs.members.tolist() == expected


# -- 3 ------------------------------------------------------------------------------


@pytest.mark.criterion(3)
def test_backward_and_forward_formulas_agree():
    rng = np.random.default_rng(2024)
    N = 256
    t = nodes(N)
    f = TorusFunction(np.exp(np.cos(t)) * (1 + 0.3j * np.sin(2 * t)))
    basis = np.array([np.cos(t), np.sin(t), np.cos(2 * t), np.sin(2 * t)])
    start = time.perf_counter()
    worst, n = 0.0, 0
    while n < 50:
        ca = rng.uniform(-0.3, 0.3, 4)
        cb = rng.uniform(-0.05, 0.05, 4)
        a0, b0 = rng.uniform(-1, 1), rng.uniform(-0.5, 0.5)
        lam = rng.uniform(-50, 50)
        c = Coefficient(TorusFunction(a0 + ca @ basis), TorusFunction(b0 + cb @ basis))
        if is_resonant(lam, c.c0):
            continue
        m = ModeData(n, lam, f)
        u1 = solve_geometric(m, c, "Backward").values()
        u2 = solve_geometric(m, c, "Forward").values()
        worst = max(worst, float(np.max(np.abs(u1 - u2)) / np.max(np.abs(u1))))
        n += 1
    assert worst <= 1e-10
    assert time.perf_counter() - start < 10.0


# -- 4 ------------------------------------------------------------------------------

_LAMBDAS = [1.0, 3.0, 5.0, 9.0, 15.0, 21.0, -1.0, -3.0, -5.0, -9.0, -15.0, -21.0]
_MATRIX = {
    "sin t, all modes resonant": (lambda t: 0 * t, lambda t: np.sin(t), None),
    "sin t, mixed resonance": (lambda t: 1 / 3 + 0.2 * np.cos(t), lambda t: np.sin(t), None),
    "sin 2t restricted": (lambda t: 0.2 * np.cos(t), lambda t: np.sin(2 * t), "ResonantDuhamel"),
    "sin 2t restricted, mixed": (lambda t: 1 / 3 + 0.2 * np.cos(t), lambda t: np.sin(2 * t), "ResonantDuhamel"),
    "b >= 0": (lambda t: 0.3 + 0.2 * np.cos(t), lambda t: 0.5 + 0.4 * np.sin(t), None),
    "b >= 0 with zeros": (lambda t: 0 * t + 0.3, lambda t: np.sin(t) ** 2, None),
    "b <= 0": (lambda t: 0 * t + 0.1, lambda t: -0.5 - 0.4 * np.cos(2 * t), None),
    "b = 0, irrational mean": (lambda t: (np.sqrt(5) - 1) / 2 + 0.1 * np.sin(t), lambda t: 0 * t, None),
    "b = 0, rational mean": (lambda t: 1 / 3 + 0.1 * np.sin(t), lambda t: 0 * t, None),
}


@pytest.mark.criterion(4)
@pytest.mark.parametrize("case", list(_MATRIX))
def test_solver_residual_and_periodicity(case):
    a, b, resonant_strategy = _MATRIX[case]
    c = _coef(a, b)
    t = nodes(c.N)
    f = TorusFunction(np.exp(np.cos(t)) * (1 + 0.3j * np.sin(2 * t)))
    for lam in _LAMBDAS:
        res = is_resonant(lam, c.c0)
        m = ModeData(0, lam, f)
        if res:
            m = project_mode(m, c)
        strategy = resonant_strategy if res else None
        sol = solve_mode(m, c, res, strategy=strategy)
        assert sol.residual <= 1e-8, (case, lam, sol.strategy, sol.residual)
        assert sol.periodicity_gap <= 1e-10, (case, lam, sol.strategy, sol.periodicity_gap)


# -- 5 ------------------------------------------------------------------------------


def _random_coefficient(rng, N=256, a0=None, b0=None):
    t = nodes(N)
    a = (rng.uniform(-1, 1) if a0 is None else a0) + sum(
        rng.uniform(-0.4, 0.4) * np.cos(k * t) + rng.uniform(-0.4, 0.4) * np.sin(k * t) for k in (1, 2, 3))
    b = (rng.uniform(-0.3, 0.3) if b0 is None else b0) + sum(
        rng.uniform(-0.4, 0.4) * np.cos(k * t) + rng.uniform(-0.4, 0.4) * np.sin(k * t) for k in (1, 2))
    return Coefficient(TorusFunction(a), TorusFunction(b))


def _random_modes(rng, N, J, sys):
    t = nodes(N)
    lams = sys.eigenvalues(J)
    out = []
    for j in range(J + 1):
        k = rng.normal(size=3) + 1j * rng.normal(size=3)
        f = k[0] + k[1] * np.cos(t) + k[2] * np.sin(2 * t)
        out.append(ModeData(j, float(lams[j]), TorusFunction(f)))
    return out


@pytest.mark.criterion(5)
def test_conjugation_identities():
    rng = np.random.default_rng(5)
    sys = harmonic_1d()
    for _ in range(5):
        c = _random_coefficient(rng, N=1024)
        modes = _random_modes(rng, c.N, 32, sys)
        assert verify_conjugation(c, modes) <= 1e-9
        assert roundtrip_error(modes, c) <= 1e-12


@pytest.mark.criterion(5)
def test_admissibility_transfers_through_conjugation():
    rng = np.random.default_rng(6)
    sys = harmonic_1d()
    for _ in range(3):
        c = _random_coefficient(rng, N=1024, a0=1 / 3, b0=0.0)
        modes = _random_modes(rng, c.N, 32, sys)
        nf = normal_form_coefficient(c)
        resonant = resonant_indices(sys, c, 32)
        assert resonant.size > 0
        # admissible for the normal form, then mapped to the original operator
        admissible_nf = [project_mode(m, nf) if m.j in set(resonant.tolist()) else m for m in modes]
        rep = transfer_admissibility(admissible_nf, c, resonant)
        assert rep.admissible
        assert max(rep.residuals.values()) <= 1e-10


# -- 6 ------------------------------------------------------------------------------


def _dense_components(B_exact, r, N=2 ** 14):
    """Count circular runs of {B > r} on a dense grid."""
    t = np.arange(N) * 2 * np.pi / N
    mask = B_exact(t) > r
    if mask.all():
        return 1
    if not mask.any():
        return 0
    return int(np.sum(mask & ~np.roll(mask, 1)))


@pytest.mark.criterion(6)
def test_connectedness_distinguishes_sin_and_sin2():
    c1 = _coef(lambda t: 0 * t, np.sin)
    c2 = _coef(lambda t: 0 * t, lambda t: np.sin(2 * t))
    s1 = connectedness_scan(c1.B_closed())
    s2 = connectedness_scan(c2.B_closed())
    assert s1.connected
    assert not s2.connected
    n = _dense_components(lambda t: (1 - np.cos(2 * t)) / 2, s2.r_witness)
    assert n >= 2


# -- 7 ------------------------------------------------------------------------------


@pytest.mark.criterion(7)
def test_hormander_ratio_diverges():
    sys = harmonic_1d()
    c = _coef(lambda t: 0 * t, lambda t: np.sin(2 * t), 4096)
    start = time.perf_counter()
    w, pts = hormander_curve(c, sys, list(range(1, 21)))
    elapsed = time.perf_counter() - start
    r = [p.log_ratio for p in pts]
    assert all(b > a for a, b in zip(r, r[1:]))
    assert r[-1] - r[0] >= 5.0
    pairing = [p.pairing for p in pts]
    assert max(pairing) - min(pairing) <= 1e-9
    assert all(p.admissible for p in pts)
    assert elapsed < 60.0


# -- 8 ------------------------------------------------------------------------------


@pytest.mark.criterion(8)
def test_laplace_blowup_exceeds_threshold():
    sys = harmonic_1d()
    c = _coef(lambda t: 0 * t, lambda t: 0.3 + np.sin(t))
    js = [2 ** k for k in range(18)]
    cur = laplace_blowup(c, sys, js)
    vals = [p.scaled for p in cur.points]
    assert cur.k == 1
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert max(vals) > 1e3


# -- 9 ------------------------------------------------------------------------------


@pytest.mark.criterion(9)
@pytest.mark.parametrize("mu", [0.5, 1.0])
def test_planted_decay_recovered(mu):
    sys = harmonic_1d()
    c = _coef(lambda t: 0.3 + 0.2 * np.cos(t), lambda t: 0 * t + 0.7, 128)
    modes = planted_decay_modes(c, sys, 0.7, mu, 256)
    res = solve_all(c, sys, modes)
    assert abs(res.decay.eps_hat - 0.7) / 0.7 <= 0.10
    assert abs(res.decay.mu_hat - mu) / mu <= 0.10


# -- 10 -----------------------------------------------------------------------------


@pytest.mark.criterion(10)
def test_small_divisor_two_sided_bound():
    rng = np.random.default_rng(10)
    theta = rng.uniform(-50, 50, 10_000)
    d = np.abs(theta - np.rint(theta))
    mag = np.abs(1 - np.exp(2j * np.pi * theta))
    assert np.all(4 * d <= mag * (1 + 1e-12))
    assert np.all(mag <= 2 * np.pi * d * (1 + 1e-12))


_SCAN_MATRIX = [
    (harmonic_1d(), Fraction(1, 3)),
    (harmonic_1d(), (np.sqrt(5) - 1) / 2),
    (harmonic_1d(), np.sqrt(2)),
    (harmonic_1d(), 0.25),
    (harmonic_nd(2), (np.sqrt(5) - 1) / 2),
    (harmonic_nd(2), Fraction(2, 7)),
    (harmonic_1d(), 0.3 + 0.2j),
]


@pytest.mark.criterion(10)
@pytest.mark.parametrize("sys,c0", _SCAN_MATRIX)
def test_condition_B_implies_condition_A(sys, c0):
    J = 2048
    a = condition_A_scan(sys, c0, 0.5, sys.n, J)
    b = condition_B_scan(sys, c0, 0.5, sys.n, J)
    if b.verdict == "Satisfied":
        assert a.verdict == "Satisfied"


@pytest.mark.criterion(10)
@pytest.mark.parametrize("sys,expected", [(harmonic_1d(), 1.0), (harmonic_nd(2), 0.5)])
def test_weyl_exponent(sys, expected):
    _, exponent = weyl_fit(sys, 2048)
    assert abs(exponent - expected) / expected <= 0.05


# -- 11 -----------------------------------------------------------------------------

_GH_MATRIX = {
    "c = 1/3": (lambda t: 0 * t + 1 / 3, lambda t: 0 * t),
    "golden mean, b = 0": (lambda t: (np.sqrt(5) - 1) / 2 + 0.2 * np.cos(t), lambda t: 0 * t),
    "b > 0": (lambda t: 0.2 + 0 * t, lambda t: 0.5 + 0.3 * np.sin(t)),
    "b >= 0 with zeros": (lambda t: np.cos(t), lambda t: np.sin(t) ** 2),
    "b = sin t": (lambda t: 0 * t, np.sin),
    "b = sin 2t": (lambda t: 0 * t, lambda t: np.sin(2 * t)),
    "b = 0.3 + sin t": (lambda t: 0 * t, lambda t: 0.3 + np.sin(t)),
    "b = 0, a0 = 1/4": (lambda t: 0.25 + 0.1 * np.sin(2 * t), lambda t: 0 * t),
}


@pytest.mark.criterion(11)
@pytest.mark.parametrize("case", list(_GH_MATRIX))
def test_hypoellipticity_implies_solvability(case):
    sys = harmonic_1d()
    c = _coef(*_GH_MATRIX[case])
    v = classify(c, sys, J=2048)
    if v.hypoellipticity.decision == "Holds":
        assert v.decision != "NotSolvable"


@pytest.mark.criterion(11)
def test_constant_one_third_is_solvable_not_hypoelliptic():
    sys = harmonic_1d()
    c = _coef(lambda t: 0 * t + 1 / 3, lambda t: 0 * t)
    v = classify(c, sys, c0=Fraction(1, 3))
    assert v.hypoellipticity.decision == "Fails"
    assert v.decision == "SolvableAtScale"
