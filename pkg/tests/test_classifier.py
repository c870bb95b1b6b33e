import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from perisolve.classifier import classify, classify_hypoellipticity
from perisolve.spectral import custom_spectrum, harmonic_1d
from perisolve.torus import Coefficient, SignProfile

N = 512
GOLDEN = (math.sqrt(5) - 1) / 2


def _coef(a, b):
    return Coefficient.from_callables(a, b, N)


def _const(v):
    return lambda t: v + 0 * t


@pytest.mark.parametrize("b,profile", [
    (_const(0.0), SignProfile.ZERO),
    (lambda t: 1 + np.sin(t), SignProfile.NON_NEGATIVE),
    (lambda t: -0.5 + 0.5 * np.cos(t), SignProfile.NON_POSITIVE),
])
def test_one_signed_b_with_diophantine_mean_is_solvable(b, profile):
    v = classify(_coef(_const(GOLDEN), b), harmonic_1d(), J=1024)
    assert v.branch == "a" and v.sign_profile == profile
    assert v.decision == "SolvableAtScale" and v.solvable


def test_one_signed_b_with_rational_mean_is_solvable():
    # resonances are allowed when b keeps one sign
    v = classify(_coef(_const(1 / 3), _const(0.0)), harmonic_1d(), J=1024, c0=Fraction(1, 3))
    assert v.decision == "SolvableAtScale"
    assert v.hypoellipticity.decision == "Fails"


def test_sign_change_with_nonzero_mean_is_not_solvable():
    v = classify(_coef(_const(1 / 3), lambda t: 0.1 + np.sin(t)), harmonic_1d(), J=256)
    assert v.branch == "b" and v.decision == "NotSolvable"
    assert v.witness["b0"] == pytest.approx(0.1)


def test_sign_change_with_nonresonant_tail_is_not_solvable():
    v = classify(_coef(_const(GOLDEN), np.sin), harmonic_1d(), J=256)
    assert v.decision == "NotSolvable"
    assert v.witness["nonresonant_modes"]


def test_sign_change_all_resonant_connected_is_solvable():
    v = classify(_coef(_const(1.0), np.sin), harmonic_1d(), J=256)
    assert v.decision == "SolvableAtScale"
    assert v.connectedness.connected
    assert v.hypoellipticity.decision == "Fails"


def test_sign_change_all_resonant_disconnected_is_not_solvable():
    v = classify(_coef(_const(1.0), lambda t: np.sin(2 * t)), harmonic_1d(), J=256)
    assert v.decision == "NotSolvable"
    assert v.witness["components"] >= 2
    assert v.witness["r"] == pytest.approx(0.5, abs=1e-6)


def test_finitely_many_nonresonant_modes_allowed():
    sys = custom_spectrum([1.5] + [float(k) for k in range(2, 300)])
    v = classify(_coef(_const(1.0), np.sin), sys, J=298)
    assert v.resonance.complement().tolist() == [0]
    assert v.decision == "SolvableAtScale"


def test_liouville_like_mean_fails_with_witnesses():
    # lambda_j = 2j + 1 + exp(-j^2.5/5000): c0 = 1 is far too well approximated
    with mpmath.workdps(1300):
        vals = [mpmath.mpf(2 * j + 1) + (mpmath.exp(-mpmath.mpf(j) ** 2.5 / 5000) if j else mpmath.mpf("0.3"))
                for j in range(513)]
        v = classify(_coef(_const(1.0), _const(0.0)), custom_spectrum(vals), J=512, c0=Fraction(1))
    assert v.decision == "NotSolvable" and v.witness["modes"]


@pytest.mark.parametrize("a0,b,expected", [
    (GOLDEN, _const(0.0), "Holds"),
    (1 / 3, _const(0.0), "Fails"),
    (1 / 3, lambda t: 1 + np.cos(t), "Holds"),
    (GOLDEN, np.sin, "Fails"),
])
def test_hypoellipticity(a0, b, expected):
    v = classify_hypoellipticity(_coef(_const(a0), b), harmonic_1d(), J=1024)
    assert v.decision == expected


def test_hypoellipticity_implies_solvability_on_examples():
    for a0 in (GOLDEN, 1 / 3, 1.0, math.sqrt(2)):
        for b in (_const(0.0), lambda t: 1 + np.sin(t), np.sin, lambda t: np.sin(2 * t)):
            v = classify(_coef(_const(a0), b), harmonic_1d(), J=512)
            if v.hypoellipticity.decision == "Holds":
                assert v.decision == "SolvableAtScale"
