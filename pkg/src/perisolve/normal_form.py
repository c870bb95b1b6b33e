"""Mode-wise conjugation removing the oscillating part of a(t).

Multiplying mode j by exp(-i lam_j A(t)), A = int_0^t a - a0 t, turns
D_t + (a + ib)P into D_t + (a0 + ib)P.  When every mode is resonant the
full primitive int_0^t a can be removed instead, leaving D_t + ib P.
"""

from __future__ import annotations

import numpy as np

from .admissibility import ModeData, is_admissible
from .diophantine import zset
from .torus import Coefficient, TorusFunction, nodes, spectral_derivative


def normal_form_coefficient(c, full=False):
    """Coefficient of the conjugated operator: a0 + ib, or ib for the full variant."""
    a = TorusFunction.constant(0.0 if full else c.a0, c.N)
    return Coefficient(a, c.b)


def phase(lam, c, full=False):
    """The real phase lam * A(t) (or lam * int_0^t a for the full variant)."""
    A = c.A.samples.real
    if full:
        A = A + c.a0 * nodes(c.N)
    return lam * A


def _check_full(c, sys, J):
    if sys is None:
        raise ValueError("the full conjugation needs the spectrum to check resonance")
    zs = zset(sys, c.c0, J)
    if zs.classification != "AllModes":
        raise ValueError("full conjugation requires every mode to be resonant")


def conjugate(modes, c, direction="Forward", full=False, sys=None):
    """Apply the conjugation (Forward) or its inverse to a list of ModeData."""
    if direction not in ("Forward", "Inverse"):
        raise ValueError("direction must be Forward or Inverse")
    if full:
        _check_full(c, sys, max((m.j for m in modes), default=0))
    sign = -1.0 if direction == "Forward" else 1.0
    out = []
    for m in modes:
        rot = np.exp(1j * sign * phase(m.lam, c, full))
        out.append(ModeData(m.j, m.lam, TorusFunction(m.f.samples * rot), m.log_scale))
    return out


def apply_operator(u, lam, c):
    """Mode action of D_t + c P: -i u' + lam c u."""
    return -1j * spectral_derivative(u) + lam * (c.c * u)


def verify_conjugation(c, modes, full=False, sys=None):
    """Largest relative discrepancy between Psi^{-1} L Psi u and the normal form applied to u."""
    if full:
        _check_full(c, sys, max((m.j for m in modes), default=0))
    nf = normal_form_coefficient(c, full)
    worst = 0.0
    for m in modes:
        rot = np.exp(-1j * phase(m.lam, c, full))
        psi_u = TorusFunction(m.f.samples * rot)
        lhs = apply_operator(psi_u, m.lam, c).samples / rot
        rhs = apply_operator(m.f, m.lam, nf)
        scale = max(rhs.sup(), abs(m.lam) * m.f.sup(), spectral_derivative(m.f).sup(), 1e-300)
        worst = max(worst, float(np.max(np.abs(lhs - rhs.samples)) / scale))
    return worst


def roundtrip_error(modes, c):
    """sup |Psi Psi^{-1} u - u| / sup |u| over the modes."""
    back = conjugate(conjugate(modes, c, "Inverse"), c, "Forward")
    worst = 0.0
    for m, b in zip(modes, back):
        s = max(m.f.sup(), 1e-300)
        worst = max(worst, float(np.max(np.abs(m.f.samples - b.f.samples)) / s))
    return worst


def transfer_admissibility(modes, c, resonant, tol=1e-10):
    """Map data admissible for the normal form to the original operator and re-check."""
    mapped = conjugate(modes, c, "Forward")
    return is_admissible(mapped, c, resonant, tol)
