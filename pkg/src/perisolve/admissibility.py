"""Compatibility conditions on resonant modes and the kernel of the transpose.

For a resonant mode j the periodic problem is solvable only if the weighted
mean of f_j against w_j(t) = exp(i lambda_j int_0^t c) vanishes.  Weights
grow like exp(-lambda_j B(t)), so all integrals are evaluated as a mantissa
times exp(log_scale) with the exponent maximum taken out first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diophantine import zset
from .torus import TWO_PI, TorusFunction, nodes, spectral_derivative

GUARD = 600.0
DEFAULT_TOL = 1e-10


@dataclass
class ModeData:
    """Right-hand-side coefficient f_j(t) for eigenvalue ``lam``.

    The represented function is ``f.samples * exp(log_scale)``; ``log_scale``
    is a float or an array of per-node log-envelopes.
    """

    j: int
    lam: float
    f: TorusFunction
    log_scale: float | np.ndarray = 0.0

    @property
    def N(self):
        return self.f.N

    @property
    def scalar_scale(self):
        return np.ndim(self.log_scale) == 0

    def envelope(self):
        return np.broadcast_to(np.asarray(self.log_scale, dtype=float), (self.N,))

    def resample(self, N):
        if N == self.N:
            return self
        if not self.scalar_scale:
            raise ValueError("cannot resample a mode with a per-node envelope")
        return ModeData(self.j, self.lam, self.f.resample(N), self.log_scale)

    def values(self):
        """Plain samples (may overflow for large envelopes)."""
        return self.f.samples * np.exp(self.envelope())


@dataclass(frozen=True)
class ScaledValue:
    """A complex number stored as mantissa * exp(log_scale)."""

    mantissa: complex
    log_scale: float

    @property
    def value(self):
        return self.mantissa * np.exp(self.log_scale)

    @property
    def log_abs(self):
        m = abs(self.mantissa)
        return -np.inf if m == 0 else float(np.log(m) + self.log_scale)


def weight_exponent(lam, c):
    """Real and imaginary parts of i*lam*int_0^t c on the grid."""
    t = nodes(c.N)
    B = c.B_periodic.samples.real + c.b0 * t
    A = c.A.samples.real + c.a0 * t
    return -lam * B, lam * A


def _integrand(mode, c):
    re, im = weight_exponent(mode.lam, c)
    re = re + mode.envelope()
    top = float(np.max(re))
    return mode.f.samples * np.exp(re - top + 1j * im), top


def compatibility_integral(mode, c, scaled=None):
    """Integral of exp(i lam int_0^t c) f_j(t) over one period.

    Returns a complex number, or a :class:`ScaledValue` when ``scaled`` is
    true or the weight spans more than the overflow guard.
    """
    if mode.N != c.N:
        raise ValueError("mode and coefficient grids differ")
    g, top = _integrand(mode, c)
    val = TWO_PI * np.mean(g)
    spread = abs(mode.lam) * float(np.ptp(c.B()))
    if scaled is None:
        scaled = spread > GUARD or top > GUARD or not mode.scalar_scale
    if scaled:
        return ScaledValue(complex(val), top)
    return complex(val * np.exp(top))


def relative_compatibility(mode, c):
    """|integral| divided by the integral of its modulus (scale free, in [0, 1])."""
    g, _ = _integrand(mode, c)
    denom = np.mean(np.abs(g))
    if denom == 0:
        return 0.0
    return float(abs(np.mean(g)) / denom)


def resonant_indices(sys, c, J):
    return zset(sys, c.c0, J).members


@dataclass
class AdmissibilityReport:
    admissible: bool
    residuals: dict = field(default_factory=dict)


def is_admissible(modes, c, resonant, tol=DEFAULT_TOL):
    """Check the compatibility condition on every resonant mode present.

    ``resonant`` is a collection of resonant indices.  Residuals are the
    scale-free ratios of :func:`relative_compatibility`.
    """
    res = set(int(j) for j in resonant)
    out = {}
    for m in modes:
        if m.j in res:
            out[m.j] = relative_compatibility(m, c)
    ok = all(r <= tol for r in out.values())
    return AdmissibilityReport(ok, out)


def project_mode(mode, c):
    """Remove the component along conj(w) so the compatibility integral vanishes."""
    re, im = weight_exponent(mode.lam, c)
    env = mode.envelope()
    I = compatibility_integral(mode, c, scaled=True)
    # int |w|^2 = exp(2 wmax) * mean(exp(2 (re - wmax))) * 2 pi
    wmax = float(np.max(re))
    norm_m = TWO_PI * np.mean(np.exp(2.0 * (re - wmax)))
    if norm_m < 1e-300:
        raise FloatingPointError("degenerate pairing in admissibility projection")
    if I.mantissa == 0:
        return mode
    log_alpha = np.log(abs(I.mantissa)) + I.log_scale - 2.0 * wmax - np.log(norm_m)
    phase_alpha = np.angle(I.mantissa)
    # correction alpha * conj(w), expressed in units of the mode envelope
    corr = np.exp(log_alpha + re - env + 1j * (phase_alpha - im))
    return ModeData(mode.j, mode.lam, mode.f - corr, mode.log_scale)


def project_admissible(modes, c, resonant):
    res = set(int(j) for j in resonant)
    return [project_mode(m, c) if m.j in res else m for m in modes]


# -- kernel of the transpose -------------------------------------------------


@dataclass
class KernelElement:
    """omega(t) = eta * exp(i lam int_0^t c), stored as mantissa * exp(log_scale)."""

    ell: int
    lam: float
    eta: complex
    omega: TorusFunction
    log_scale: float
    periodicity_gap: float


def kernel_element(ell, eta, c, sys, J=None, tol=1e-10):
    """Kernel element of the transposed operator for a resonant index ``ell``."""
    zs = zset(sys, c.c0, max(ell, J or ell))
    if ell not in zs:
        raise ValueError(f"mode {ell} is not resonant; its kernel element is not periodic")
    lam = float(sys.eigenvalue(ell))
    re, im = weight_exponent(lam, c)
    top = float(np.max(re))
    omega = TorusFunction(eta * np.exp(re - top + 1j * im))
    # one period advances the weight by exp(2 pi i lam c0)
    gap = abs(np.exp(2j * np.pi * lam * c.c0) - 1.0)
    if gap > tol:
        raise ValueError(f"kernel element for mode {ell} not periodic (gap {gap:.2e})")
    return KernelElement(ell, lam, complex(eta), omega, top, float(gap))


def transpose_apply(v, lam, c):
    """Mode action of the transposed operator: i v' + lam c v."""
    return 1j * spectral_derivative(v) + lam * (c.c * v)


def pairing(omega, mode, c):
    """Bilinear pairing int omega * f over one period, as a ScaledValue."""
    g = omega.omega.samples * mode.f.samples
    env = mode.envelope()
    top = float(np.max(env))
    val = TWO_PI * np.mean(g * np.exp(env - top))
    return ScaledValue(complex(val), omega.log_scale + top)
