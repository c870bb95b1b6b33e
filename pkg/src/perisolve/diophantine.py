"""Resonances, small divisors and finite-scale Diophantine scans.

For a mean value c0 and spectrum lambda_j the quantities of interest are the
distances d_j = dist(c0 * lambda_j, Z) and the growth index
kappa_j = log(1/d_j) / j**(1/(2 n mu)).  A Diophantine lower bound of the
form |tau - c0 lambda_j| >= C_eps exp(-eps j**(1/(2 n mu))) for every eps
means kappa_j -> 0; the scans below test this trend on a window of modes.

Exact inputs (``fractions.Fraction`` or mpmath numbers, in the mean or in a
custom spectrum table) are handled in exact or arbitrary-precision arithmetic
so that planted near-resonances far below double precision stay visible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

DEFAULT_J = 4096
RESONANCE_RTOL = 1e-9
TREND_FACTOR = 2.0
BORDERLINE = 0.10


def torus_distance(theta):
    """Distance from theta to the nearest integer, in [0, 1/2]."""
    if isinstance(theta, Fraction):
        return abs(theta - round(theta))
    if isinstance(theta, mpmath.mpf):
        return abs(theta - mpmath.nint(theta))
    theta = np.asarray(theta, dtype=float)
    out = np.abs(theta - np.rint(theta))
    return float(out) if out.ndim == 0 else out


def _is_exact(x):
    return isinstance(x, (Fraction, mpmath.mpf, mpmath.mpc))


def _split_mean(c0):
    """Real and imaginary part of c0 keeping exact types when possible."""
    if isinstance(c0, Fraction):
        return c0, Fraction(0)
    if isinstance(c0, mpmath.mpc):
        return c0.real, c0.imag
    if isinstance(c0, mpmath.mpf):
        return c0, mpmath.mpf(0)
    c0 = complex(c0)
    return c0.real, c0.imag


@dataclass
class _Products:
    """Per-mode data for theta_j = Re(c0) * lambda_j."""

    lam: np.ndarray
    tau: np.ndarray
    dist: np.ndarray
    log_inv_dist: np.ndarray
    resonant: np.ndarray


def _products(sys, a0, J, tol):
    exact_spec = sys.exact
    if not (exact_spec or _is_exact(a0)):
        lam = sys.eigenvalues(J)
        theta = lam * float(a0)
        tau = np.rint(theta)
        d = np.abs(theta - tau)
        thr = np.full(J + 1, tol) if tol is not None else RESONANCE_RTOL * np.maximum(1.0, np.abs(lam))
        res = d <= thr
        with np.errstate(divide="ignore"):
            lid = -np.log(d)
        return _Products(lam, tau, d, lid, res)

    lams = sys.eigenvalues_exact(J)
    use_fraction = isinstance(a0, Fraction) and all(float(v).is_integer() and not isinstance(v, mpmath.mpf) for v in lams)
    lam_f = np.array([float(v) for v in lams])
    tau = np.empty(J + 1)
    d = np.empty(J + 1)
    lid = np.empty(J + 1)
    res = np.zeros(J + 1, dtype=bool)
    if use_fraction:
        for j, v in enumerate(lams):
            th = Fraction(int(v)) * a0
            dist = torus_distance(th)
            tau[j] = round(th)
            d[j] = float(dist)
            res[j] = dist <= (tol or 0)
            lid[j] = np.inf if dist == 0 else -float(mpmath.log(mpmath.mpf(dist.numerator) / dist.denominator))
        return _Products(lam_f, tau, d, lid, res)

    eps_rel = mpmath.mpf(10) ** (-(mpmath.mp.dps - 10))
    a0m = mpmath.mpf(a0) if not isinstance(a0, Fraction) else mpmath.mpf(a0.numerator) / a0.denominator
    for j, v in enumerate(lams):
        th = mpmath.mpf(v) * a0m
        t = mpmath.nint(th)
        dist = abs(th - t)
        tau[j] = float(t)
        d[j] = float(dist)
        thr = tol if tol is not None else eps_rel * max(1, abs(mpmath.mpf(v)))
        res[j] = dist <= thr
        lid[j] = np.inf if dist == 0 else float(-mpmath.log(dist))
    return _Products(lam_f, tau, d, lid, res)


# -- resonance set ---------------------------------------------------------


@dataclass(frozen=True)
class ResonanceSet:
    members: np.ndarray
    classification: str  # Empty, AllModes, FiniteAtScale, InfiniteAtScale
    J: int
    density: float

    @property
    def count(self):
        return int(self.members.size)

    def __contains__(self, j):
        return bool(np.isin(j, self.members))

    def complement(self):
        return np.setdiff1d(np.arange(self.J + 1), self.members)

    def complement_classification(self):
        comp = self.complement()
        if comp.size == 0:
            return "Empty"
        tail = comp[comp >= self.J // 2]
        return "InfiniteAtScale" if tail.size else "FiniteAtScale"


def _classify_members(members, J):
    if members.size == 0:
        return "Empty", 0.0
    tail = members[members >= J // 2]
    density = tail.size / (J - J // 2 + 1)
    if members.size == J + 1:
        return "AllModes", 1.0
    return ("InfiniteAtScale" if tail.size else "FiniteAtScale"), float(density)


def zset(sys, c0, J=DEFAULT_J, tol=None):
    """Indices j <= J with lambda_j c0 an integer (within tolerance).

    ``tol`` is an absolute tolerance on the distance; by default a relative
    tolerance 1e-9 * max(1, |lambda_j|) is used (or a precision-scaled one for
    arbitrary-precision data).
    """
    if sys.max_index() is not None:
        J = min(J, sys.max_index())
    a0, b0 = _split_mean(c0)
    im_tol = tol if tol is not None else RESONANCE_RTOL
    if abs(float(b0)) > im_tol:
        lam = sys.eigenvalues(J)
        members = np.flatnonzero(lam == 0)
    else:
        members = np.flatnonzero(_products(sys, a0, J, tol).resonant)
    cls, dens = _classify_members(members, J)
    return ResonanceSet(members, cls, J, dens)


# -- scans -----------------------------------------------------------------


@dataclass
class DiophantineScan:
    J: int
    condition: str  # "A" or "B"
    verdict: str  # Satisfied, Violated, Inconclusive
    branch: str  # "trend" or "complex-mean"
    lam: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)
    dist: np.ndarray = field(repr=False)
    kappa: np.ndarray = field(repr=False)
    witnesses: list
    ratio: float
    min_distance: float
    resonances: np.ndarray = field(repr=False)

    @property
    def satisfied(self):
        return self.verdict == "Satisfied"


def _kappa(log_inv_dist, mu, n):
    j = np.arange(log_inv_dist.size, dtype=float)
    scale = np.maximum(j, 1.0) ** (1.0 / (2 * n * mu))
    with np.errstate(invalid="ignore"):
        return log_inv_dist / scale


def _trend(kappa, J):
    lo = kappa[J // 4: J // 2 + 1]
    hi = kappa[J // 2: J + 1]
    lo_max = float(np.max(lo)) if lo.size else 0.0
    hi_max = float(np.max(hi)) if hi.size else 0.0
    if np.isinf(hi_max):
        return np.inf
    if lo_max <= 0:
        return 0.0 if hi_max <= 0 else np.inf
    return hi_max / (TREND_FACTOR * lo_max)


def _witnesses(kappa, J):
    """Record-breaking kappa_j in [J/4, J] above twice the window median."""
    window = np.arange(J // 4, J + 1)
    vals = kappa[window]
    finite = vals[np.isfinite(vals)]
    med = float(np.median(finite)) if finite.size else 0.0
    out = []
    best = -np.inf
    for j, k in zip(window, vals):
        if k > best:
            best = k
            if k > TREND_FACTOR * med and k > 0:
                out.append(int(j))
    return out


def _verdict_from_ratio(ratio):
    if abs(ratio - 1.0) <= BORDERLINE:
        return "Inconclusive"
    return "Satisfied" if ratio < 1.0 else "Violated"


def _scan(sys, c0, mu, n, J, tol, condition):
    if mu < 0.5:
        raise ValueError("mu must be >= 1/2")
    if sys.max_index() is not None:
        J = min(J, sys.max_index())
    a0, b0 = _split_mean(c0)
    lam = sys.eigenvalues(J)
    im_tol = tol if tol is not None else RESONANCE_RTOL
    if abs(float(b0)) > im_tol:
        # |tau - c0 lambda_j| >= |b0 lambda_j|: bounded below except at lambda_j = 0
        zero = np.flatnonzero(lam == 0)
        dist = np.abs(float(b0) * lam)
        kappa = np.zeros(J + 1)
        verdict = "Satisfied"
        wit = []
        if condition == "B" and zero.size:
            verdict, wit = "Violated", [int(j) for j in zero]
            kappa[zero] = np.inf
        return DiophantineScan(J, condition, verdict, "complex-mean", lam,
                               np.zeros(J + 1), dist, kappa, wit,
                               0.0, float(np.min(dist[dist > 0])) if np.any(dist > 0) else 0.0, zero)

    p = _products(sys, a0, J, tol)
    lid = p.log_inv_dist.copy()
    dist = p.dist.copy()
    if condition == "A":
        # nonzero differences only: resonant modes sit at distance 1 from the next integer
        dist[p.resonant] = 1.0
        lid[p.resonant] = 0.0
    else:
        lid[p.resonant] = np.inf
    kappa = _kappa(lid, mu, n)
    ratio = _trend(kappa, J)
    verdict = _verdict_from_ratio(ratio)
    wit = _witnesses(kappa, J)
    if condition == "B" and p.resonant.any():
        verdict = "Violated"
        wit = sorted(set(wit) | set(int(j) for j in np.flatnonzero(p.resonant)))
    if verdict == "Satisfied":
        wit = []
    nonzero = dist[~p.resonant] if condition == "A" else dist[dist > 0]
    mind = float(np.min(nonzero)) if nonzero.size else 1.0
    return DiophantineScan(J, condition, verdict, "trend", lam, p.tau, dist, kappa,
                           wit, float(ratio), mind, np.flatnonzero(p.resonant))


def condition_A_scan(sys, c0, mu=0.5, n=None, J=DEFAULT_J, tol=None):
    """Finite-scale test of the Diophantine condition that ignores exact resonances."""
    return _scan(sys, c0, mu, n or sys.n, J, tol, "A")


def condition_B_scan(sys, omega, mu=0.5, n=None, J=DEFAULT_J, tol=None):
    """Finite-scale test of the Diophantine condition that forbids exact resonances."""
    return _scan(sys, omega, mu, n or sys.n, J, tol, "B")


# -- small divisors --------------------------------------------------------


def _log_abs_expm1(x):
    """log|e^x - 1| for real x != 0."""
    if x > 0:
        return x + float(np.log(-np.expm1(-x)))
    return float(np.log(-np.expm1(x)))


def log_abs_one_minus_exp(x, d, log_d=None):
    """log|1 - e^{x + 2 pi i theta}| where d = dist(theta, Z).

    Uses |1 - e^{x+iy}|^2 = expm1(x)^2 + 4 e^x sin^2(pi d).
    """
    terms = []
    if x != 0:
        terms.append(2.0 * _log_abs_expm1(x))
    if d > 0 or (log_d is not None and np.isfinite(log_d)):
        if log_d is not None and d < 1e-8:
            log_sin = np.log(np.pi) + log_d
        else:
            log_sin = float(np.log(np.sin(np.pi * d)))
        terms.append(np.log(4.0) + x + 2.0 * log_sin)
    if not terms:
        return -np.inf
    return 0.5 * float(np.logaddexp.reduce(terms))


def mode_distance(lam, a0):
    """(d, log d) for dist(a0 * lam, Z), exact when the inputs are."""
    if _is_exact(lam) or _is_exact(a0):
        if isinstance(a0, Fraction) and not isinstance(lam, mpmath.mpf) and float(lam).is_integer():
            dist = torus_distance(Fraction(int(lam)) * a0)
            if dist == 0:
                return 0.0, -np.inf
            return float(dist), float(mpmath.log(mpmath.mpf(dist.numerator) / dist.denominator))
        lm = mpmath.mpf(lam)
        am = mpmath.mpf(a0.numerator) / a0.denominator if isinstance(a0, Fraction) else mpmath.mpf(a0)
        dist = torus_distance(lm * am)
        if dist == 0:
            return 0.0, -np.inf
        return float(dist), float(mpmath.log(dist))
    d = torus_distance(float(lam) * float(a0))
    return d, (float(np.log(d)) if d > 0 else -np.inf)


def small_divisors(sys, c0, j):
    """Log-magnitudes of Theta_j = |1 - e^{-2 pi i c0 lam}|^{-1} and Gamma_j = |e^{2 pi i c0 lam} - 1|^{-1}."""
    lam = sys.eigenvalue(j)
    return small_divisors_for(lam, c0)


def small_divisors_for(lam, c0):
    a0, b0 = _split_mean(c0)
    d, log_d = mode_distance(lam, a0)
    x = 2.0 * np.pi * float(b0) * float(lam)
    if x == 0 and not np.isfinite(log_d):
        raise ValueError("resonant mode: lambda * c0 is an integer")
    log_theta = -log_abs_one_minus_exp(x, d, log_d)
    log_gamma = -log_abs_one_minus_exp(-x, d, log_d)
    return log_theta, log_gamma
