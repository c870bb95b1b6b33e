"""Periodic function arithmetic on the torus T = R / 2piZ.

Functions are stored as samples on the uniform grid t_k = 2*pi*k/N together
with their discrete Fourier coefficients.  Everything here is spectrally
accurate for band-limited data: quadrature is the trapezoid rule, derivatives
and primitives are Fourier multipliers, and off-grid evaluation uses the
trigonometric interpolant.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi
DEFAULT_N = 512
REAL_TOL = 1e-12


def _check_grid_size(N):
    if N < 8 or N % 2:
        raise ValueError(f"grid size must be even and >= 8, got {N}")


def nodes(N):
    """Uniform nodes t_k = 2*pi*k/N, k = 0..N-1."""
    _check_grid_size(N)
    return TWO_PI * np.arange(N) / N


def wavenumbers(N):
    """Integer wavenumbers in numpy FFT order (Nyquist reported as -N/2)."""
    return np.fft.fftfreq(N, 1.0 / N)


class TorusFunction:
    """Complex 2*pi-periodic function sampled on a uniform grid.

    Instances are immutable; the sample array is read-only and the Fourier
    coefficients are computed once on demand.
    """

    __slots__ = ("_samples", "_coeffs")

    def __init__(self, samples):
        s = np.array(samples, dtype=complex).ravel()
        _check_grid_size(s.size)
        s.setflags(write=False)
        self._samples = s
        self._coeffs = None

    @classmethod
    def from_callable(cls, func, N=DEFAULT_N):
        return cls(func(nodes(N)))

    @classmethod
    def from_coeffs(cls, coeffs, N=DEFAULT_N):
        """Build from Fourier coefficients.

        ``coeffs`` is either a mapping {m: c_m} with -N/2 < m <= N/2, or an
        array in numpy FFT order of length N.
        """
        if isinstance(coeffs, dict):
            full = np.zeros(N, dtype=complex)
            for m, cm in coeffs.items():
                m = int(m)
                if not -N // 2 < m <= N // 2:
                    raise ValueError(f"wavenumber {m} outside (-N/2, N/2] for N={N}")
                full[m % N] += cm
        else:
            full = np.asarray(coeffs, dtype=complex)
            N = full.size
        return cls(np.fft.ifft(full) * N)

    @classmethod
    def constant(cls, value, N=DEFAULT_N):
        return cls(np.full(N, value, dtype=complex))

    @property
    def N(self):
        return self._samples.size

    @property
    def samples(self):
        return self._samples

    @property
    def t(self):
        return nodes(self.N)

    @property
    def coeffs(self):
        """Fourier coefficients c_m = (1/N) sum_k f(t_k) exp(-i m t_k), FFT order."""
        if self._coeffs is None:
            c = np.fft.fft(self._samples) / self.N
            c.setflags(write=False)
            self._coeffs = c
        return self._coeffs

    def coefficient(self, m):
        """Coefficient of exp(imt) for -N/2 < m <= N/2."""
        N = self.N
        if not -N // 2 < m <= N // 2:
            raise ValueError(f"wavenumber {m} outside (-N/2, N/2]")
        return self.coeffs[m % N]

    # -- evaluation -------------------------------------------------------

    def __call__(self, t):
        """Evaluate the trigonometric interpolant at arbitrary points."""
        t = np.asarray(t, dtype=float)
        N = self.N
        c = self.coeffs
        m = wavenumbers(N)
        half = N // 2
        keep = np.abs(m) < half
        out = np.exp(1j * np.multiply.outer(t, m[keep])) @ c[keep]
        # Nyquist term split symmetrically so real data stays real
        out = out + c[half] * np.cos(half * t)
        return out

    def shifted(self, delta):
        """Samples of t -> f(t + delta) on the same grid."""
        N = self.N
        m = wavenumbers(N)
        mult = np.exp(1j * m * delta)
        mult[N // 2] = np.cos(N // 2 * delta)
        return TorusFunction(np.fft.ifft(np.fft.fft(self._samples) * mult))

    def resample(self, N):
        """Band-limited interpolation (or truncation) onto an N-point grid."""
        _check_grid_size(N)
        if N == self.N:
            return self
        c = self.coeffs
        old = self.N
        out = np.zeros(N, dtype=complex)
        lo = min(old, N) // 2
        m = np.arange(-lo + 1, lo)
        out[m % N] = c[m % old]
        nyq = c[old // 2] if N > old else c[lo % old] + c[-lo % old]
        if N > old:
            out[lo % N] += nyq / 2
            out[-lo % N] += nyq / 2
        else:
            out[N // 2] = nyq
        return TorusFunction(np.fft.ifft(out) * N)

    # -- arithmetic -------------------------------------------------------

    def _other(self, other):
        if isinstance(other, TorusFunction):
            if other.N != self.N:
                raise ValueError("grid mismatch")
            return other._samples
        return other

    def __add__(self, other):
        return TorusFunction(self._samples + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return TorusFunction(self._samples - self._other(other))

    def __rsub__(self, other):
        return TorusFunction(self._other(other) - self._samples)

    def __mul__(self, other):
        return TorusFunction(self._samples * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return TorusFunction(self._samples / self._other(other))

    def __neg__(self):
        return TorusFunction(-self._samples)

    def conj(self):
        return TorusFunction(np.conj(self._samples))

    @property
    def real(self):
        return TorusFunction(self._samples.real)

    @property
    def imag(self):
        return TorusFunction(self._samples.imag)

    def sup(self):
        return float(np.max(np.abs(self._samples)))

    def is_real(self, tol=REAL_TOL):
        return float(np.max(np.abs(self._samples.imag))) <= tol * max(1.0, self.sup())

    def __repr__(self):
        return f"TorusFunction(N={self.N}, sup={self.sup():.3g})"


def quadrature(f):
    """Integral of f over [0, 2pi] (trapezoid rule, exact for band-limited f)."""
    return complex(TWO_PI * np.mean(f.samples))


def average(f):
    return quadrature(f) / TWO_PI


def spectral_derivative(f, k=1):
    """k-th derivative via the multiplier (im)^k."""
    if k < 0:
        raise ValueError("derivative order must be >= 0")
    if k == 0:
        return f
    N = f.N
    m = wavenumbers(N)
    mult = (1j * m) ** k
    if k % 2:
        mult[N // 2] = 0.0
    else:
        mult[N // 2] = (1j * (N // 2)) ** k
    return TorusFunction(np.fft.ifft(np.fft.fft(f.samples) * mult))


def antiderivative(f):
    """Split F(t) = int_0^t f into ``periodic_part(t) + mean * t``.

    Returns ``(periodic_part, mean)`` with ``periodic_part(0) == 0``.
    """
    N = f.N
    c = np.fft.fft(f.samples)
    mean = c[0] / N
    m = wavenumbers(N)
    p = np.zeros(N, dtype=complex)
    nz = (m != 0)
    nz[N // 2] = False
    p[nz] = c[nz] / (1j * m[nz])
    samples = np.fft.ifft(p)
    samples = samples - samples[0]
    return TorusFunction(samples), complex(mean)


# -- sign and superlevel topology ------------------------------------------


class SignProfile(enum.Enum):
    ZERO = "Zero"
    NON_NEGATIVE = "NonNegative"
    NON_POSITIVE = "NonPositive"
    CHANGES_SIGN = "ChangesSign"


def sign_profile(b, tol=1e-12):
    """Classify the sign behaviour of a real function on the grid."""
    vals = np.real(b.samples if isinstance(b, TorusFunction) else np.asarray(b))
    lo, hi = float(vals.min()), float(vals.max())
    if max(abs(lo), abs(hi)) <= tol:
        return SignProfile.ZERO
    if lo < -tol and hi > tol:
        return SignProfile.CHANGES_SIGN
    return SignProfile.NON_NEGATIVE if lo >= -tol else SignProfile.NON_POSITIVE


def _open_samples(B, tol):
    """Strip the closing sample of a closed-grid primitive after checking periodicity."""
    if isinstance(B, TorusFunction):
        return np.real(B.samples)
    vals = np.real(np.asarray(B, dtype=complex))
    if vals.size % 2 == 1:
        span = max(1.0, float(np.ptp(vals)))
        gap = abs(vals[-1] - vals[0])
        if gap > tol * span:
            raise ValueError(
                f"primitive is not periodic: |B(2pi) - B(0)| = {gap:.3e}; "
                "superlevel sets need b0 = 0")
        vals = vals[:-1]
    return vals


def count_arcs(mask):
    """Number of circular runs of True in a boolean sequence."""
    mask = np.asarray(mask, dtype=bool)
    if mask.all():
        return 1
    if not mask.any():
        return 0
    return int(np.count_nonzero(mask & ~np.roll(mask, 1)))


def arcs(mask):
    """Circular runs of True as (start, length) pairs, ordered by start index."""
    mask = np.asarray(mask, dtype=bool)
    n = mask.size
    if mask.all():
        return [(0, n)]
    starts = np.flatnonzero(mask & ~np.roll(mask, 1))
    out = []
    for s in starts:
        length = 0
        while mask[(s + length) % n]:
            length += 1
        out.append((int(s), length))
    return out


def superlevel_components(B, r, tol=1e-9):
    """Connected components of {t : B(t) > r} on the circle.

    ``B`` is a TorusFunction or an array of samples of int_0^t b on the
    closed grid t_k = 2*pi*k/N, k = 0..N (odd length, periodicity checked)
    or the open grid k = 0..N-1 (even length).
    """
    vals = _open_samples(B, tol)
    return count_arcs(vals > r)


def circular_extrema(values, tol=0.0):
    """Indices of strict local maxima and minima on the circle.

    Runs of samples equal within ``tol`` are collapsed to a single point
    (the leftmost index of the run).
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if np.ptp(v) <= tol:
        return [], []
    # rotate so index 0 starts a new plateau
    start = 0
    while abs(v[start] - v[start - 1]) <= tol:
        start += 1
    runs = []
    i = 0
    while i < n:
        k = (start + i) % n
        j = i + 1
        while j < n and abs(v[(start + j) % n] - v[k]) <= tol:
            j += 1
        runs.append((k, v[k]))
        i = j
    maxima, minima = [], []
    R = len(runs)
    for idx, (k, val) in enumerate(runs):
        prev = runs[idx - 1][1]
        nxt = runs[(idx + 1) % R][1]
        if val > prev and val > nxt:
            maxima.append(k)
        elif val < prev and val < nxt:
            minima.append(k)
    return sorted(maxima), sorted(minima)


@dataclass(frozen=True)
class Connectedness:
    connected: bool
    r_witness: float | None
    components: int
    n_local_max: int
    levels: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)


def connectedness_scan(B, n_levels=64, tol=None):
    """Decide whether every superlevel set {B > r} is connected.

    Scans a uniform grid of levels strictly inside (min B, max B) plus the
    midpoints between consecutive critical values.  When disconnected, the
    witness is the midpoint of the widest level window with the largest
    component count.
    """
    vals = _open_samples(B, 1e-9)
    lo, hi = float(vals.min()), float(vals.max())
    span = hi - lo
    if tol is None:
        tol = 1e-9 * span
    maxima, minima = circular_extrema(vals, tol)
    if span <= 0:
        return Connectedness(True, None, 1 if span == 0 else 0, 0,
                             np.array([]), np.array([], dtype=int))
    crit = np.unique(np.r_[lo, hi, vals[maxima], vals[minima]])
    mids = 0.5 * (crit[1:] + crit[:-1])
    widths = np.diff(crit)
    grid = lo + span * (np.arange(1, n_levels + 1) / (n_levels + 1))
    levels = np.r_[mids, grid]
    counts = np.array([count_arcs(vals > r) for r in levels])
    worst = counts.max()
    if worst <= 1:
        return Connectedness(True, None, int(worst), len(maxima), levels, counts)
    cand = np.flatnonzero(counts[: mids.size] == worst)
    if cand.size:
        k = cand[np.argmax(widths[cand])]
        r = float(mids[k])
    else:
        r = float(levels[np.argmax(counts)])
    return Connectedness(False, r, int(worst), len(maxima), levels, counts)


# -- Gevrey cutoffs --------------------------------------------------------


def _psi(x, alpha):
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    out[pos] = np.exp(-x[pos] ** (-alpha))
    return out


def gevrey_step(x, sigma):
    """Smooth step, 0 for x <= 0 and 1 for x >= 1, of Gevrey order sigma."""
    if sigma <= 1:
        raise ValueError("Gevrey order must exceed 1")
    alpha = 1.0 / (sigma - 1.0)
    x = np.asarray(x, dtype=float)
    p, q = _psi(x, alpha), _psi(1.0 - x, alpha)
    return p / (p + q)


def gevrey_step_derivative(x, sigma):
    """Exact derivative of :func:`gevrey_step` (zero off (0, 1))."""
    if sigma <= 1:
        raise ValueError("Gevrey order must exceed 1")
    alpha = 1.0 / (sigma - 1.0)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > 0) & (x < 1)
    xi = x[inside]
    p, q = _psi(xi, alpha), _psi(1.0 - xi, alpha)
    dp = alpha * xi ** (-alpha - 1) * p
    dq = alpha * (1.0 - xi) ** (-alpha - 1) * q
    out[inside] = (dp * q + p * dq) / (p + q) ** 2
    return out


def circular_offset(t, center):
    """Signed distance from ``center`` to ``t`` wrapped into [-pi, pi)."""
    return (np.asarray(t) - center + np.pi) % TWO_PI - np.pi


def gevrey_bump(center, halfwidth, sigma, N=DEFAULT_N):
    """Flat-top cutoff of Gevrey order sigma.

    Equal to 1 on |t - center| <= halfwidth/2, vanishing for
    |t - center| >= halfwidth (distances taken on the circle).
    """
    if sigma <= 1:
        raise ValueError("Gevrey order must exceed 1")
    if not 0 < halfwidth < np.pi:
        raise ValueError("halfwidth must lie in (0, pi)")
    d = np.abs(circular_offset(nodes(N), center))
    x = (halfwidth - d) / (halfwidth / 2)
    return TorusFunction(gevrey_step(x, sigma))


# -- the coefficient c = a + ib ----------------------------------------------


class Coefficient:
    """Time coefficient c(t) = a(t) + i b(t) with its means and primitives.

    ``A`` is the periodic function int_0^t a - a0 t, ``B_periodic`` the
    periodic part of int_0^t b, so int_0^t b = B_periodic(t) + b0 t.
    """

    def __init__(self, a, b):
        if not isinstance(a, TorusFunction):
            a = TorusFunction(a)
        if not isinstance(b, TorusFunction):
            b = TorusFunction(b)
        if a.N != b.N:
            raise ValueError("a and b must share a grid")
        for name, g in (("a", a), ("b", b)):
            if not g.is_real():
                raise ValueError(f"{name}(t) must be real-valued")
        self.a = a.real
        self.b = b.real
        self.A, a0 = antiderivative(self.a)
        self.B_periodic, b0 = antiderivative(self.b)
        self.A = self.A.real
        self.B_periodic = self.B_periodic.real
        self.a0 = float(a0.real)
        self.b0 = float(b0.real)

    @classmethod
    def from_callables(cls, a, b, N=DEFAULT_N):
        t = nodes(N)
        av = np.broadcast_to(np.asarray(a(t), dtype=float), t.shape)
        bv = np.broadcast_to(np.asarray(b(t), dtype=float), t.shape)
        return cls(TorusFunction(av), TorusFunction(bv))

    @classmethod
    def from_complex(cls, c):
        return cls(c.real, c.imag)

    @property
    def N(self):
        return self.a.N

    @property
    def c0(self):
        return complex(self.a0, self.b0)

    @property
    def c(self):
        return self.a + 1j * self.b

    @property
    def C_periodic(self):
        """Periodic part of int_0^t c."""
        return self.A + 1j * self.B_periodic

    def B(self):
        """Samples of int_0^t b on the open grid."""
        return self.B_periodic.samples.real + self.b0 * nodes(self.N)

    def B_closed(self):
        """Samples of int_0^t b on t_k = 2*pi*k/N, k = 0..N."""
        return np.r_[self.B(), self.B_periodic.samples[0].real + self.b0 * TWO_PI]

    def resample(self, N):
        if N == self.N:
            return self
        return Coefficient(self.a.resample(N), self.b.resample(N))

    def __repr__(self):
        return f"Coefficient(a0={self.a0:.6g}, b0={self.b0:.6g}, N={self.N})"
