"""Per-mode solvers for u' + i lam c(t) u = i f(t) on the circle.

Four strategies are available:

* ``ResonantDuhamel``: u(t) = i int_0^t exp(i lam int_t^s c) f(s) ds, valid
  when lam*c0 is an integer and f is compatible.
* ``GeometricBackward`` / ``GeometricForward``: the unique periodic
  solution for non-resonant modes, written with the history integral over
  [t - 2pi, t] or the future integral over [t, t + 2pi].
* ``ArcPath``: resonant modes when b changes sign; the Duhamel integral is
  taken from the extremum of B along the arc where every exponential factor
  stays below one.

Solutions are returned as a mantissa on the grid times exp(log_scale).
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .admissibility import ModeData, relative_compatibility
from .diophantine import log_abs_one_minus_exp, mode_distance, zset
from .torus import (
    TWO_PI,
    SignProfile,
    TorusFunction,
    circular_extrema,
    connectedness_scan,
    nodes,
    sign_profile,
    spectral_derivative,
    wavenumbers,
)

STRATEGIES = ("ResonantDuhamel", "GeometricBackward", "GeometricForward", "ArcPath")
LOG_CAP = 1e4
N_MAX = 2 ** 14
SPECTRAL_ROUTE_LIMIT = 8.0
GL_POINTS = 10
MU_GRID = (0.5, 0.75, 1.0, 1.5, 2.0)


class NumericalFailure(RuntimeError):
    """A mode could not be represented or resolved."""


class PeriodicityError(ValueError):
    """The Duhamel integral does not close up over one period."""

    def __init__(self, message, gap):
        super().__init__(message)
        self.gap = gap


class ArcError(ValueError):
    """The integration arc leaves the superlevel set."""


@dataclass
class ModeSolution:
    j: int
    lam: float
    strategy: str
    u: TorusFunction
    log_scale: float
    residual: float
    periodicity_gap: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def N(self):
        return self.u.N

    @property
    def log_sup(self):
        s = self.u.sup()
        return -np.inf if s == 0 else float(np.log(s) + self.log_scale)

    @property
    def sup_norm(self):
        return float(np.exp(self.log_sup))

    def values(self):
        return self.u.samples * np.exp(self.log_scale)


# -- helpers -----------------------------------------------------------------


def _normalize(samples, log_scale):
    s = np.max(np.abs(samples))
    if s == 0 or not np.isfinite(s):
        if not np.isfinite(s):
            raise NumericalFailure("non-finite solution samples")
        return TorusFunction(samples), log_scale
    return TorusFunction(samples / s), log_scale + float(np.log(s))


def _expm1c(x, y):
    """expm1(x + i y) without cancellation for small arguments."""
    re = np.expm1(x) * np.cos(y) - 2.0 * np.sin(0.5 * y) ** 2
    im = np.exp(x) * np.sin(y)
    return complex(re, im)


def _log_one_minus_exp(x, frac):
    """Complex log of 1 - exp(x + 2 pi i frac), frac in [-1/2, 1/2]."""
    y = TWO_PI * frac
    if x <= 0:
        w = -_expm1c(x, y)
        return complex(np.log(abs(w)), np.angle(w))
    # 1 - e^z = -e^z (1 - e^{-z})
    w = -_expm1c(-x, -y)
    return complex(x + np.log(abs(w)), y + np.pi + np.angle(w))


def _signed_frac(lam, a0):
    th = float(lam) * float(a0)
    return th - np.rint(th)


def log_prefactor(lam, c0, direction):
    """Complex log of i/(1 - e^{-2 pi i lam c0}) or i/(e^{2 pi i lam c0} - 1)."""
    c0 = complex(c0)
    d, log_d = mode_distance(lam, c0.real)
    fr = _signed_frac(lam, c0.real)
    x = TWO_PI * lam * c0.imag
    if x == 0 and d == 0:
        raise ValueError("resonant mode has no geometric solution")
    if direction == "Backward":
        L = _log_one_minus_exp(x, -fr)
        mag = -log_abs_one_minus_exp(x, d, log_d)
        return complex(mag, 0.5 * np.pi - L.imag)
    # e^{z'} - 1 = -(1 - e^{z'}) with z' = -x + 2 pi i fr
    L = _log_one_minus_exp(-x, fr)
    mag = -log_abs_one_minus_exp(-x, d, log_d)
    return complex(mag, 0.5 * np.pi - L.imag - np.pi)


_TWO_PI_LD = np.longdouble("6.283185307179586476925286766559005768")


def linear_phase(rate, s):
    """rate * s reduced modulo 2 pi in extended precision."""
    x = np.longdouble(rate) * np.asarray(s, dtype=np.longdouble)
    return np.asarray(np.fmod(x, _TWO_PI_LD), dtype=float)


def shift_matrix(f, offsets):
    """Array F[q, k] = f(t_k + offsets[q]) by Fourier phase shifts."""
    N = f.N
    m = wavenumbers(N)
    offsets = np.asarray(offsets, dtype=float)
    mult = np.exp(1j * np.multiply.outer(offsets, m))
    mult[:, N // 2] = np.cos(N // 2 * offsets)
    return np.fft.ifft(np.fft.fft(f.samples)[None, :] * mult, axis=1)


def _bandwidth(f, rel=1e-14):
    c = np.abs(f.coeffs)
    top = c.max()
    if top == 0:
        return 0
    m = np.abs(wavenumbers(f.N))
    return int(m[c > rel * top].max())


def _gauss_legendre_panels(panels, a=0.0, b=TWO_PI, npts=GL_POINTS):
    x, w = np.polynomial.legendre.leggauss(npts)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes_ = (mid[:, None] + 0.5 * h[:, None] * x[None, :]).ravel()
    weights = (0.5 * h[:, None] * w[None, :]).ravel()
    return nodes_, weights


def is_resonant(lam, c0, tol=None):
    c0 = complex(c0)
    thr = tol if tol is not None else 1e-9 * max(1.0, abs(lam))
    if lam == 0:
        return True
    if abs(c0.imag) > (tol if tol is not None else 1e-9):
        return False
    return mode_distance(lam, c0.real)[0] <= thr


# -- residual and homogeneous solutions -----------------------------------------


def residual(u, mode, c, log_scale=0.0):
    """Relative sup-norm of u' + i lam c u - i f.

    ``u`` is a mantissa with ``log_scale``; the norm is taken relative to
    |lam| sup|u| + sup|f| + sup|u'| so it is invariant under rescaling.
    """
    if not mode.scalar_scale:
        raise ValueError("residual needs a scalar mode scale")
    du = spectral_derivative(u).samples
    fu = mode.f.samples * np.exp(mode.log_scale - log_scale)
    r = du + 1j * mode.lam * c.c.samples * u.samples - 1j * fu
    denom = abs(mode.lam) * u.sup() + np.max(np.abs(fu)) + np.max(np.abs(du))
    if denom == 0:
        return 0.0
    return float(np.max(np.abs(r)) / denom)


@dataclass
class HomogeneousMode:
    u: TorusFunction
    log_scale: float
    periodic: bool
    gap: float


def homogeneous_mode(lam, c, xi=1.0, tol=1e-10):
    """xi * exp(-i lam int_0^t c) on the grid, with its periodicity flag."""
    t = nodes(c.N)
    re = lam * (c.B_periodic.samples.real + c.b0 * t)
    im = -lam * (c.A.samples.real + c.a0 * t)
    top = float(np.max(re))
    u = TorusFunction(xi * np.exp(re - top + 1j * im))
    z = -2j * np.pi * lam * c.c0
    d, log_d = mode_distance(lam, c.a0)
    gap = float(np.exp(log_abs_one_minus_exp(z.real, d, log_d))) if (z.real != 0 or d > 0) else 0.0
    return HomogeneousMode(u, top, gap <= tol, gap)


# -- resonant modes --------------------------------------------------------------


def solve_resonant(mode, c, gap_tol=1e-10):
    """Duhamel solution with u(0) = 0 for a resonant, compatible mode."""
    if not mode.scalar_scale:
        raise ValueError("solver needs a scalar mode scale")
    lam = mode.lam
    if not is_resonant(lam, c.c0):
        raise ValueError(f"mode {mode.j} is not resonant")
    k = float(np.rint(lam * c.a0))
    t = nodes(c.N)
    re = -lam * c.B_periodic.samples.real
    top = float(np.max(re))
    h = mode.f.samples * np.exp(re - top + 1j * lam * c.A.samples.real + 1j * k * t)
    m = wavenumbers(c.N)
    hh = np.fft.fft(h) / c.N
    mean = hh[0]
    scale_h = np.mean(np.abs(h))
    gap = 0.0 if scale_h == 0 else float(TWO_PI * abs(mean) / (TWO_PI * scale_h))
    if gap > gap_tol:
        raise PeriodicityError(
            f"mode {mode.j}: compatibility integral does not vanish (relative gap {gap:.3e})", gap)
    p = np.zeros_like(hh)
    nz = m != 0
    nz[c.N // 2] = False
    p[nz] = hh[nz] / (1j * m[nz])
    H = np.fft.ifft(p) * c.N
    H = H - H[0]
    env = lam * c.B_periodic.samples.real
    etop = float(np.max(env))
    u = 1j * H * np.exp(env - etop - 1j * lam * c.A.samples.real - 1j * k * t)
    u_tf, log_scale = _normalize(u, top + etop + mode.log_scale)
    res = residual(u_tf, mode, c, log_scale)
    return ModeSolution(mode.j, lam, "ResonantDuhamel", u_tf, log_scale, res, gap,
                        {"route": "spectral"})


def solve_arc(mode, c, gap_tol=1e-10):
    """Resonant mode by integration from the extremum of B along monotone arcs."""
    if not mode.scalar_scale:
        raise ValueError("solver needs a scalar mode scale")
    lam = mode.lam
    if not is_resonant(lam, c.c0):
        raise ValueError(f"mode {mode.j} is not resonant")
    if abs(c.b0) > 1e-9:
        raise ValueError("arc strategy needs b0 = 0")
    N = c.N
    B = c.B_periodic.samples.real
    span = float(np.ptp(B))
    if span > 0:
        conn = connectedness_scan(B)
        if not conn.connected:
            raise ArcError(
                f"superlevel set disconnected at r = {conn.r_witness:.6g}; no admissible arc")
    tol_plateau = 1e-9 * span
    # start at the leftmost sample of the extremal plateau
    if lam >= 0:
        start = int(np.flatnonzero(B >= B.max() - tol_plateau)[0])
        end = int(np.flatnonzero(B <= B.min() + tol_plateau)[0])
    else:
        start = int(np.flatnonzero(B <= B.min() + tol_plateau)[0])
        end = int(np.flatnonzero(B >= B.max() - tol_plateau)[0])
    maxima, _ = circular_extrema(B, tol_plateau)
    if len(maxima) > 1:
        raise ArcError("B has several local maxima; no admissible arc")

    Cp = c.C_periodic
    c0 = c.c0
    h = TWO_PI / N
    x, w = np.polynomial.legendre.leggauss(8)
    delta = 0.5 * h * (x + 1.0)
    wq = 0.5 * h * w
    Cs = Cp.samples
    Cnext = shift_matrix(Cp, [h])[0]
    Cprev = shift_matrix(Cp, [-h])[0]
    Cq_f = shift_matrix(Cp, delta)
    Cq_b = shift_matrix(Cp, -delta)
    Fq_f = shift_matrix(mode.f, delta)
    Fq_b = shift_matrix(mode.f, -delta)

    # forward step k -> k+1 and backward step k -> k-1
    E_f = -1j * lam * (Cnext - Cs + c0 * h)
    K_f = 1j * lam * (Cq_f - Cnext[None, :] + c0 * (delta[:, None] - h))
    G_f = 1j * np.sum(wq[:, None] * np.exp(K_f) * Fq_f, axis=0)
    E_b = -1j * lam * (Cprev - Cs - c0 * h)
    K_b = 1j * lam * (Cq_b - Cprev[None, :] + c0 * (-delta[:, None] + h))
    G_b = -1j * np.sum(wq[:, None] * np.exp(K_b) * Fq_b, axis=0)

    L1 = (end - start) % N
    L2 = N - L1
    idx_f = (start + np.arange(L1 + 1)) % N
    idx_b = (start - np.arange(L2 + 1)) % N
    guard = 1e-9 * (1.0 + abs(lam) * span)
    worst = max(
        float(np.max(E_f.real[idx_f[:-1]])) if L1 else -np.inf,
        float(np.max(K_f.real[:, idx_f[:-1]])) if L1 else -np.inf,
        float(np.max(E_b.real[idx_b[:-1]])) if L2 else -np.inf,
        float(np.max(K_b.real[:, idx_b[:-1]])) if L2 else -np.inf,
    )
    if worst > guard:
        raise ArcError(f"arc leaves the superlevel set (exponent {worst:.3e})")

    u = np.zeros(N, dtype=complex)
    ef, eb = np.exp(E_f), np.exp(E_b)
    val = 0.0 + 0.0j
    for k in idx_f[:-1]:
        val = ef[k] * val + G_f[k]
        u[(k + 1) % N] = val
    meet_f = val
    val = 0.0 + 0.0j
    for k in idx_b[:-1]:
        val = eb[k] * val + G_b[k]
        if (k - 1) % N != end:
            u[(k - 1) % N] = val
    meet_b = val
    u[start] = 0.0
    scale = max(np.max(np.abs(u)), 1e-300)
    gap = float(abs(meet_f - meet_b) / scale)
    if gap > gap_tol:
        raise PeriodicityError(f"mode {mode.j}: arc integrals disagree (relative gap {gap:.3e})", gap)
    u_tf, log_scale = _normalize(u, mode.log_scale)
    res = residual(u_tf, mode, c, log_scale)
    return ModeSolution(mode.j, lam, "ArcPath", u_tf, log_scale, res, gap,
                        {"start": float(start * h), "meet": float(end * h), "max_log_kernel": worst})


# -- non-resonant modes ----------------------------------------------------------


def _spectral_periodic(mode, c):
    lam = mode.lam
    re = -lam * c.B_periodic.samples.real
    top = float(np.max(re))
    g = mode.f.samples * np.exp(re - top + 1j * lam * c.A.samples.real)
    m = wavenumbers(c.N)
    kappa = lam * c.c0
    gh = np.fft.fft(g) / c.N
    vh = gh / (m + kappa)
    v = np.fft.ifft(vh) * c.N
    env = lam * c.B_periodic.samples.real
    etop = float(np.max(env))
    u = v * np.exp(env - etop - 1j * lam * c.A.samples.real)
    return _normalize(u, top + etop + mode.log_scale)


def _quadrature_periodic(mode, c, direction, chunk=4_000_000):
    lam = mode.lam
    N = c.N
    cmax = float(np.max(np.abs(c.c.samples)))
    panels = max(16, int(np.ceil(2.0 * (abs(lam) * cmax + _bandwidth(mode.f)))))
    s, ws = _gauss_legendre_panels(panels)
    lp = log_prefactor(lam, c.c0, direction)
    sign = -1.0 if direction == "Backward" else 1.0
    Cp = c.C_periodic
    Ct = Cp.samples
    c0 = c.c0
    # exponent for Backward: -i lam [(Cp(t) - Cp(t-s)) + c0 s]
    #              Forward:   i lam [(Cp(t+s) - Cp(t)) + c0 s]
    lin = linear_phase(lam * c0.real, s)
    step = max(1, chunk // N)
    blocks = []
    tops = []
    for q0 in range(0, s.size, step):
        sq = s[q0:q0 + step]
        Cs = shift_matrix(Cp, sign * sq)
        Fs = shift_matrix(mode.f, sign * sq)
        if direction == "Backward":
            ex = -1j * lam * (Ct[None, :] - Cs) + lam * c0.imag * sq[:, None] - 1j * lin[q0:q0 + step, None]
        else:
            ex = 1j * lam * (Cs - Ct[None, :]) - lam * c0.imag * sq[:, None] + 1j * lin[q0:q0 + step, None]
        ex = ex + lp
        blocks.append((q0, ex, Fs))
        tops.append(float(np.max(ex.real)))
    top = max(tops)
    acc = np.zeros(N, dtype=complex)
    for q0, ex, Fs in blocks:
        wq = ws[q0:q0 + ex.shape[0]]
        acc += np.sum(wq[:, None] * np.exp(ex - top) * Fs, axis=0)
    return acc, top, panels


def solve_geometric(mode, c, direction="Backward", route="auto"):
    """Unique periodic solution of a non-resonant mode.

    ``route`` selects "spectral" (Fourier division after removing the
    oscillating part of the coefficient), "quadrature" (direct evaluation of
    the history/future integral) or "auto".
    """
    if direction not in ("Backward", "Forward"):
        raise ValueError("direction must be Backward or Forward")
    if not mode.scalar_scale:
        raise ValueError("solver needs a scalar mode scale")
    lam = mode.lam
    if is_resonant(lam, c.c0):
        raise ValueError(f"mode {mode.j} is resonant; use the resonant or arc strategy")
    spread = abs(lam) * float(np.ptp(c.B_periodic.samples.real))
    if route == "auto":
        route = "spectral" if spread <= SPECTRAL_ROUTE_LIMIT else "quadrature"
    diag = {"route": route}
    if route == "spectral":
        u_tf, log_scale = _spectral_periodic(mode, c)
        gap = 0.0
    else:
        acc, top, panels = _quadrature_periodic(mode, c, direction)
        diag.update(panels=panels, max_log_kernel=top)
        u_tf, log_scale = _normalize(acc, top + mode.log_scale)
        # both closed forms are periodic by construction on the grid
        gap = 0.0
    if log_scale - (np.log(max(mode.f.sup(), 1e-300)) + mode.log_scale) > LOG_CAP:
        raise NumericalFailure(f"mode {mode.j}: log-magnitude beyond {LOG_CAP:g}")
    res = residual(u_tf, mode, c, log_scale)
    name = "GeometricBackward" if direction == "Backward" else "GeometricForward"
    return ModeSolution(mode.j, lam, name, u_tf, log_scale, res, gap, diag)


def geometric_kernel_bound(lam, c, direction):
    """Largest real exponent of the geometric kernel including its prefactor."""
    t = nodes(c.N)
    B = c.B_periodic.samples.real
    s = t[:, None]
    Bt = B[None, :]
    # B_p(t - s) on the grid: index shift
    idx = (np.arange(c.N)[None, :] - np.arange(c.N)[:, None]) % c.N
    lp = log_prefactor(lam, c.c0, direction).real
    if direction == "Backward":
        ex = lam * (Bt - B[idx] + c.b0 * s)
    else:
        idx = (np.arange(c.N)[None, :] + np.arange(c.N)[:, None]) % c.N
        ex = -lam * (B[idx] - Bt + c.b0 * s)
    return float(np.max(ex)) + lp


def auto_select(mode, c, resonant=None):
    """Choose a strategy: arc or Duhamel on resonant modes, bounded geometric kernel otherwise."""
    lam = mode.lam
    if resonant is None:
        resonant = is_resonant(lam, c.c0)
    prof = sign_profile(c.b)
    if resonant:
        if prof == SignProfile.CHANGES_SIGN and lam != 0:
            return "ArcPath"
        return "ResonantDuhamel"
    if prof == SignProfile.ZERO:
        return "GeometricBackward"
    if prof == SignProfile.NON_NEGATIVE:
        return "GeometricBackward" if lam > 0 else "GeometricForward"
    if prof == SignProfile.NON_POSITIVE:
        return "GeometricBackward" if lam < 0 else "GeometricForward"
    kb = geometric_kernel_bound(lam, c, "Backward")
    kf = geometric_kernel_bound(lam, c, "Forward")
    return "GeometricBackward" if kb <= kf + 1e-12 else "GeometricForward"


def _dispatch(mode, c, strategy):
    if strategy == "ResonantDuhamel":
        return solve_resonant(mode, c)
    if strategy == "ArcPath":
        return solve_arc(mode, c)
    if strategy == "GeometricBackward":
        return solve_geometric(mode, c, "Backward")
    if strategy == "GeometricForward":
        return solve_geometric(mode, c, "Forward")
    raise ValueError(f"unknown strategy {strategy!r}")


def solve_mode(mode, c, resonant=None, strategy=None, tol=1e-8, n_max=N_MAX):
    """Solve one mode, doubling the grid until the residual meets ``tol``."""
    if strategy is None:
        strategy = auto_select(mode, c, resonant)
    N = c.N
    last = None
    while True:
        cc = c.resample(N)
        mm = mode.resample(N)
        sol = _dispatch(mm, cc, strategy)
        sol.diagnostics["N"] = N
        if sol.residual <= tol:
            return sol
        if last is not None and sol.residual >= 0.5 * last.residual:
            break
        last = sol
        if 2 * N > n_max:
            break
        N *= 2
    return sol


# -- batch solve and decay diagnostics -----------------------------------------


@dataclass
class DecayFit:
    eps_hat: float
    mu_hat: float
    fit_residual: float
    j: np.ndarray = field(repr=False)
    log_sup: np.ndarray = field(repr=False)
    defined: bool = True
    per_mu: dict = field(default_factory=dict)


def decay_fit(j, log_sup, n=1, mu_grid=MU_GRID):
    """Regress log sup|u_j| on j**(1/(2 n mu)) for each mu; keep the best fit."""
    j = np.asarray(j, dtype=float)
    y = np.asarray(log_sup, dtype=float)
    keep = np.isfinite(y) & (j >= 1)
    if keep.sum() < 3:
        return DecayFit(np.nan, np.nan, np.nan, j, y, defined=False)
    best = None
    per = {}
    for mu in mu_grid:
        x = j[keep] ** (1.0 / (2 * n * mu))
        A = np.vstack([np.ones_like(x), x]).T
        coef, *_ = np.linalg.lstsq(A, y[keep], rcond=None)
        r = y[keep] - A @ coef
        # normalized RMS so fits are comparable across mu
        rms = float(np.sqrt(np.mean(r ** 2)) / max(np.ptp(y[keep]), 1e-300))
        per[mu] = (float(-coef[1]), rms)
        if best is None or rms < best[2]:
            best = (float(-coef[1]), mu, rms)
    return DecayFit(best[0], best[1], best[2], j, y, True, per)


@dataclass
class SolveResult:
    solutions: list
    decay: DecayFit
    failures: list


def solve_all(c, sys, modes, J=None, resonant=None, tol=1e-8, threads=1, project=False, mu_grid=MU_GRID):
    """Solve every supplied mode and fit the decay of sup-norms.

    Raises :class:`NumericalFailure` naming the first failing mode.
    """
    modes = [m for m in modes if J is None or m.j <= J]
    if resonant is None:
        jmax = max((m.j for m in modes), default=0)
        resonant = set(zset(sys, c.c0, jmax).members.tolist())
    resonant = set(int(j) for j in resonant)
    if project:
        from .admissibility import project_mode
        fixed = []
        for m in modes:
            if m.j in resonant and relative_compatibility(m, c) > 1e-10:
                warnings.warn(f"mode {m.j} projected onto the admissible space", RuntimeWarning, stacklevel=2)
                m = project_mode(m, c)
            fixed.append(m)
        modes = fixed

    def work(m):
        if m.f.sup() == 0:
            return ModeSolution(m.j, m.lam, auto_select(m, c, m.j in resonant),
                                TorusFunction(np.zeros(c.N)), 0.0, 0.0, 0.0, {})
        return solve_mode(m, c, m.j in resonant, tol=tol)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            futures = [ex.submit(work, m) for m in modes]
            sols = []
            for m, fut in zip(modes, futures):
                try:
                    sols.append(fut.result())
                except Exception as exc:  # noqa: BLE001 - reported with the mode
                    raise NumericalFailure(f"mode {m.j} failed: {exc}") from exc
    else:
        sols = []
        for m in modes:
            try:
                sols.append(work(m))
            except Exception as exc:  # noqa: BLE001
                raise NumericalFailure(f"mode {m.j} failed: {exc}") from exc
    bad = [s.j for s in sols if s.residual > tol]
    js = np.array([s.j for s in sols])
    ls = np.array([s.log_sup for s in sols])
    fit = decay_fit(js, ls, sys.n, mu_grid)
    return SolveResult(sols, fit, bad)


# -- Cauchy problem ----------------------------------------------------------------


@dataclass
class CauchyMode:
    j: int
    lam: float
    resonant: bool
    solution: ModeSolution | None
    mismatch: float
    admissibility: float


def _homogeneous_cauchy(j, lam, c, gj, tol, n_max=N_MAX):
    """gj * exp(-i lam int_0^t c), doubling the grid until the residual meets ``tol``."""
    N = c.N
    while True:
        cc = c.resample(N)
        hom = homogeneous_mode(lam, cc, 1.0)
        u_tf, ls = _normalize(hom.u.samples * (gj / hom.u.samples[0]), 0.0)
        zero = ModeData(j, lam, TorusFunction(np.zeros(N)))
        r = residual(u_tf, zero, cc, ls)
        if r <= tol or 2 * N > n_max:
            return ModeSolution(j, lam, "ResonantDuhamel", u_tf, ls, r, hom.gap,
                                {"homogeneous": True, "N": N})
        N *= 2


def cauchy_solve(c, sys, modes, g, J, tol=1e-8):
    """Periodic solutions with initial value g_j where possible.

    Resonant modes get the homogeneous correction fixing u_j(0) = g_j;
    non-resonant modes have a unique periodic solution and report the
    mismatch |u_j(0) - g_j|.  ``modes`` maps j to ModeData (absent = 0).
    """
    g = np.asarray(g, dtype=complex)
    zs = zset(sys, c.c0, J)
    res = set(zs.members.tolist())
    lams = sys.eigenvalues(J)
    by_j = {m.j: m for m in modes}
    out = []
    for j in range(J + 1):
        lam = float(lams[j])
        gj = g[j] if j < g.size else 0.0
        m = by_j.get(j, ModeData(j, lam, TorusFunction(np.zeros(c.N))))
        adm = relative_compatibility(m, c) if j in res else 0.0
        zero_f = m.f.sup() == 0
        if j in res:
            if zero_f:
                hom = homogeneous_mode(lam, c, 1.0)
                if gj == 0:
                    u = TorusFunction(np.zeros(c.N))
                    sol = ModeSolution(j, lam, "ResonantDuhamel", u, 0.0, 0.0, 0.0, {})
                else:
                    sol = _homogeneous_cauchy(j, lam, c, gj, tol)
                out.append(CauchyMode(j, lam, True, sol, 0.0, adm))
                continue
            if adm > 1e-10:
                out.append(CauchyMode(j, lam, True, None, np.inf, adm))
                continue
            part = solve_mode(m, c, True, tol=tol)
            up0 = part.values()[0]
            cc = c.resample(part.N)
            hom = homogeneous_mode(lam, cc, 1.0)
            corr = (gj - up0) / (hom.u.samples[0] * np.exp(hom.log_scale))
            total = part.values() + corr * hom.u.samples * np.exp(hom.log_scale)
            u_tf, ls = _normalize(total, 0.0)
            r = residual(u_tf, m.resample(part.N), cc, ls)
            sol = ModeSolution(j, lam, part.strategy, u_tf, ls, r, part.periodicity_gap, {"homogeneous": True})
            out.append(CauchyMode(j, lam, True, sol, 0.0, adm))
        else:
            if zero_f:
                u = TorusFunction(np.zeros(c.N))
                sol = ModeSolution(j, lam, auto_select(m, c, False), u, 0.0, 0.0, 0.0, {})
                out.append(CauchyMode(j, lam, False, sol, float(abs(gj)), 0.0))
                continue
            sol = solve_mode(m, c, False, tol=tol)
            mis = float(abs(sol.values()[0] - gj))
            out.append(CauchyMode(j, lam, False, sol, mis, 0.0))
    return out
