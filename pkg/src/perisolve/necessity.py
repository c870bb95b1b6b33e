"""Numerical witnesses of non-solvability.

* :func:`hormander_ratio` builds the pair (f_l, v_l) from a disconnected
  superlevel set and tracks log|int f_l v_l| - log||f_l|| - log||L^t v_l||,
  which must grow without bound when the a-priori inequality fails.
* :func:`laplace_blowup` concentrates data at the maximum of the kernel
  exponent so that |u_j(t*)| decays only like a power of lambda_j.
* :func:`diophantine_counterexample` forces modes that sit at tiny small
  divisors; their solutions stay bounded below instead of decaying.

Magnitudes are carried as logarithms throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lgamma

import numpy as np

from .admissibility import ModeData, is_admissible
from .diophantine import small_divisors_for, zset
from .modes import is_resonant, log_prefactor
from .spectral import hermite_norm_squared
from .torus import (
    TWO_PI,
    Coefficient,
    SignProfile,
    TorusFunction,
    arcs,
    circular_offset,
    connectedness_scan,
    gevrey_bump,
    gevrey_step,
    gevrey_step_derivative,
    nodes,
    sign_profile,
    wavenumbers,
)

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


# -- Gelfand-Shilov type norm ---------------------------------------------------


@dataclass(frozen=True)
class NormParams:
    sigma: float = 2.0
    mu: float = 0.5
    C: float = 10.0
    M_cap: int = 24
    gamma_cap: int = 24

    def __post_init__(self):
        if self.sigma <= 1 or self.mu < 0.5:
            raise ValueError("need sigma > 1 and mu >= 1/2")
        if self.M_cap < 8 or self.gamma_cap < 8:
            raise ValueError("caps must be at least 8")


@dataclass
class NormValue:
    log_value: float
    M: int
    gamma: int
    saturated: bool


def _log_derivative_norms(g, log_scale, gamma_cap, floor=1e-15):
    """log ||d^gamma g||_{L^2(T)} for gamma = 0..gamma_cap from Fourier data."""
    c = g.coeffs
    a = np.abs(c)
    top = a.max() if a.size else 0.0
    out = np.full(gamma_cap + 1, -np.inf)
    if top == 0:
        return out
    keep = a > floor * top
    m = np.abs(wavenumbers(g.N))[keep].astype(float)
    la = np.log(a[keep])
    with np.errstate(divide="ignore"):
        lm = np.log(m)
    for gam in range(gamma_cap + 1):
        terms = 2.0 * la + (2.0 * gam * lm if gam else 0.0)
        terms = terms[np.isfinite(terms)]
        if terms.size:
            out[gam] = 0.5 * (np.log(TWO_PI) + np.logaddexp.reduce(terms)) + log_scale
    return out


def gs_norm(modes, params, m=2, n=1):
    """log of sup_{M, gamma} C^{-M-gamma} M!^{-m mu} gamma!^{-sigma} ||P^M d_t^gamma u||.

    ``modes`` is a list of (lam, TorusFunction, log_scale) triples; the L^2
    norm over T x R^n is the root of the sum of per-mode squares.
    """
    C, mu, sigma = params.C, params.mu, params.sigma
    Mc, Gc = params.M_cap, params.gamma_cap
    per_mode = []
    for lam, g, ls in modes:
        per_mode.append((abs(float(lam)), _log_derivative_norms(g, ls, Gc)))
    best = (-np.inf, 0, 0)
    logC = np.log(C)
    for M in range(Mc + 1):
        for gam in range(Gc + 1):
            terms = []
            for lam, ld in per_mode:
                if lam == 0 and M > 0:
                    continue
                v = (M * np.log(lam) if M else 0.0) + ld[gam]
                if np.isfinite(v):
                    terms.append(2.0 * v)
            if not terms:
                continue
            val = 0.5 * float(np.logaddexp.reduce(terms))
            val -= (M + gam) * logC + m * mu * lgamma(M + 1) + sigma * lgamma(gam + 1)
            # ties go to the larger index
            if val >= best[0] - 1e-12 * max(1.0, abs(val)):
                if val > best[0] or (M, gam) > best[1:]:
                    best = (max(val, best[0]), M, gam)
    sat = best[1] == Mc or best[2] == Gc
    return NormValue(best[0], best[1], best[2], sat)


# -- witness pair from a disconnected superlevel set ------------------------------


@dataclass
class WitnessPair:
    f0: TorusFunction
    v0: TorusFunction
    dv0: TorusFunction
    level: float  # superlevel value: the components are {B > level}
    r0: float  # the same level in the sublevel convention of -B, r0 = -level
    components: list
    eps: float
    M: float
    c1: float
    c2: float
    B: TorusFunction = field(repr=False)
    orientation: int = 1
    supports: dict = field(default_factory=dict)


def _arc_interval(start, length, N):
    h = TWO_PI / N
    return start * h, length * h


def _dense_min(Bf, a, b, n=2001):
    x = np.linspace(a, b, n)
    return float(np.min(np.real(Bf(x))))


def _dense_max(Bf, a, b, n=2001):
    x = np.linspace(a, b, n)
    return float(np.max(np.real(Bf(x))))


def build_witness_pair(B, r=None, sigma=2.0, transition=0.25, bump=0.5, orientation=1):
    """Construct f0, v0 from two components of a disconnected superlevel set of B.

    ``B`` is the periodic primitive of b (TorusFunction).  v0 rises inside the
    first component, stays 1 along the arc to the second and falls inside
    it; f0 is a bump in the gap following the first component minus the same
    bump in the gap following the second.  ``transition`` and ``bump`` are
    the fractions of the available room used for the v0 ramps and f0 bumps.
    """
    if not isinstance(B, TorusFunction):
        B = TorusFunction(B)
    Bv = np.real(B.samples)
    N = B.N
    conn = connectedness_scan(Bv)
    if conn.connected:
        raise ValueError("every superlevel set is connected; no witness pair exists")
    level = conn.r_witness if r is None else float(r)
    mask = Bv > level
    comps = arcs(mask)
    if len(comps) < 2:
        raise ValueError(f"level {level:.6g} gives {len(comps)} component(s); need two")
    # keep the two components with the highest peaks
    peaks = []
    for s, L in comps:
        idx = (s + np.arange(L)) % N
        peaks.append(float(Bv[idx].max()))
    order = sorted(range(len(comps)), key=lambda i: (-peaks[i], comps[i][0]))[:2]
    order.sort(key=lambda i: comps[i][0])
    K = [comps[i] for i in order]
    h = TWO_PI / N
    t = nodes(N)
    Bf = B

    def refine_peak(s, L):
        a, length = s * h, L * h
        x = a + np.linspace(0, length, 4001)
        return float(x[np.argmax(np.real(Bf(x)))] % TWO_PI), a, a + length

    p1, a1, e1 = refine_peak(*K[0])
    p2, a2, e2 = refine_peak(*K[1])
    room = min(p1 - a1, e1 - p1, p2 - a2, e2 - p2)
    w = transition * room
    # v0: ramp up on [p1 - w, p1 + w], down on [p2 - w, p2 + w]
    D = (p2 + w - (p1 - w)) % TWO_PI
    theta = (t - (p1 - w)) % TWO_PI
    up = gevrey_step(theta / (2 * w), sigma)
    down_arg = (theta - (D - 2 * w)) / (2 * w)
    down = 1.0 - gevrey_step(down_arg, sigma)
    v0 = up * down
    dv0 = gevrey_step_derivative(theta / (2 * w), sigma) / (2 * w) * down \
        - up * gevrey_step_derivative(down_arg, sigma) / (2 * w)

    # gaps following each component (counterclockwise)
    def gap_after(end, next_start):
        length = (next_start - end) % TWO_PI
        x = end + np.linspace(0, length, 4001)
        vals = np.real(Bf(x % TWO_PI))
        # keep the bump clear of the level crossings
        centre = float(x[np.argmin(vals)] % TWO_PI)
        return centre, end, end + length

    g1 = gap_after(e1, a2)
    g2 = gap_after(e2, a1)

    def half_room(g):
        centre, lo, hi = g
        off = (centre - lo) % TWO_PI
        return min(off, (hi - lo) - off)

    hw = bump * min(half_room(g1), half_room(g2))
    f0 = gevrey_bump(g1[0], hw, sigma, N) - gevrey_bump(g2[0], hw, sigma, N)

    ramp_lo = min(_dense_min(Bf, p1 - w, p1 + w), _dense_min(Bf, p2 - w, p2 + w))
    f_hi = max(_dense_max(Bf, g1[0] - hw, g1[0] + hw), _dense_max(Bf, g2[0] - hw, g2[0] + hw))
    r0 = -level
    M = -ramp_lo
    if not M < r0:
        raise ValueError("v0 ramps leave the superlevel components")
    eps = 0.5 * (M + r0)
    c1 = eps + f_hi
    c2 = -eps - ramp_lo
    supports = {"ramps": [(p1 - w, p1 + w), (p2 - w, p2 + w)],
                "bumps": [(g1[0] - hw, g1[0] + hw), (g2[0] - hw, g2[0] + hw)],
                "components": [(a1, e1), (a2, e2)]}
    return WitnessPair(f0, TorusFunction(v0), TorusFunction(dv0), level, r0,
                       [_arc_interval(s, L, N) for s, L in K], eps, M, c1, c2, B,
                       orientation, supports)


def witness_invariants(w):
    """Mean of f0, overlap of supports with the components, and int f0 v0."""
    t = nodes(w.f0.N)
    Bv = np.real(w.B.samples)
    f_on = np.abs(w.f0.samples) > 0
    dv_on = np.abs(w.dv0.samples) > 0
    return {
        "mean_f0": float(abs(np.mean(w.f0.samples))),
        "f0_in_components": bool(np.any(Bv[f_on] > w.level)),
        "dv0_outside_components": bool(np.any(Bv[dv_on] <= w.level)),
        "pairing": float(np.real(TWO_PI * np.mean(w.f0.samples * w.v0.samples))),
        "grid": t.size,
    }


# -- Hormander ratio -----------------------------------------------------------------


@dataclass
class HormanderPoint:
    ell: int
    lam: float
    log_ratio: float
    log_pairing: float
    log_norm_f: float
    log_norm_tLv: float
    pairing: float
    saturated: bool
    admissible: bool
    admissibility_residual: float


def _primitive_a(c):
    return c.A.samples.real + c.a0 * nodes(c.N)


def hormander_ratio(ell, witness, c, sys, params=NormParams(), check_admissible=True):
    """Log Hormander ratio for mode ``ell`` built from a witness pair.

    ``c`` must have every mode resonant; its real part is removed with the
    full conjugation factor so only b enters the magnitudes.
    """
    lam = float(sys.eigenvalue(ell))
    if lam == 0 or np.sign(lam) != witness.orientation:
        raise ValueError("witness orientation must match the sign of the eigenvalue")
    N = witness.f0.N
    if c.N != N:
        c = c.resample(N)
    lam_abs = abs(lam)
    Bw = np.real(witness.B.samples)
    E = lam_abs * (witness.eps + Bw)
    phase = lam * _primitive_a(c)
    f0 = witness.f0.samples.real
    on = f0 != 0
    top_f = float(np.max(E[on]))
    fm = np.where(on, f0 * np.exp(np.where(on, E - top_f, 0.0)), 0.0) * np.exp(-1j * phase)
    dv = witness.dv0.samples.real
    on_v = dv != 0
    top_v = float(np.max(-E[on_v]))
    tlv = 1j * np.where(on_v, dv * np.exp(np.where(on_v, -E - top_v, 0.0)), 0.0) * np.exp(1j * phase)

    # pairing int f_l v_l over T x R^n: exponents cancel pointwise
    v0 = witness.v0.samples.real
    prod = f0 * v0
    time_int = float(TWO_PI * np.mean(prod))
    space_int = hermite_norm_squared(sys, ell) if sys.has_eigenfunctions else 1.0
    pairing = time_int * space_int

    nf = gs_norm([(lam, TorusFunction(fm), top_f)], params, sys.m, sys.n)
    nv = gs_norm([(lam, TorusFunction(tlv), top_v)], params, sys.m, sys.n)
    log_pair = float(np.log(abs(pairing)))
    ratio = log_pair - nf.log_value - nv.log_value
    adm, resid = True, 0.0
    if check_admissible:
        mode = ModeData(ell, lam, TorusFunction(f0 * np.exp(-1j * phase)),
                        np.where(on, E, np.min(E[on])))
        rep = is_admissible([mode], c, [ell])
        adm, resid = rep.admissible, rep.residuals.get(ell, 0.0)
    return HormanderPoint(ell, lam, float(ratio), log_pair, nf.log_value, nv.log_value,
                          pairing, nf.saturated or nv.saturated, adm, float(resid))


def hormander_curve(c, sys, ells, params=NormParams(), N=4096, sigma=None, witness=None):
    """Witness pair from c and the ratio for each ell in ``ells``."""
    cc = c.resample(N)
    zs = zset(sys, cc.c0, max(ells))
    if zs.classification != "AllModes":
        raise ValueError("the ratio construction needs every mode resonant")
    if witness is None:
        witness = build_witness_pair(cc.B_periodic, sigma=sigma or params.sigma)
    return witness, [hormander_ratio(l, witness, cc, sys, params) for l in ells]


# -- Laplace-method blowup ------------------------------------------------------------


@dataclass
class LaplacePoint:
    j: int
    lam: float
    log_abs_u: float
    scaled: float  # lambda^{1/k} |u_j(t*)|
    log_data_scale: float


@dataclass
class LaplaceCurve:
    direction: str
    s_star: float
    t_star: float
    peak: float  # maximal normalized kernel exponent
    k: int
    curvature: float
    points: list
    psi_min: float
    increasing: bool


def _kernel_exponent(Bf, b0, direction):
    """Normalized exponent e(s, t): Backward int_{t-s}^t b, Forward -int_t^{t+s} b."""
    def e(s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        if direction == "Backward":
            return np.real(Bf(t % TWO_PI) - Bf((t - s) % TWO_PI)) + b0 * s
        return -(np.real(Bf((t + s) % TWO_PI) - Bf(t % TWO_PI)) + b0 * s)
    return e


def _golden_max(fun, a, b, tol=1e-13, it=200):
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(it):
        if b - a < tol:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = fun(x1)
    return 0.5 * (a + b)


def locate_peak(c, direction, grid=256):
    """Maximize the kernel exponent over (s, t) in [0, 2pi]^2.

    Coarse grid search (ties to the smallest (s, t)) followed by alternating
    golden-section refinement.
    """
    Bf = c.B_periodic
    e = _kernel_exponent(Bf, c.b0, direction)
    Bg = np.real(c.B_periodic.resample(grid).samples) if c.N >= grid else np.real(Bf(nodes(grid)))
    k = np.arange(grid)
    s_idx = k[:, None]
    t_idx = k[None, :]
    h = TWO_PI / grid
    s_vals = s_idx * h
    if direction == "Backward":
        vals = Bg[t_idx] - Bg[(t_idx - s_idx) % grid] + c.b0 * s_vals
    else:
        vals = -(Bg[(t_idx + s_idx) % grid] - Bg[t_idx] + c.b0 * s_vals)
    vals[0, :] = -np.inf  # s = 0 is the trivial value
    flat = np.flatnonzero(vals >= vals.max() - 1e-14)
    i, j = np.unravel_index(flat[0], vals.shape)
    s, t = i * h, j * h
    for _ in range(60):
        s_old, t_old = s, t
        t = _golden_max(lambda x: float(e(s, x)), t - h, t + h)
        s = _golden_max(lambda x: float(e(x, t)), max(s - h, 1e-9), min(s + h, TWO_PI))
        if abs(s - s_old) + abs(t - t_old) < 1e-14:
            break
    return float(s), float(t) % TWO_PI, float(e(s, t))


def zero_order(psi, s_star, h=1e-2, tol=1e-8, k_max=3):
    """Half the even order of the zero of psi at s_star (1 for a quadratic minimum).

    Each central difference is taken at h and h/2; a genuine derivative gives
    matching values, while one left over from a higher-order zero shrinks.
    """
    from math import comb

    def central(order, step):
        pts = np.arange(-order // 2 * 1.0, order // 2 + 1.0)
        coeff = np.array([(-1) ** (order - i) * comb(order, i) for i in range(order + 1)], dtype=float)
        return float(np.dot(coeff, [psi(s_star + p * step) for p in pts]) / step ** order)

    for k in range(1, k_max + 1):
        d1 = central(2 * k, h)
        d2 = central(2 * k, h / 2)
        if max(abs(d1), abs(d2)) <= tol or abs(d2) < 0.5 * abs(d1):
            continue
        if d2 > 0:
            return k, d2
        raise ValueError(f"odd or negative leading behaviour at the maximizer (derivative {d2:.3e})")
    raise ValueError("maximizer is degenerate beyond the supported order")


def _laplace_direction(lam, b0, tol=1e-12):
    if abs(b0) <= tol:
        b0 = 0.0
    if lam * b0 < 0 or (b0 == 0 and lam > 0):
        return "Backward"
    return "Forward"


def laplace_blowup(c, sys, js, delta=None, sigma=2.0, panels_per_width=1.0):
    """lambda_j^{1/k} |u_j(t*)| for data concentrated at the kernel maximum.

    The evaluation direction keeps the small-divisor prefactor bounded:
    history integrals when lambda b0 < 0, future integrals when
    lambda b0 > 0.  Exponents are combined before exponentiating so every
    evaluated exponential is at most one.
    """
    if sign_profile(c.b) != SignProfile.CHANGES_SIGN:
        raise ValueError("b must change sign")
    lams = [float(sys.eigenvalue(j)) for j in js]
    signs = {np.sign(l) for l in lams}
    if len(signs) != 1 or 0 in signs:
        raise ValueError("use modes with eigenvalues of one nonzero sign")
    lam_sign = signs.pop()
    direction = _laplace_direction(lam_sign, c.b0)
    # the exponent is lam * e(s, t) for Backward with lam > 0; flip for lam < 0
    sgn = 1.0 if lam_sign > 0 else -1.0
    Bf = c.B_periodic
    base = _kernel_exponent(Bf, c.b0, direction)

    def e(s, t):
        return sgn * base(s, t)

    # locate the maximum of sgn * e
    tmp = Coefficient(c.a, c.b * sgn) if sgn < 0 else c
    s_star, t_star, peak = locate_peak(tmp, direction)
    if peak <= 0:
        raise ValueError("kernel exponent has no positive maximum")

    def psi(s):
        return peak - float(e(s, t_star))

    k, curv = zero_order(psi, s_star)
    if delta is None:
        delta = 0.25 * min(s_star, TWO_PI - s_star, 1.0)
    # phi centred where f is sampled by the kernel at t*
    centre = (t_star - s_star) if direction == "Backward" else (t_star + s_star)
    s_grid = np.linspace(s_star - delta, s_star + delta, 4001)
    psi_min = float(min(psi(x) for x in s_grid[::40]))

    resonant = [j for j, lam in zip(js, lams) if is_resonant(lam, c.c0)]
    if resonant:
        raise ValueError(f"resonant modes {resonant} have no unique periodic solution")
    points = []
    for j, lam in zip(js, lams):
        lam_abs = abs(lam)
        width = 1.0 / np.sqrt(max(lam_abs * abs(curv), 1e-300)) if k == 1 else (lam_abs * abs(curv)) ** (-1.0 / (2 * k))
        panel = min(delta / 8, panels_per_width * width)
        P = int(np.ceil(2 * delta / panel))
        xg, wg = np.polynomial.legendre.leggauss(10)
        edges = np.linspace(s_star - delta, s_star + delta, P + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        hh = 0.5 * np.diff(edges)
        s = (mid[:, None] + hh[:, None] * xg[None, :]).ravel()
        w = (hh[:, None] * wg[None, :]).ravel()
        tau = (t_star - s) if direction == "Backward" else (t_star + s)
        x = circular_offset(tau, centre) / delta
        phi = gevrey_step(2.0 * (1.0 - np.abs(x)), sigma)
        ex = lam_abs * (np.asarray(e(s, t_star)) - peak)
        # the a-dependent phase of the data cancels the kernel phase at t*
        integral = float(np.sum(w * phi * np.exp(ex)))
        lp = log_prefactor(lam, c.c0, direction).real
        log_u = lp + np.log(integral)
        scaled = float(np.exp(log_u + np.log(lam_abs) / k))
        points.append(LaplacePoint(int(j), lam, float(log_u), scaled, -lam_abs * peak))
    vals = [p.scaled for p in points]
    inc = all(b > a for a, b in zip(vals, vals[1:]))
    return LaplaceCurve(direction, s_star, t_star, peak, k, curv, points, psi_min, inc)


def laplace_mode_data(c, j, lam, curve, delta=None, sigma=2.0):
    """The forcing mode of :func:`laplace_blowup` on the grid (for cross-checks)."""
    direction = curve.direction
    s_star, t_star = curve.s_star, curve.t_star
    if delta is None:
        delta = 0.25 * min(s_star, TWO_PI - s_star, 1.0)
    centre = (t_star - s_star) if direction == "Backward" else (t_star + s_star)
    t = nodes(c.N)
    x = circular_offset(t, centre) / delta
    phi = gevrey_step(2.0 * (1.0 - np.abs(x)), sigma)
    # phase exp(-i lam [int_0^tau a - int_0^{t*} a]) cancels the kernel phase at t*
    # unwrap the primitive of a around the bump so the data stays periodic
    tau = centre + circular_offset(t, centre)
    Aa = c.A.samples.real + c.a0 * tau
    A_star = float(np.real(c.A(np.array([t_star]))[0])) + c.a0 * t_star
    f = phi * np.exp(-1j * lam * (Aa - A_star))
    return ModeData(j, lam, TorusFunction(f), -abs(lam) * curve.peak)


# -- Diophantine counterexample --------------------------------------------------------


@dataclass
class DiophantinePoint:
    j: int
    lam: float
    log_theta: float
    log_abs_u: float
    lower_bound_ok: bool


@dataclass
class DiophantineCurve:
    eps0: float
    delta: float
    points: list


def diophantine_counterexample(c, sys, scan, mu=0.5, n=None, delta=0.5, c0=None, modes=None):
    """|u_j(pi)| for forcing concentrated near pi/2 at the scan's witness modes.

    The forcing has amplitude exp(-eps0 j^{1/(2 n mu)}) with eps0 the
    smallest small-divisor growth rate among the witnesses, so every forced
    value stays above the plateau length ``delta``.
    """
    if scan.verdict != "Violated" or not scan.witnesses:
        raise ValueError("scan has no Diophantine witnesses")
    if sign_profile(c.b) == SignProfile.CHANGES_SIGN:
        raise ValueError("b must not change sign")
    n = n or sys.n
    mean = c.c0 if c0 is None else c0
    pts = []
    rates = {}
    chosen = scan.witnesses if modes is None else [j for j in modes if j in scan.witnesses]
    if not chosen:
        raise ValueError("none of the requested modes is a witness")
    for j in chosen:
        lam = sys.eigenvalue(j)
        lt, lg = small_divisors_for(lam, mean)
        rate = (lt if float(lam) > 0 else lg) / max(j, 1) ** (1.0 / (2 * n * mu))
        rates[j] = (lam, lt, lg, rate)
    eps0 = min(r[3] for r in rates.values())
    if eps0 <= 0:
        raise ValueError("witnesses do not give a positive decay rate")
    # phi == 1 on an interval of length delta: int phi >= delta
    bump = gevrey_bump(np.pi / 2, delta, 2.0, 4096)
    log_int = float(np.log(np.real(TWO_PI * np.mean(bump.samples))))
    for j, (lam, lt, lg, rate) in rates.items():
        lpre = lt if float(lam) > 0 else lg
        log_u = lpre - eps0 * max(j, 1) ** (1.0 / (2 * n * mu)) + log_int
        pts.append(DiophantinePoint(int(j), float(lam), float(lpre), float(log_u),
                                    bool(log_u >= np.log(delta) - 1e-12)))
    return DiophantineCurve(float(eps0), float(delta), pts)


def diophantine_mode_data(c, j, lam, eps0, mu=0.5, n=1, delta=0.5):
    """Grid forcing for a counterexample mode (float arithmetic; for cross-checks)."""
    t = nodes(c.N)
    phi = gevrey_bump(np.pi / 2, delta, 2.0, c.N).samples.real
    Aa = c.A.samples.real + c.a0 * t
    A_pi = float(np.real(c.A(np.array([np.pi]))[0])) + c.a0 * np.pi
    f = phi * np.exp(-1j * lam * (Aa - A_pi))
    return ModeData(j, lam, TorusFunction(f), -eps0 * max(j, 1) ** (1.0 / (2 * n * mu)))
