"""Eigenvalue and eigenfunction oracles for the spatial operator P.

Supported models: the 1-D harmonic oscillator -d^2/dx^2 + x^2, its n-D
isotropic version, the anisotropic 1-D oscillator -d^2/dx^2 + w^2 x^2 and a
user-supplied eigenvalue table without eigenfunctions.  Hermite functions are
evaluated by the normalized three-term recurrence, and inner products use
Gauss-Hermite quadrature with unweighted (Christoffel) weights so the
Gaussian factor never has to be formed explicitly.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import roots_hermite

PI_QUARTER = np.pi ** -0.25
_RESCALE = 1e150


@dataclass(frozen=True)
class EigenSystem:
    """Spectral data of P.

    kind is one of "harmonic1d", "harmonicnd", "anisotropic1d", "custom".
    """

    kind: str
    n: int = 1
    m: int = 2
    omega: float = 1.0
    table: tuple = ()

    def __post_init__(self):
        if self.kind not in ("harmonic1d", "harmonicnd", "anisotropic1d", "custom"):
            raise ValueError(f"unknown spectrum kind {self.kind!r}")
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if self.kind == "anisotropic1d" and not self.omega > 0:
            raise ValueError("omega must be positive")
        if self.kind == "custom":
            mags = [abs(v) for v in self.table]
            if not mags:
                raise ValueError("custom spectrum needs a non-empty table")
            if any(b < a for a, b in zip(mags, mags[1:])):
                raise ValueError("custom spectrum must be sorted by |lambda|")

    @property
    def has_eigenfunctions(self):
        return self.kind != "custom"

    @property
    def weyl_exponent(self):
        return self.m / (2 * self.n)

    @property
    def exact(self):
        """True when the table carries arbitrary-precision values."""
        return self.kind == "custom" and any(not isinstance(v, (int, float)) for v in self.table)

    def max_index(self):
        return len(self.table) - 1 if self.kind == "custom" else None

    def eigenvalue(self, j):
        if j < 0:
            raise IndexError("mode index must be >= 0")
        if self.kind == "harmonic1d":
            return float(2 * j + 1)
        if self.kind == "anisotropic1d":
            return self.omega * (2 * j + 1)
        if self.kind == "harmonicnd":
            return float(2 * sum(self.multi_index(j)) + self.n)
        if j >= len(self.table):
            raise IndexError(f"mode {j} beyond custom table of length {len(self.table)}")
        return self.table[j]

    def eigenvalues(self, J):
        """Float eigenvalues for j = 0..J."""
        j = np.arange(J + 1)
        if self.kind == "harmonic1d":
            return 2.0 * j + 1
        if self.kind == "anisotropic1d":
            return self.omega * (2.0 * j + 1)
        if self.kind == "harmonicnd":
            return 2.0 * self._shell_sums(J) + self.n
        if J >= len(self.table):
            raise IndexError(f"J={J} beyond custom table of length {len(self.table)}")
        return np.array([float(v) for v in self.table[: J + 1]])

    def eigenvalues_exact(self, J):
        """Eigenvalues as stored (mpmath numbers for exact custom tables)."""
        if self.kind == "custom":
            if J >= len(self.table):
                raise IndexError(f"J={J} beyond custom table of length {len(self.table)}")
            return list(self.table[: J + 1])
        return list(self.eigenvalues(J))

    # -- n-D indexing -----------------------------------------------------

    def _multi_indices(self, J):
        out = []
        s = 0
        while len(out) <= J:
            shell = [k for k in itertools.product(range(s + 1), repeat=self.n) if sum(k) == s]
            out.extend(sorted(shell))
            s += 1
        return out[: J + 1]

    @cached_property
    def _index_cache(self):
        return {}

    def _shell_sums(self, J):
        # shell s holds C(s+n-1, n-1) indices
        sums = []
        s = 0
        from math import comb
        while len(sums) <= J:
            sums.extend([s] * comb(s + self.n - 1, self.n - 1))
            s += 1
        return np.array(sums[: J + 1])

    def multi_index(self, j):
        """Multi-index of the j-th eigenfunction (ties in lexicographic order)."""
        if self.kind != "harmonicnd":
            return (j,)
        cache = self._index_cache
        if j not in cache:
            for i, k in enumerate(self._multi_indices(max(j, 2 * len(cache)))):
                cache[i] = k
        return cache[j]


def harmonic_1d():
    return EigenSystem("harmonic1d")


def harmonic_nd(n):
    return EigenSystem("harmonicnd", n=n)


def anisotropic_1d(omega):
    return EigenSystem("anisotropic1d", omega=float(omega))


def custom_spectrum(values, n=1, m=2):
    return EigenSystem("custom", n=n, m=m, table=tuple(values))


def eigenvalue(sys, j):
    return sys.eigenvalue(j)


# -- Hermite functions -----------------------------------------------------


def _hermite_stream(J, x):
    """Yield (j, h_j(x)) for j = 0..J with overflow-safe rescaling."""
    x = np.asarray(x, dtype=float)
    log_scale = -0.5 * x * x
    prev = np.zeros_like(x)
    cur = np.full_like(x, PI_QUARTER)
    yield 0, cur * np.exp(log_scale)
    for j in range(J):
        nxt = np.sqrt(2.0 / (j + 1)) * x * cur - np.sqrt(j / (j + 1.0)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            prev[big] /= _RESCALE
            log_scale[big] += np.log(_RESCALE)
        yield j + 1, cur * np.exp(log_scale)


def hermite_functions(J, x):
    """Array of shape (J+1, len(x)) with normalized Hermite functions h_0..h_J."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((J + 1, x.size))
    for j, h in _hermite_stream(J, x.ravel()):
        out[j] = h
    return out


def hermite_function(j, x):
    x = np.asarray(x, dtype=float)
    for k, h in _hermite_stream(j, x.ravel()):
        if k == j:
            return h.reshape(x.shape)


def gauss_hermite(n_nodes):
    """Nodes and unweighted weights: sum w_i g(x_i) ~ int g dx for g ~ poly * exp(-x^2)."""
    x, _ = roots_hermite(n_nodes)
    sq = np.zeros_like(x)
    for _, h in _hermite_stream(n_nodes - 1, x):
        sq += h * h
    return x, 1.0 / sq


def default_nodes(J):
    return max(128, 2 * J + 2)


def eigenfunction_eval(sys, j, x):
    """phi_j(x); for n-D systems x has trailing dimension n."""
    if not sys.has_eigenfunctions:
        raise NotImplementedError("custom spectra carry no eigenfunctions")
    if sys.kind == "harmonic1d":
        return hermite_function(j, x)
    if sys.kind == "anisotropic1d":
        w = sys.omega
        return w ** 0.25 * hermite_function(j, np.sqrt(w) * np.asarray(x, dtype=float))
    x = np.asarray(x, dtype=float)
    k = sys.multi_index(j)
    out = np.ones(x.shape[:-1])
    for axis, kk in enumerate(k):
        out = out * hermite_function(kk, x[..., axis])
    return out


# -- Weyl asymptotics ------------------------------------------------------


def weyl_fit(sys, J):
    """Fit |lambda_j| ~ rho * j**e over j in [J/2, J]; returns (rho, e)."""
    if J < 32:
        raise ValueError("weyl_fit needs J >= 32")
    lam = np.abs(sys.eigenvalues(J))
    j = np.arange(J // 2, J + 1)
    keep = lam[j] > 0
    slope, intercept = np.polyfit(np.log(j[keep]), np.log(lam[j][keep]), 1)
    return float(np.exp(intercept)), float(slope)


# -- expansion and synthesis -----------------------------------------------


def quadrature_grid(sys, J, n_nodes=None):
    """Spatial nodes and weights used by :func:`expand`.

    For n-D systems the grid is a tensor product; nodes have shape (Q, n).
    """
    if not sys.has_eigenfunctions:
        raise NotImplementedError("custom spectra carry no eigenfunctions")
    if sys.kind == "harmonicnd":
        kmax = max(max(sys.multi_index(j)) for j in range(J + 1))
        q = n_nodes or default_nodes(kmax)
        x1, w1 = gauss_hermite(q)
        mesh = np.stack(np.meshgrid(*([x1] * sys.n), indexing="ij"), axis=-1).reshape(-1, sys.n)
        wts = np.prod(np.stack(np.meshgrid(*([w1] * sys.n), indexing="ij"), axis=-1).reshape(-1, sys.n), axis=1)
        return mesh, wts
    q = n_nodes or default_nodes(J)
    y, w = gauss_hermite(q)
    if sys.kind == "anisotropic1d":
        s = np.sqrt(sys.omega)
        return y / s, w / s
    return y, w


def _basis_1d(sys, J, x):
    if sys.kind == "anisotropic1d":
        w = sys.omega
        return w ** 0.25 * hermite_functions(J, np.sqrt(w) * x)
    return hermite_functions(J, x)


def _basis_nd(sys, J, x):
    kmax = max(max(sys.multi_index(j)) for j in range(J + 1))
    per_axis = [hermite_functions(kmax, x[:, a]) for a in range(sys.n)]
    out = np.empty((J + 1, x.shape[0]))
    for j in range(J + 1):
        row = np.ones(x.shape[0])
        for a, k in enumerate(sys.multi_index(j)):
            row = row * per_axis[a][k]
        out[j] = row
    return out


def expand(sys, g, J, n_nodes=None, check=True):
    """Eigen-coefficients g_j = <g, phi_j>, j = 0..J.

    ``g`` is a callable or its samples on :func:`quadrature_grid`.  When
    ``check`` is set, a round trip through :func:`synthesize` is compared
    with the samples and a warning is raised above 1e-6 relative error.
    """
    x, w = quadrature_grid(sys, J, n_nodes)
    vals = np.asarray(g(x) if callable(g) else g)
    if vals.shape[0] != w.shape[0]:
        raise ValueError("samples do not match the quadrature grid")
    coeffs = np.zeros(J + 1, dtype=complex if np.iscomplexobj(vals) else float)
    weighted = w * vals
    if sys.kind == "harmonicnd":
        coeffs = _basis_nd(sys, J, x) @ weighted
    else:
        xs = np.sqrt(sys.omega) * x if sys.kind == "anisotropic1d" else x
        amp = sys.omega ** 0.25 if sys.kind == "anisotropic1d" else 1.0
        for j, h in _hermite_stream(J, xs):
            coeffs[j] = amp * (h @ weighted)
    if check:
        back = synthesize(sys, coeffs, x)
        scale = max(np.max(np.abs(vals)), 1e-300)
        err = np.max(np.abs(back - vals)) / scale
        if err > 1e-6:
            warnings.warn(
                f"expansion round-trip error {err:.2e} exceeds 1e-6; "
                "increase J or the quadrature order", RuntimeWarning, stacklevel=2)
    return coeffs


def synthesize(sys, coeffs, x):
    """Pointwise sum of g_j phi_j(x)."""
    coeffs = np.asarray(coeffs)
    J = coeffs.size - 1
    x = np.asarray(x, dtype=float)
    if sys.kind == "harmonicnd":
        flat = x.reshape(-1, sys.n)
        return (coeffs @ _basis_nd(sys, J, flat)).reshape(x.shape[:-1])
    flat = x.ravel()
    xs = np.sqrt(sys.omega) * flat if sys.kind == "anisotropic1d" else flat
    amp = sys.omega ** 0.25 if sys.kind == "anisotropic1d" else 1.0
    out = np.zeros(flat.shape, dtype=np.result_type(coeffs, float))
    for j, h in _hermite_stream(J, xs):
        out += coeffs[j] * h
    return (amp * out).reshape(x.shape)


def hermite_norm_squared(sys, j, n_nodes=None):
    """<phi_j, phi_j> by Gauss-Hermite quadrature (unit up to rounding)."""
    x, w = quadrature_grid(sys, j, n_nodes)
    if sys.kind == "harmonicnd":
        phi = _basis_nd(sys, j, x)[j]
    else:
        phi = _basis_1d(sys, j, x)[j]
    return float(w @ (phi * phi))
