"""Problem specification: loading, validation and construction of inputs.

A specification is a JSON (or TOML) document with the sections
``operator``, ``coefficient``, ``rhs``, ``initial``, ``numerics`` and
``options``.  Validation errors name the offending field path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import jsonschema
import mpmath
import numpy as np

from . import spectral
from .admissibility import ModeData
from .torus import Coefficient, TorusFunction, nodes, spectral_derivative

NUMERIC_DEFAULTS = {
    "N": 512,
    "J": 64,
    "scan_J": 4096,
    "mu": 0.5,
    "sigma": 2.0,
    "tol": 1e-8,
    "C": 10.0,
    "M_cap": 24,
    "gamma_cap": 24,
    "dps": 50,
}

_number = {"type": "number"}
_fraction = {"type": "string", "pattern": r"^\s*-?\d+(\.\d+)?(\s*/\s*\d+)?\s*$"}

_function = {
    "oneOf": [
        _number,
        _fraction,
        {
            "type": "object",
            "properties": {
                "fourier": {
                    "type": "object",
                    "properties": {
                        "const": {"oneOf": [_number, _fraction]},
                        "cos": {"type": "array", "items": _number},
                        "sin": {"type": "array", "items": _number},
                    },
                    "additionalProperties": False,
                },
            },
            "required": ["fourier"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"samples": {"type": "array", "items": _number, "minItems": 4}},
            "required": ["samples"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "preset": {"enum": ["zero", "sin", "cos"]},
                "k": {"type": "integer", "minimum": 1},
                "scale": _number,
                "shift": _number,
            },
            "required": ["preset"],
            "additionalProperties": False,
        },
    ]
}

_complex_function = {
    "oneOf": [
        _function,
        {
            "type": "object",
            "properties": {"real": _function, "imag": _function},
            "required": ["real"],
            "additionalProperties": False,
        },
    ]
}

SCHEMA = {
    "type": "object",
    "properties": {
        "operator": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["harmonic1d", "harmonicnd", "anisotropic1d", "custom"]},
                "n": {"type": "integer", "minimum": 1},
                "m": {"type": "integer", "minimum": 1},
                "omega": {"type": "number", "exclusiveMinimum": 0},
                "spectrum": {"type": "array", "items": {"oneOf": [_number, {"type": "string"}]}, "minItems": 1},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "coefficient": {
            "type": "object",
            "properties": {"a": _function, "b": _function},
            "required": ["a", "b"],
            "additionalProperties": False,
        },
        "rhs": {
            "type": "object",
            "properties": {
                "modes": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "j": {"type": "integer", "minimum": 0},
                            "f": _complex_function,
                            "log_scale": _number,
                        },
                        "required": ["j", "f"],
                        "additionalProperties": False,
                    },
                },
                "generator": {
                    "type": "object",
                    "properties": {
                        "kind": {"enum": ["planted-decay"]},
                        "eps": {"type": "number", "exclusiveMinimum": 0},
                        "mu": {"type": "number", "minimum": 0.5},
                        "J": {"type": "integer", "minimum": 3},
                    },
                    "required": ["kind", "eps", "mu"],
                    "additionalProperties": False,
                },
                "separable": {
                    "type": "object",
                    "properties": {
                        "time": _complex_function,
                        "space": {
                            "type": "object",
                            "properties": {
                                "center": {"type": "array", "items": _number},
                                "width": {"type": "number", "exclusiveMinimum": 0},
                            },
                            "additionalProperties": False,
                        },
                    },
                    "required": ["time"],
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "initial": {
            "type": "object",
            "properties": {
                "g": {
                    "type": "array",
                    "items": {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]},
                },
                "random": {
                    "type": "object",
                    "properties": {"count": {"type": "integer", "minimum": 1}},
                    "required": ["count"],
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "numerics": {
            "type": "object",
            "properties": {
                "N": {"type": "integer", "minimum": 8},
                "J": {"type": "integer", "minimum": 0},
                "scan_J": {"type": "integer", "minimum": 16},
                "mu": {"type": "number", "minimum": 0.5},
                "sigma": {"type": "number", "exclusiveMinimum": 1},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "C": {"type": "number", "exclusiveMinimum": 0},
                "M_cap": {"type": "integer", "minimum": 8},
                "gamma_cap": {"type": "integer", "minimum": 8},
                "dps": {"type": "integer", "minimum": 15},
            },
            "additionalProperties": False,
        },
        "options": {"type": "object"},
        "seed": {"type": "integer"},
    },
    "required": ["operator", "coefficient"],
    "additionalProperties": False,
}


class SpecError(ValueError):
    """Schema or semantic violation, with the field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


def _path(parts):
    out = "spec"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate(doc):
    """Raise SpecError for the most specific schema violation."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    best = jsonschema.exceptions.best_match(validator.iter_errors(doc))
    if best is not None:
        raise SpecError(_path(best.absolute_path), best.message)


def load_document(path):
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        import tomli
        return tomli.loads(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("spec", f"invalid JSON: {exc}") from exc


# -- builders --------------------------------------------------------------------------


def _parse_fraction(s):
    return Fraction(s.replace(" ", ""))


def build_function(spec, N):
    """Real samples and the exact mean when the spec gives one."""
    t = nodes(N)
    if isinstance(spec, (int, float)):
        return np.full(N, float(spec)), None
    if isinstance(spec, str):
        q = _parse_fraction(spec)
        return np.full(N, float(q)), q
    if "fourier" in spec:
        fs = spec["fourier"]
        const = fs.get("const", 0.0)
        exact = _parse_fraction(const) if isinstance(const, str) else None
        v = np.full(N, float(exact if exact is not None else const))
        for k, a in enumerate(fs.get("cos", []), start=1):
            v = v + a * np.cos(k * t)
        for k, b in enumerate(fs.get("sin", []), start=1):
            v = v + b * np.sin(k * t)
        return v, exact
    if "samples" in spec:
        s = np.asarray(spec["samples"], dtype=float)
        return np.real(TorusFunction(s).resample(N).samples), None
    k = spec.get("k", 1)
    scale = spec.get("scale", 1.0)
    shift = spec.get("shift", 0.0)
    base = {"zero": 0.0 * t, "sin": np.sin(k * t), "cos": np.cos(k * t)}[spec["preset"]]
    return scale * base + shift, None


def build_complex_function(spec, N):
    if isinstance(spec, dict) and "real" in spec:
        re, _ = build_function(spec["real"], N)
        im = build_function(spec["imag"], N)[0] if "imag" in spec else 0.0
        return re + 1j * im
    return build_function(spec, N)[0].astype(complex)


def build_system(op, dps=50):
    kind = op["kind"]
    if kind == "harmonic1d":
        return spectral.harmonic_1d()
    if kind == "harmonicnd":
        return spectral.harmonic_nd(op.get("n", 1))
    if kind == "anisotropic1d":
        return spectral.anisotropic_1d(op.get("omega", 1.0))
    if "spectrum" not in op:
        raise SpecError("spec.operator.spectrum", "custom operator needs a spectrum table")
    vals = []
    with mpmath.workdps(dps):
        for v in op["spectrum"]:
            vals.append(mpmath.mpf(v) if isinstance(v, str) else v)
    try:
        return spectral.custom_spectrum(vals, op.get("n", 1), op.get("m", 2))
    except ValueError as exc:
        raise SpecError("spec.operator.spectrum", str(exc)) from exc


@dataclass
class Problem:
    """Validated specification with constructed objects."""

    document: dict
    numerics: dict
    options: dict
    system: object
    coefficient: Coefficient
    c0: object  # exact mean (Fraction) when available, else complex
    seed: int | None = None
    modes: list = field(default_factory=list)
    initial: np.ndarray | None = None
    planted: dict | None = None

    @property
    def N(self):
        return self.numerics["N"]

    @property
    def J(self):
        return self.numerics["J"]


def planted_decay_modes(c, sys, eps, mu, J):
    """Right-hand sides whose solutions have sup|u_j| = exp(-eps j^{1/(2 n mu)}).

    The profile exp(i sin t) is unimodular, so the sup is exact; f = L u is
    formed mode-wise and the decay is carried in ``log_scale``.
    """
    t = nodes(c.N)
    prof = TorusFunction(np.exp(1j * np.sin(t)))
    dprof = spectral_derivative(prof)
    lams = sys.eigenvalues(J)
    out = []
    for j in range(J + 1):
        lam = float(lams[j])
        f = -1j * dprof.samples + lam * c.c.samples * prof.samples
        out.append(ModeData(j, lam, TorusFunction(f), -eps * max(j, 1) ** (1.0 / (2 * sys.n * mu))))
    return out


def _separable_modes(spec, sys, N, J):
    tf = build_complex_function(spec["time"], N)
    space = spec.get("space", {})
    centre = np.asarray(space.get("center", [0.0] * sys.n), dtype=float)
    width = float(space.get("width", 1.0))

    def g(x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum((x - centre) ** 2, axis=1) if x.ndim == 2 else (x - centre[0]) ** 2
        return np.exp(-r2 / (2 * width ** 2))

    coeffs = spectral.expand(sys, g, J)
    lams = sys.eigenvalues(J)
    return [ModeData(j, float(lams[j]), TorusFunction(tf * coeffs[j])) for j in range(J + 1)
            if abs(coeffs[j]) > 0]


def build_problem(doc, seed=None):
    validate(doc)
    numerics = dict(NUMERIC_DEFAULTS)
    numerics.update(doc.get("numerics", {}))
    N = numerics["N"]
    sys = build_system(doc["operator"], numerics["dps"])
    a, a_exact = build_function(doc["coefficient"]["a"], N)
    b, b_exact = build_function(doc["coefficient"]["b"], N)
    c = Coefficient(TorusFunction(a), TorusFunction(b))
    b_zero_exact = b_exact == 0 or (not np.any(b) and b_exact is None)
    c0 = a_exact if (a_exact is not None and b_zero_exact) else c.c0
    seed = doc.get("seed") if seed is None else seed
    prob = Problem(doc, numerics, dict(doc.get("options", {})), sys, c, c0, seed)
    rhs = doc.get("rhs", {})
    J = numerics["J"]
    if "modes" in rhs:
        lams = sys.eigenvalues(max(m["j"] for m in rhs["modes"]))
        for i, m in enumerate(rhs["modes"]):
            try:
                f = build_complex_function(m["f"], N)
            except ValueError as exc:
                raise SpecError(_path(["rhs", "modes", i, "f"]), str(exc)) from exc
            prob.modes.append(ModeData(m["j"], float(lams[m["j"]]), TorusFunction(f), m.get("log_scale", 0.0)))
    if "generator" in rhs:
        gen = rhs["generator"]
        Jg = gen.get("J", J)
        prob.modes.extend(planted_decay_modes(c, sys, gen["eps"], gen["mu"], Jg))
        prob.planted = {"eps": gen["eps"], "mu": gen["mu"], "J": Jg}
    if "separable" in rhs:
        prob.modes.extend(_separable_modes(rhs["separable"], sys, N, J))
    init = doc.get("initial", {})
    if "g" in init:
        g = [complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in init["g"]]
        prob.initial = np.asarray(g, dtype=complex)
    elif "random" in init:
        rng = np.random.default_rng(seed)
        count = init["random"]["count"]
        g = np.zeros(J + 1, dtype=complex)
        idx = rng.choice(J + 1, size=min(count, J + 1), replace=False)
        g[idx] = rng.normal(size=idx.size) + 1j * rng.normal(size=idx.size)
        prob.initial = g
    return prob


def load_problem(path, seed=None):
    return build_problem(load_document(path), seed)
