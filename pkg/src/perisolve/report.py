"""Deterministic report output.

JSON floats are written with 17 significant digits; non-finite values are
written as the strings "inf", "-inf" and "nan".  Keys keep insertion order,
so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    # keep floats recognizable as floats
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return "null" if obj is None else ("true" if obj else "false")
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating, mpmath.mpf)):
        return format_float(obj)
    if isinstance(obj, (complex, np.complexfloating, mpmath.mpc)):
        z = complex(obj)
        return _encode({"re": z.real, "im": z.imag}, indent, level)
    if isinstance(obj, Fraction):
        return _encode(f"{obj.numerator}/{obj.denominator}", indent, level)
    if isinstance(obj, enum.Enum):
        return _encode(obj.name, indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode(str(k), indent, level + 1)}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent=2):
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))


def write_csv(path, header, rows):
    """CSV with a fixed header; floats use the same 17-digit format."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def _cell(v):
    if isinstance(v, (float, np.floating)):
        s = format_float(v)
        return s.strip('"')
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return v
