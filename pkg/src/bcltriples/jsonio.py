"""JSON encoding for matrices and reports.

Floats are always written with 17 significant digits so that a value
survives a write/read round trip bit for bit, and dictionaries keep
insertion order so identical inputs give identical bytes.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import MalformedMatrix
from .matcore import as_matrix


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite float {x!r}")
    return f"{x:.16e}"


def _encode(obj, indent, level) -> str:
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    sep = ","
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            pad + json.dumps(str(k), ensure_ascii=False) + ": " + _encode(v, indent, level + 1)
            for k, v in obj.items()
        ]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # short numeric pairs such as [re, im] stay on one line
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, None, 0) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[" + sep.join(items) + end + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int | None = 2) -> str:
    return _encode(obj, indent, 0) + ("\n" if indent is not None else "")


def matrix_to_json(M) -> dict:
    """``{"rows", "cols", "entries": [[re, im], ...]}`` in row-major order."""
    A = as_matrix(M)
    entries = [[float(z.real), float(z.imag)] for z in A.ravel()]
    return {"rows": int(A.shape[0]), "cols": int(A.shape[1]), "entries": entries}


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedMatrix(f"bad matrix object: {exc}") from exc
    if rows <= 0 or cols <= 0 or len(entries) != rows * cols:
        raise MalformedMatrix(f"expected {rows}x{cols} entries, got {len(entries)}")
    data = np.empty(rows * cols, dtype=np.complex128)
    for i, e in enumerate(entries):
        if isinstance(e, (int, float)):
            data[i] = float(e)
        else:
            re, im = e
            data[i] = complex(float(re), float(im))
    return as_matrix(data.reshape(rows, cols))
