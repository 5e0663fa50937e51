"""Symbol files (schema ``opbmo-symbol/1``).

Layout::

    {"schema": "opbmo-symbol/1", "depth": d, "dim": n, "convention": "left-plus",
     "mean": M, "coeffs": [{"level": k, "pos": j, "matrix": M}, ...]}

M is an n x n array of ``[re, im]`` pairs. Missing coefficients are zero.
``convention`` records that h_I is positive on the left half of I.
Floats are written with ``repr`` precision, so a round trip is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dyadic import DyadicIndex, TreeConfig
from .symbol import HaarSymbol, as_haar

SCHEMA = "opbmo-symbol/1"
CONVENTION = "left-plus"


class SymbolParseError(ValueError):
    """Schema violation; ``pointer`` is a JSON pointer to the offending node."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


def _matrix_to_json(M: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _number(x, ptr: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SymbolParseError(ptr, f"expected a number, got {type(x).__name__}")
    return float(x)


def _int(doc: dict, key: str, ptr: str) -> int:
    if key not in doc:
        raise SymbolParseError(ptr, f"missing field {key!r}")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise SymbolParseError(f"{ptr}/{key}", "expected an integer")
    return v


def _matrix_from_json(obj, n: int, ptr: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != n:
        raise SymbolParseError(ptr, f"expected {n} rows")
    out = np.zeros((n, n), dtype=complex)
    for r, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != n:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise SymbolParseError(f"{ptr}/{r}", f"ragged matrix: expected {n} entries, got {got}")
        for c, z in enumerate(row):
            if not isinstance(z, list) or len(z) != 2:
                raise SymbolParseError(f"{ptr}/{r}/{c}", "expected a [re, im] pair")
            out[r, c] = complex(_number(z[0], f"{ptr}/{r}/{c}/0"), _number(z[1], f"{ptr}/{r}/{c}/1"))
    return out


def symbol_to_json(B) -> dict:
    H = as_haar(B)
    if H.kind != "operator":
        raise ValueError("symbol files hold operator-valued symbols")
    coeffs = [{"level": I.level, "pos": I.position, "matrix": _matrix_to_json(c)} for I, c in H.items()]
    return {"schema": SCHEMA, "depth": H.cfg.depth, "dim": H.cfg.dim, "convention": CONVENTION,
            "mean": _matrix_to_json(H.mean), "coeffs": coeffs}


def symbol_from_json(doc) -> HaarSymbol:
    if not isinstance(doc, dict):
        raise SymbolParseError("", "expected a JSON object")
    if doc.get("schema") != SCHEMA:
        raise SymbolParseError("/schema", f"expected {SCHEMA!r}")
    if doc.get("convention", CONVENTION) != CONVENTION:
        raise SymbolParseError("/convention", f"only {CONVENTION!r} is supported")
    d, n = _int(doc, "depth", ""), _int(doc, "dim", "")
    try:
        cfg = TreeConfig(d, n)
    except ValueError as e:
        raise SymbolParseError("/depth" if d < 1 else "/dim", str(e)) from None
    mean = _matrix_from_json(doc["mean"], n, "/mean") if "mean" in doc else np.zeros((n, n), complex)
    raw = doc.get("coeffs", [])
    if not isinstance(raw, list):
        raise SymbolParseError("/coeffs", "expected an array")
    coeffs = np.zeros((cfg.n_intervals, n, n), dtype=complex)
    seen = set()
    for i, entry in enumerate(raw):
        ptr = f"/coeffs/{i}"
        if not isinstance(entry, dict):
            raise SymbolParseError(ptr, "expected an object")
        k, j = _int(entry, "level", ptr), _int(entry, "pos", ptr)
        try:
            I = DyadicIndex(k, j)
        except ValueError as e:
            raise SymbolParseError(ptr, str(e)) from None
        if k >= d:
            raise SymbolParseError(f"{ptr}/level", f"level {k} has no coefficient at depth {d}")
        if I in seen:
            raise SymbolParseError(ptr, f"duplicate coefficient for {I}")
        seen.add(I)
        if "matrix" not in entry:
            raise SymbolParseError(ptr, "missing field 'matrix'")
        coeffs[I.bfs] = _matrix_from_json(entry["matrix"], n, f"{ptr}/matrix")
    return HaarSymbol(cfg, mean, coeffs)


def dumps_symbol(B) -> str:
    return json.dumps(symbol_to_json(B), indent=1) + "\n"


def loads_symbol(text: str) -> HaarSymbol:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SymbolParseError("", f"invalid JSON ({e.msg} at line {e.lineno})") from None
    return symbol_from_json(doc)


def save_symbol(B, path) -> None:
    Path(path).write_text(dumps_symbol(B), encoding="utf-8")


def load_symbol(path) -> HaarSymbol:
    return loads_symbol(Path(path).read_text(encoding="utf-8"))
