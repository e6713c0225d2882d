"""State files (UTF-8 JSON) and curve CSV output.

A state file is either

    {"kind": "cq", "x_dim": 2, "e_dim": 2, "probs": [...],
     "cond_states": [matrix, ...]}

or

    {"kind": "density", "dims": [dA, dE], "matrix": matrix}

where a matrix is a row-major nested list whose entries are [re, im] pairs.
Parsing is bit-exact for round trips (JSON floats are IEEE doubles both ways).
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .exponent import ExponentCurve
from .linalg import ValidationError
from .states import CQState, DensityOperator


def _parse_complex_matrix(obj, field: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ValidationError(f"field {field!r}: expected a non-empty nested list")
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise ValidationError(f"field {field!r}, row {i}: expected a list")
        entries = []
        for j, cell in enumerate(row):
            if not (isinstance(cell, list) and len(cell) == 2):
                raise ValidationError(f"field {field!r}, entry ({i},{j}): expected [re, im]")
            entries.append(complex(float(cell[0]), float(cell[1])))
        rows.append(entries)
    mat = np.array(rows, dtype=complex)
    if mat.shape[0] != mat.shape[1]:
        raise ValidationError(f"field {field!r}: matrix is not square, shape {mat.shape}")
    return mat


def _dump_complex_matrix(mat: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(mat, dtype=complex)]


def loads_state(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValidationError("state file must be an object with a 'kind' field")
    kind = doc["kind"]
    if kind == "cq":
        for field in ("x_dim", "e_dim", "probs", "cond_states"):
            if field not in doc:
                raise ValidationError(f"cq state file is missing field {field!r}")
        x_dim, e_dim = int(doc["x_dim"]), int(doc["e_dim"])
        probs = np.array([float(p) for p in doc["probs"]], dtype=float)
        if probs.size != x_dim:
            raise ValidationError(f"field 'probs': expected {x_dim} entries, got {probs.size}")
        conds = doc["cond_states"]
        if not isinstance(conds, list) or len(conds) != x_dim:
            raise ValidationError(f"field 'cond_states': expected {x_dim} matrices")
        cond = []
        for x, matdoc in enumerate(conds):
            mat = _parse_complex_matrix(matdoc, f"cond_states[{x}]")
            if mat.shape != (e_dim, e_dim):
                raise ValidationError(f"cond_states[{x}] has shape {mat.shape}, expected ({e_dim},{e_dim})")
            cond.append(DensityOperator(mat, (e_dim,)))
        return CQState(probs, tuple(cond))
    if kind == "density":
        for field in ("dims", "matrix"):
            if field not in doc:
                raise ValidationError(f"density state file is missing field {field!r}")
        dims = tuple(int(d) for d in doc["dims"])
        mat = _parse_complex_matrix(doc["matrix"], "matrix")
        return DensityOperator(mat, dims)
    raise ValidationError(f"unknown state kind {kind!r}")


def load_state(path):
    """Parse a state file into a CQState or DensityOperator.

    If the path does not exist but matches a bundled state name, the bundled
    file is used (``fig1.json`` ships with the package).
    """
    p = Path(path)
    if not p.exists():
        bundled = _bundled(p.name)
        if bundled is not None:
            return loads_state(bundled)
        raise ValidationError(f"state file not found: {path}")
    return loads_state(p.read_text(encoding="utf-8"))


def dumps_state(state) -> str:
    if isinstance(state, CQState):
        doc = {
            "kind": "cq",
            "x_dim": state.x_dim,
            "e_dim": state.e_dim,
            "probs": [float(p) for p in state.probs],
            "cond_states": [_dump_complex_matrix(c.mat) for c in state.cond],
        }
    elif isinstance(state, DensityOperator):
        doc = {"kind": "density", "dims": list(state.dims), "matrix": _dump_complex_matrix(state.mat)}
    else:
        raise ValidationError("can only serialize CQState or DensityOperator")
    return json.dumps(doc, indent=2) + "\n"


def save_state(state, path) -> None:
    Path(path).write_text(dumps_state(state), encoding="utf-8")


def _bundled(name: str) -> str | None:
    ref = resources.files("qrext").joinpath("data").joinpath(name)
    if ref.is_file():
        return ref.read_text(encoding="utf-8")
    return None


def fig1_state() -> CQState:
    """The bundled two-bit example state used throughout the docs and tests."""
    return loads_state(_bundled("fig1.json"))


def curve_csv(curve: ExponentCurve, log_scale: float = 1.0) -> str:
    """Render a curve as CSV with header R,E_pa,alpha_star and 9 significant digits.

    ``log_scale`` divides rates and values (pass ln 2 to report in bits).
    """
    lines = ["R,E_pa,alpha_star"]
    for r, v, a in zip(curve.rates, curve.values, curve.alpha_star):
        lines.append(f"{r / log_scale:.9g},{v / log_scale:.9g},{a:.9g}")
    return "\n".join(lines) + "\n"


def write_curve(curve: ExponentCurve, path, log_scale: float = 1.0) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(curve_csv(curve, log_scale))
