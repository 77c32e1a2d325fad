"""File formats: grids, polynomials and rules as JSON; sweep tables as CSV.

Floats are written with 17 significant digits so every double round-trips
exactly. A grid file stores the perturbations and the SHA-256 of the node
bytes, which is re-checked on load.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .grid import PerturbedGrid
from .quadrature import QuadratureRule
from .trigpoly import TrigPoly

__all__ = [
    "format_float",
    "grid_to_dict",
    "grid_from_dict",
    "save_grid",
    "load_grid",
    "save_poly",
    "load_poly",
    "save_rule",
    "load_rule",
    "write_csv",
    "read_csv",
]


def format_float(x) -> str:
    """``%.17g`` text of a float; None becomes an empty field."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "%.17g" % x
    return str(x)


def _num(x: str) -> float:
    return float(x)


def grid_to_dict(grid: PerturbedGrid) -> dict:
    return {
        "N": grid.N,
        "alpha": grid.alpha,
        "kind": grid.kind,
        "seed": grid.seed,
        "deltas": [format_float(d) for d in grid.deltas],
        "nodes_sha256": grid.checksum(),
    }


def grid_from_dict(d: dict, verify: bool = True) -> PerturbedGrid:
    deltas = np.array([_num(v) for v in d["deltas"]])
    if deltas.size != 2 * int(d["N"]) + 1:
        raise ValueError("grid file: length of deltas does not match N")
    grid = PerturbedGrid.from_deltas(deltas, float(d["alpha"]), kind=d.get("kind", "explicit"),
                                     seed=d.get("seed"))
    if verify and "nodes_sha256" in d and grid.checksum() != d["nodes_sha256"]:
        raise ValueError("grid file: node checksum mismatch")
    return grid


def _dump(obj, path):
    Path(path).write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8", newline="\n")


def save_grid(grid: PerturbedGrid, path) -> None:
    _dump(grid_to_dict(grid), path)


def load_grid(path) -> PerturbedGrid:
    return grid_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_poly(q: TrigPoly, path) -> None:
    _dump({"degree": q.degree,
           "coeffs": [[format_float(c.real), format_float(c.imag)] for c in q.coeffs]}, path)


def load_poly(path) -> TrigPoly:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    c = np.array([_num(re) + 1j * _num(im) for re, im in d["coeffs"]])
    if c.size != 2 * int(d["degree"]) + 1:
        raise ValueError("poly file: coefficient count does not match degree")
    return TrigPoly(c)


def save_rule(rule: QuadratureRule, path, grid_path=None) -> None:
    """Write weights plus the grid, inline or as a path to a grid file."""
    grid = str(grid_path) if grid_path is not None else grid_to_dict(rule.grid)
    _dump({"grid": grid, "exactness_degree": rule.exactness_degree,
           "weights": [format_float(w) for w in rule.weights]}, path)


def load_rule(path) -> QuadratureRule:
    path = Path(path)
    d = json.loads(path.read_text(encoding="utf-8"))
    ref = d["grid"]
    if isinstance(ref, str):
        gp = Path(ref)
        grid = load_grid(gp if gp.is_absolute() else path.parent / gp)
    else:
        grid = grid_from_dict(ref)
    w = np.array([_num(v) for v in d["weights"]])
    return QuadratureRule(grid, w, int(d.get("exactness_degree", grid.N)))


def write_csv(path, columns, rows) -> None:
    """Header plus rows, comma separated with LF line endings.

    Rows are written in the order given; callers sort them by key.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_float(row.get(c)) for c in columns])


def read_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
