"""Perturbed equispaced node sets on [-pi, pi).

A grid of half-width ``N`` has ``2N + 1`` nodes ``x_j = (j + delta_j) h`` for
``j = -N, ..., N`` with ``h = 2 pi / (2N + 1)`` and ``|delta_j| <= alpha``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PerturbedGrid",
    "GridReport",
    "make_uniform",
    "make_random",
    "make_alternating",
    "validate",
]

KINDS = ("uniform", "random", "alternating", "explicit")


def _spacing(N: int) -> float:
    return 2.0 * np.pi / (2 * N + 1)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PerturbedGrid:
    """Immutable set of ``alpha``-perturbed nodes.

    Build instances through :func:`make_uniform`, :func:`make_random`,
    :func:`make_alternating` or :meth:`from_deltas`; the nodes are computed
    once from the deltas and then stored.
    """

    N: int
    alpha: float
    deltas: np.ndarray
    nodes: np.ndarray = field(repr=False)
    kind: str = "explicit"
    seed: int | None = None

    @classmethod
    def from_deltas(cls, deltas, alpha, *, kind="explicit", seed=None, check=True):
        """Build a grid from its perturbations ``delta_{-N}, ..., delta_N``.

        With ``check=False`` the budget and ordering checks are skipped, which
        allows constructing deliberately invalid grids for :func:`validate`.
        """
        deltas = np.asarray(deltas, dtype=float).ravel()
        if deltas.size % 2 != 1:
            raise ValueError("a grid needs an odd number (2N+1) of nodes")
        if kind not in KINDS:
            raise ValueError(f"unknown grid kind {kind!r}")
        N = (deltas.size - 1) // 2
        j = np.arange(-N, N + 1)
        nodes = (j + deltas) * _spacing(N)
        grid = cls(N=N, alpha=float(alpha), deltas=_readonly(deltas),
                   nodes=_readonly(nodes), kind=kind, seed=seed)
        if check:
            report = validate(grid)
            if not report.valid:
                raise ValueError(f"invalid perturbed grid: {report.reason}")
        return grid

    @classmethod
    def from_nodes(cls, nodes, alpha=None):
        """Recover the perturbations of a sorted node vector.

        If ``alpha`` is None the budget is taken as ``max |delta_j|``.
        Recovered perturbations that exceed ``alpha`` only by rounding
        (a few ulps of ``N``) are clipped back onto the budget.
        """
        nodes = np.asarray(nodes, dtype=float).ravel()
        if nodes.size % 2 != 1:
            raise ValueError("a grid needs an odd number (2N+1) of nodes")
        N = (nodes.size - 1) // 2
        deltas = nodes / _spacing(N) - np.arange(-N, N + 1)
        if alpha is None:
            alpha = float(np.max(np.abs(deltas))) if deltas.size else 0.0
        else:
            alpha = float(alpha)
            slack = 8 * np.finfo(float).eps * (N + 1)
            if 0 <= alpha < 0.5 and np.all(np.abs(deltas) <= alpha + slack):
                deltas = np.clip(deltas, -alpha, alpha)
        return cls.from_deltas(deltas, alpha)

    @property
    def h(self) -> float:
        return _spacing(self.N)

    @property
    def size(self) -> int:
        return 2 * self.N + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def checksum(self) -> str:
        """SHA-256 of the little-endian float64 node bytes."""
        return hashlib.sha256(self.nodes.astype("<f8").tobytes()).hexdigest()

    def __len__(self) -> int:
        return self.size


@dataclass(frozen=True)
class GridReport:
    max_abs_delta: float
    within_budget: bool
    budget_ok: bool
    cyclic_order: bool

    @property
    def valid(self) -> bool:
        return self.within_budget and self.budget_ok and self.cyclic_order

    @property
    def reason(self) -> str:
        if self.valid:
            return "ok"
        parts = []
        if not self.budget_ok:
            parts.append("alpha must lie in [0, 1/2)")
        if not self.within_budget:
            parts.append(f"max |delta| = {self.max_abs_delta:g} exceeds alpha")
        if not self.cyclic_order:
            parts.append("nodes are not strictly increasing cyclically")
        return "; ".join(parts)


def validate(grid: PerturbedGrid) -> GridReport:
    """Report the perturbation size, budget compliance and node ordering."""
    max_abs = float(np.max(np.abs(grid.deltas))) if grid.deltas.size else 0.0
    x = grid.nodes
    ordered = bool(np.all(np.diff(x) > 0))
    if x.size > 1:
        ordered = ordered and bool(x[-1] < x[0] + 2.0 * np.pi)
    return GridReport(
        max_abs_delta=max_abs,
        within_budget=max_abs <= grid.alpha,
        budget_ok=0.0 <= grid.alpha < 0.5,
        cyclic_order=ordered,
    )


def _check_N(N, minimum=0):
    if int(N) != N or N < minimum:
        raise ValueError(f"N must be an integer >= {minimum}, got {N!r}")
    return int(N)


def make_uniform(N: int) -> PerturbedGrid:
    """Equispaced nodes ``j h``."""
    N = _check_N(N)
    return PerturbedGrid.from_deltas(np.zeros(2 * N + 1), 0.0, kind="uniform")


def make_random(N: int, alpha: float, seed: int) -> PerturbedGrid:
    """Perturbations drawn i.i.d. uniformly on ``[-alpha, alpha]``.

    The stream comes from numpy's counter-based Philox bit generator keyed by
    ``seed``; the draws are stored on the grid, so saved grids stay
    reproducible even if the generator changes.
    """
    N = _check_N(N)
    if not 0.0 <= alpha < 0.5:
        raise ValueError("alpha must lie in [0, 1/2); nodes could coalesce otherwise")
    rng = np.random.Generator(np.random.Philox(int(seed)))
    deltas = rng.uniform(-alpha, alpha, size=2 * N + 1) if alpha > 0 else np.zeros(2 * N + 1)
    return PerturbedGrid.from_deltas(deltas, alpha, kind="random", seed=int(seed))


def alternating_deltas(N: int, alpha: float) -> np.ndarray:
    j = np.arange(-N, N + 1)
    even = j % 2 == 0
    # negative side: even -> -alpha, odd -> +alpha; positive side is the mirror
    d = np.where(j < 0, np.where(even, -alpha, alpha), np.where(even, alpha, -alpha))
    d[N] = 0.0
    return d


def make_alternating(N: int, alpha: float) -> PerturbedGrid:
    """Maximal perturbations of alternating sign, odd-symmetric about 0.

    Node ``j`` moves by ``-alpha h`` when ``j`` is odd and positive or even and
    negative, by ``+alpha h`` otherwise, and node 0 stays put.
    """
    N = _check_N(N, minimum=1)
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    return PerturbedGrid.from_deltas(alternating_deltas(N, alpha), alpha, kind="alternating")
