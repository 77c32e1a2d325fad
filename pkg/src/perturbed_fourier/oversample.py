"""Oversampled regime: degree ``n < N`` on ``2N + 1`` perturbed nodes.

The rectangular NUDFT ``F`` (``(2N+1) x (2n+1)``) is tall, so the fit to
samples is a least-squares problem and the exactness conditions for a
quadrature rule are underdetermined.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .functions import runge_trig
from .grid import PerturbedGrid, make_alternating, make_random, make_uniform
from .nudft import ConvergenceError, NudftOperator, cgnr, condition_number
from .quadrature import QuadratureRule, exact_weights, stability_measures
from .trigpoly import TrigPoly, evaluate

__all__ = [
    "OversampleConfig",
    "degree_for",
    "lsq_fit",
    "lsq_residual",
    "rect_condition",
    "minnorm_weights",
    "oversample_sweep",
    "nonneg_oversampling_experiment",
    "OVERSAMPLE_COLUMNS",
]

OVERSAMPLE_COLUMNS = ("alpha", "epsilon", "N", "n", "kappa", "lsq_residual",
                      "min_weight", "abs_sum")


def degree_for(epsilon: float, N: int) -> int:
    """``floor((1 - epsilon) N)`` evaluated on the decimal value of ``epsilon``.

    Going through :class:`fractions.Fraction` of the shortest repr avoids
    ``0.9 * 10 = 8.999...`` style off-by-one floors.
    """
    eps = Fraction(repr(float(epsilon)))
    return math.floor((1 - eps) * int(N))


@dataclass(frozen=True)
class OversampleConfig:
    epsilon: float
    N: int
    n: int = field(init=False)

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        object.__setattr__(self, "n", degree_for(self.epsilon, self.N))


def _check_degree(grid, n):
    n = int(n)
    if not 0 <= n <= grid.N:
        raise ValueError(f"degree n={n} must lie in [0, N={grid.N}]")
    return n


def lsq_fit(grid: PerturbedGrid, samples, n: int, tol=1e-10, max_iter=None,
            op: NudftOperator | None = None) -> TrigPoly:
    """Least-squares trigonometric polynomial of degree ``n`` through ``samples``.

    CG on the normal equations until ``||F^H r|| <= tol ||F^H f||``. As in
    :func:`~perturbed_fourier.trigpoly.interpolate`, the solution of the
    ``exp(-i x k)`` system is index-reversed so the result reads
    ``sum_k c_k exp(i k x)``.
    """
    n = _check_degree(grid, n)
    f = np.asarray(samples)
    if f.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} samples, got shape {f.shape}")
    if op is None or op.degree != n:
        op = NudftOperator(grid, n)
    rep = cgnr(op, f, tol=tol, max_iter=max_iter or 10 * op.cols + 100, criterion="gradient")
    if not rep.converged:
        raise ConvergenceError(f"least-squares solve stalled at {rep.residual:.3e}", rep)
    return TrigPoly(rep.coefficients[::-1])


def lsq_residual(grid: PerturbedGrid, samples, q: TrigPoly) -> float:
    """Relative residual ``||f - q(x)|| / ||f||`` at the nodes."""
    f = np.asarray(samples)
    nf = np.linalg.norm(f)
    r = np.linalg.norm(f - evaluate(q, grid.nodes))
    return float(r / nf) if nf else float(r)


def rect_condition(grid: PerturbedGrid, n: int, method="auto") -> float:
    """2-norm condition number of the ``(2N+1) x (2n+1)`` NUDFT."""
    n = _check_degree(grid, n)
    return condition_number(NudftOperator(grid, n), method=method)


def minnorm_weights(grid: PerturbedGrid, n: int, method="auto", tol=1e-12) -> QuadratureRule:
    """Minimum 2-norm weights exact on trigonometric polynomials of degree ``n``."""
    n = _check_degree(grid, n)
    return exact_weights(grid, n, method=method, tol=tol)


def _record(grid, alpha, epsilon, n, f):
    rule = minnorm_weights(grid, n)
    st = stability_measures(rule)
    samples = f(grid.nodes)
    q = lsq_fit(grid, samples, n)
    return {
        "alpha": float(alpha), "epsilon": float(epsilon), "N": grid.N, "n": n,
        "kappa": rect_condition(grid, n),
        "lsq_residual": lsq_residual(grid, samples, q),
        "min_weight": st.min_weight, "abs_sum": st.abs_sum,
    }


def oversample_sweep(alpha: float, epsilon: float, N_list, seeds=(0,), function=None) -> list[dict]:
    """Conditioning, fit residual and min-norm weights on random grids.

    One row per ``(N, seed)`` with :data:`OVERSAMPLE_COLUMNS` plus ``seed``;
    the residual is that of the least-squares fit to ``function``
    (default ``runge_trig``).
    """
    f = function or runge_trig()
    rows = []
    for N in N_list:
        n = degree_for(epsilon, N)
        for s in seeds:
            grid = make_random(N, alpha, s) if alpha > 0 else make_uniform(N)
            row = _record(grid, alpha, epsilon, n, f)
            row["seed"] = int(s)
            rows.append(row)
    return rows


def nonneg_oversampling_experiment(alpha: float, N_list, function=None) -> list[dict]:
    """Min-norm weights on alternating grids at ``n = floor(N/pi)`` and ``floor(0.95 N)``.

    Two rows per ``N``. The first uses ``epsilon = 1 - 1/pi`` and the second
    ``epsilon = 0.05``. The rows record the minimum weight of the
    minimum-norm rule; a negative value is an observation, not a failure,
    since nonnegative exact rules at ``n <= N/pi`` need not be the
    minimum-norm ones. ``alpha = 0`` uses the uniform grid.
    """
    if not 0 <= alpha < 0.5:
        raise ValueError("alpha must lie in [0, 1/2)")
    f = function or runge_trig()
    rows = []
    for N in N_list:
        grid = make_alternating(N, alpha) if alpha > 0 else make_uniform(N)
        for eps, n in ((1 - 1 / math.pi, math.floor(N / math.pi)),
                       (0.05, degree_for(0.05, N))):
            rows.append(_record(grid, alpha, eps, n, f))
    return rows
