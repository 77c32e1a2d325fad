"""Exact quadrature rules on perturbed grids.

The weights of the rule exact on degree ``n`` trigonometric polynomials solve
``F^T w = 2 pi e_0`` with ``F`` the ``(2N+1) x (2n+1)`` NUDFT matrix. Since the
nodes are real, ``F^T w = b`` with real ``b`` is the same as
``F^H conj(w) = b``; the Krylov path therefore solves ``(F^H F) y = b`` with CG
and sets ``w = conj(F y)``, which is also the minimum-norm solution when
``n < N``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import bounds
from .grid import PerturbedGrid, make_alternating
from .nudft import DENSE_CAP, ConvergenceError, NudftOperator, cg
from .trigpoly import lagrange_eval

__all__ = [
    "QuadratureRule",
    "StabilityMeasures",
    "LemmaReport",
    "exact_weights",
    "compute_weights",
    "integrate",
    "exactness_check",
    "stability_measures",
    "central_weight",
    "central_weight_scan",
    "negative_weight_search",
    "w0_trapezoid_identity_check",
    "lemma_a_check",
]


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    grid: PerturbedGrid
    weights: np.ndarray
    exactness_degree: int

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (self.grid.size,):
            raise ValueError("one weight per node is required")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __call__(self, f):
        return integrate(self, f)


class StabilityMeasures(NamedTuple):
    abs_sum: float
    min_weight: float
    n_negative: int


def exact_weights(grid: PerturbedGrid, degree: int | None = None, method="auto",
                  tol=1e-12, max_iter=None, op=None) -> QuadratureRule:
    """Minimum-norm weights exact on trigonometric polynomials of ``degree``.

    ``method="dense"`` uses a direct solve (least squares when ``degree < N``),
    ``"krylov"`` the CG route described in the module docstring; ``"auto"``
    goes dense within :data:`~perturbed_fourier.nudft.DENSE_CAP` nodes.
    """
    n = grid.N if degree is None else int(degree)
    if not 0 <= n <= grid.N:
        raise ValueError("degree must lie in [0, N]")
    if op is None or op.degree != n:
        op = NudftOperator(grid, n)
    if method == "auto":
        method = "dense" if grid.size <= DENSE_CAP else "krylov"
    b = np.zeros(op.cols)
    b[n] = 2.0 * np.pi
    if method == "dense":
        M = op.todense()
        if n == grid.N:
            w = np.linalg.solve(M.T, b)
        else:
            w = np.linalg.lstsq(M.T, b, rcond=None)[0]
    elif method == "krylov":
        rep = cg(op.apply_gram, b, tol=tol, max_iter=max_iter or 10 * op.cols)
        if not rep.converged:
            raise ConvergenceError(f"weight solve stalled at residual {rep.residual:.3e}", rep)
        w = np.conj(op.apply_forward(rep.coefficients))
    else:
        raise ValueError(f"unknown method {method!r}")
    scale = np.linalg.norm(w)
    if np.max(np.abs(w.imag)) > 1e-9 * scale:
        raise RuntimeError("quadrature weights came out with a non-negligible imaginary part")
    return QuadratureRule(grid, w.real, n)


def compute_weights(grid: PerturbedGrid, method="auto", tol=1e-12, op=None) -> QuadratureRule:
    """The unique rule on ``grid`` exact for degree ``N``."""
    return exact_weights(grid, None, method=method, tol=tol, op=op)


def integrate(rule: QuadratureRule, samples) -> complex:
    """``sum_j w_j f_j``; ``samples`` may also be a callable evaluated at the nodes."""
    f = samples(rule.grid.nodes) if callable(samples) else np.asarray(samples)
    if f.shape != rule.weights.shape:
        raise ValueError(f"expected {rule.weights.size} samples, got shape {f.shape}")
    return complex(rule.weights @ f)


def exactness_check(rule: QuadratureRule, degree: int | None = None) -> float:
    """Max over ``|k| <= degree`` of ``|sum_j w_j exp(i k x_j) - 2 pi [k = 0]|``."""
    n = rule.exactness_degree if degree is None else int(degree)
    moments = NudftOperator(rule.grid, n).apply_adjoint(rule.weights)
    moments[n] -= 2.0 * np.pi
    return float(np.max(np.abs(moments)))


def stability_measures(rule: QuadratureRule) -> StabilityMeasures:
    w = rule.weights
    return StabilityMeasures(float(np.sum(np.abs(w))), float(np.min(w)),
                             int(np.count_nonzero(w < 0)))


def central_weight(N: int, alpha: float, method="auto", tol=1e-12) -> float:
    """Weight of node 0 on the alternating grid of half-width ``N``."""
    rule = compute_weights(make_alternating(N, alpha), method=method, tol=tol)
    return float(rule.weights[N])


def central_weight_scan(alpha: float, N_max: int, tol=1e-12, skip_certified=True,
                        method="auto"):
    """Yield ``(N, w0)`` over the even candidates of :func:`negative_weight_search`.

    Stops after the first ``N`` whose central weight is below the detection
    threshold ``-10 * tol * 2 pi``.
    """
    if not 0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    start = bounds.neg_weight_lower_bound(alpha) + 1 if skip_certified else 2
    start = max(2, start + (start % 2))
    threshold = -10.0 * tol * 2.0 * math.pi
    for N in range(start, int(N_max) + 1, 2):
        w0 = central_weight(N, alpha, method=method, tol=tol)
        yield N, w0
        if w0 < threshold:
            return


def negative_weight_search(alpha: float, N_max: int, tol=1e-12, skip_certified=True,
                           method="auto") -> int | None:
    """Smallest even ``N <= N_max`` whose alternating grid has a negative central weight.

    A weight counts as negative below ``-10 * tol * 2 pi``. With
    ``skip_certified`` the scan starts just above
    :func:`~perturbed_fourier.bounds.neg_weight_lower_bound`, below which no
    rule at ``alpha``-perturbed nodes can have a negative weight. Any hit is
    checked against that bound and a contradiction raises ``RuntimeError``.
    """
    threshold = -10.0 * tol * 2.0 * math.pi
    for N, w0 in central_weight_scan(alpha, N_max, tol, skip_certified, method):
        if w0 < threshold:
            lower = bounds.neg_weight_lower_bound(alpha)
            if N <= lower:
                raise RuntimeError(
                    f"negative weight at N={N} contradicts the certified bound {lower}")
            return N
    return None


def w0_trapezoid_identity_check(grid: PerturbedGrid) -> tuple[float, float]:
    """Central weight computed two ways.

    Directly from the weight system, and as the equispaced trapezoidal sum
    ``2 pi / (2N+1) * sum_j l_0(j h)`` of the central Lagrange basis function.
    """
    N = grid.N
    direct = float(compute_weights(grid).weights[N])
    l0 = lagrange_eval(grid, 0, grid.indices * grid.h)
    return direct, float(2.0 * np.pi / grid.size * math.fsum(l0))


@dataclass(frozen=True)
class LemmaReport:
    N: int
    alpha: float
    sign_ok: bool
    magnitude_ok: bool
    max_value: float
    min_margin: float

    @property
    def passed(self) -> bool:
        return self.sign_ok and self.magnitude_ok


def lemma_a_check(N: int, alpha: float, slack: float = 1e-10) -> LemmaReport:
    """Sign and size of the central Lagrange function at equispaced points.

    On the alternating grid with even ``N``, for every ``k != 0``:
    ``l_0(k h) <= 0`` and ``|l_0(k h)| >= sin(alpha h / 2) / sin((|k| + alpha) h / 2)``.
    """
    if N < 2 or N % 2:
        raise ValueError("N must be a positive even integer")
    grid = make_alternating(N, alpha)
    h = grid.h
    k = grid.indices[grid.indices != 0]
    vals = lagrange_eval(grid, 0, k * h)
    lower = np.sin(alpha * h / 2) / np.sin((np.abs(k) + alpha) * h / 2)
    margin = np.abs(vals) - lower
    return LemmaReport(
        N=N,
        alpha=alpha,
        sign_ok=bool(np.all(vals <= slack)),
        magnitude_ok=bool(np.all(margin >= -slack)),
        max_value=float(np.max(vals)),
        min_margin=float(np.min(margin)),
    )


