"""Marcinkiewicz-Zygmund quantities on perturbed grids.

For ``r = 2`` the best constants ``A, B`` in

    A * int |q|^2  <=  1/(2N+1) * sum_j |q(x_j)|^2  <=  B * int |q|^2,   q in T_N,

follow from Parseval: ``int |q|^2 = 2 pi ||c||^2`` and the discrete mean is
``||F c||^2 / (2N+1)``, so ``A`` and ``B`` are the extreme squared singular
values of the NUDFT divided by ``2 pi (2N+1)``. Other exponents have no closed
form; :func:`empirical_mz_constants` estimates them by random search.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import bounds
from .grid import PerturbedGrid, make_alternating, make_random, make_uniform
from .nudft import DENSE_CAP, NudftOperator, extreme_singular_values
from .trigpoly import TrigPoly, evaluate, uniform_values

__all__ = [
    "FrameConstants",
    "EmpiricalMZ",
    "discrete_r_mean",
    "lr_norm",
    "frame_constants_exact",
    "frame_decay_experiment",
    "empirical_mz_constants",
    "MZ_COLUMNS",
]

MZ_COLUMNS = ("alpha", "N", "kind", "seed", "lower", "upper",
              "lower_bound_phi", "upper_bound_phi")


@dataclass(frozen=True)
class FrameConstants:
    lower: float
    upper: float
    grid: PerturbedGrid = field(repr=False, compare=False)

    def sandwich(self, q: TrigPoly, slack: float = 1e-10) -> bool:
        """Check ``lower * int|q|^2 <= mean |q(x_j)|^2 <= upper * int|q|^2``."""
        cont = 2.0 * math.pi * float(np.sum(np.abs(q.coeffs) ** 2))
        disc = discrete_r_mean(q, self.grid, 2)
        tol = slack * max(cont, 1.0)
        return self.lower * cont - tol <= disc <= self.upper * cont + tol


def _check_r(r):
    r = float(r)
    if not r >= 1:
        raise ValueError("r must be at least 1")
    return r


def discrete_r_mean(q: TrigPoly, grid: PerturbedGrid, r: float) -> float:
    """``1/(2N+1) * sum_j |q(x_j)|^r``."""
    r = _check_r(r)
    if q.degree > grid.N:
        raise ValueError("polynomial degree exceeds the grid half-width")
    return float(np.mean(np.abs(evaluate(q, grid.nodes)) ** r))


def lr_norm(q: TrigPoly, r: float, dense_points: int | None = None,
            return_error: bool = False):
    """``int_{-pi}^{pi} |q(x)|^r dx`` by the trapezoidal rule (no ``1/r`` root).

    For even integer ``r`` the integrand is itself a trigonometric polynomial
    and the rule is exact once ``dense_points > r * deg``. Otherwise
    ``|q|^r`` is merely continuous where ``q`` vanishes; with
    ``return_error=True`` a Richardson-type estimate (difference to the rule
    on twice as many points) is returned alongside.
    """
    r = _check_r(r)
    minimum = 32 * (q.degree + 1)
    M = minimum if dense_points is None else int(dense_points)
    if M < minimum:
        raise ValueError(f"dense_points must be at least 32*(deg+1) = {minimum}")

    def rule(m):
        return 2.0 * math.pi * float(np.mean(np.abs(uniform_values(q, m)) ** r))

    value = rule(M)
    if not return_error:
        return value
    return value, abs(rule(2 * M) - value)


def frame_constants_exact(grid: PerturbedGrid, op: NudftOperator | None = None,
                          method="auto", singular_values=None) -> FrameConstants:
    """Exact ``r = 2`` frame constants from the extreme singular values.

    ``singular_values=(smin, smax)`` of the square NUDFT of ``grid`` may be
    passed in when they are already known.
    """
    if singular_values is not None:
        smin, smax = singular_values
    else:
        if op is None:
            op = NudftOperator(grid, dense=grid.size <= DENSE_CAP)
        smin, smax = extreme_singular_values(op, method=method)
    scale = grid.size * 2.0 * math.pi
    return FrameConstants(smin**2 / scale, smax**2 / scale, grid)


def _phi_bounds(alpha):
    if alpha < 0.25:
        return bounds.mz_frame_bounds(alpha)
    return None, None


def frame_decay_experiment(alpha: float, N_list, n_random: int = 20,
                           seed0: int = 0, include_alternating: bool = True) -> list[dict]:
    """Worst (smallest lower constant) grid per ``N``.

    Candidates are the alternating grid (if ``alpha > 0`` and
    ``include_alternating``) and ``n_random`` random grids with seeds
    ``seed0, seed0 + 1, ...``. At ``alpha = 0`` only the uniform grid is used.
    Rows carry the :data:`MZ_COLUMNS` keys; the phi-bounds are None for
    ``alpha >= 1/4``.
    """
    lo_b, up_b = _phi_bounds(alpha)
    rows = []
    for N in N_list:
        if alpha == 0:
            cands = [(make_uniform(N), None)]
        else:
            cands = [(make_random(N, alpha, seed0 + s), seed0 + s) for s in range(n_random)]
            if include_alternating:
                cands.insert(0, (make_alternating(N, alpha), None))
        worst = None
        for grid, seed in cands:
            fc = frame_constants_exact(grid)
            if worst is None or fc.lower < worst[0].lower:
                worst = (fc, grid.kind, seed)
        fc, kind, seed = worst
        rows.append({
            "alpha": float(alpha), "N": int(N), "kind": kind, "seed": seed,
            "lower": fc.lower, "upper": fc.upper,
            "lower_bound_phi": lo_b, "upper_bound_phi": up_b,
        })
    return rows


class EmpiricalMZ(NamedTuple):
    """Observed range of ``mean |q(x_j)|^r / int |q|^r`` over random ``q``.

    These are estimates: the true constants are at least as extreme.
    """

    lower: float
    upper: float
    r: float
    trials: int


def empirical_mz_constants(grid: PerturbedGrid, r: float, trials: int = 10_000,
                           seed: int = 0, batch: int = 500) -> EmpiricalMZ:
    """Random search for the ``L^r`` MZ constants of ``grid`` (empirical only).

    Coefficient vectors are drawn uniformly from the complex unit sphere of
    ``T_N``; for each, the discrete ``r``-mean is divided by the trapezoidal
    ``int |q|^r`` on ``32 (N + 1)`` points.
    """
    r = _check_r(r)
    N = grid.N
    k = np.arange(-N, N + 1)
    rng = np.random.Generator(np.random.Philox(int(seed)))
    E = np.exp(1j * np.outer(grid.nodes, k))
    M = 32 * (N + 1)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    lo, hi = math.inf, -math.inf
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        C = rng.standard_normal((b, k.size)) + 1j * rng.standard_normal((b, k.size))
        C /= np.linalg.norm(C, axis=1, keepdims=True)
        disc = np.mean(np.abs(C @ E.T) ** r, axis=1)
        A = np.zeros((b, M), dtype=complex)
        A[:, k % M] = C * sign
        cont = 2.0 * math.pi * np.mean(np.abs(M * np.fft.ifft(A, axis=1)) ** r, axis=1)
        ratio = disc / cont
        lo, hi = min(lo, float(ratio.min())), max(hi, float(ratio.max()))
        done += b
    return EmpiricalMZ(lo, hi, r, int(trials))
