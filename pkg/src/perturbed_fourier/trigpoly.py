"""Trigonometric polynomials ``q(x) = sum_{k=-n}^{n} c_k exp(i k x)``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import PerturbedGrid
from .nudft import ConvergenceError, NudftOperator, solve_inverse

__all__ = [
    "TrigPoly",
    "evaluate",
    "uniform_values",
    "interpolate",
    "l2_norm",
    "sup_norm",
    "sup_distance",
    "lagrange_eval",
    "truncated_fourier",
]

_BLOCK_ENTRIES = 1 << 20


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Coefficients ``c_{-n}, ..., c_n`` of the positive-exponent expansion."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size % 2 != 1:
            raise ValueError("a trigonometric polynomial has 2n+1 coefficients")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)

    def coefficient(self, k: int) -> complex:
        if abs(k) > self.degree:
            return 0j
        return complex(self.coeffs[k + self.degree])

    def __call__(self, points):
        return evaluate(self, points)

    def __sub__(self, other: TrigPoly) -> TrigPoly:
        n = max(self.degree, other.degree)
        return TrigPoly(_pad(self.coeffs, n) - _pad(other.coeffs, n))

    def __mul__(self, scalar) -> TrigPoly:
        return TrigPoly(self.coeffs * scalar)

    __rmul__ = __mul__


def _pad(c, n):
    d = (c.size - 1) // 2
    return np.pad(c, (n - d, n - d))


def evaluate(q: TrigPoly, points) -> np.ndarray:
    x = np.asarray(points, dtype=float)
    flat = x.ravel()
    k = q.modes.astype(float)
    out = np.empty(flat.size, dtype=complex)
    step = max(1, _BLOCK_ENTRIES // k.size)
    for s in range(0, flat.size, step):
        out[s:s + step] = np.exp(1j * np.outer(flat[s:s + step], k)) @ q.coeffs
    return out.reshape(x.shape)


def uniform_values(q: TrigPoly, M: int) -> np.ndarray:
    """Values at ``x_m = -pi + 2 pi m / M``, ``m = 0..M-1``, by one FFT (needs ``M >= 2n+1``)."""
    n = q.degree
    if M < 2 * n + 1:
        raise ValueError("M must be at least 2n+1")
    k = q.modes
    a = np.zeros(M, dtype=complex)
    a[k % M] = q.coeffs * np.where(k % 2 == 0, 1.0, -1.0)
    return M * np.fft.ifft(a)


def interpolate(grid: PerturbedGrid, samples, tol=1e-13, max_iter=1000, op=None) -> TrigPoly:
    """Degree-``N`` interpolant of ``samples`` at the grid nodes.

    Solves the square NUDFT system ``F c_hat = f`` by CG on the normal
    equations. Because ``F`` uses ``exp(-i x k)``, the polynomial coefficient
    of ``exp(i k x)`` is ``c_hat[-k]``: the solution vector is reversed here,
    and only here.
    """
    if op is None:
        op = NudftOperator(grid)
    f = np.asarray(samples)
    if f.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} samples, got shape {f.shape}")
    rep = solve_inverse(op, f, tol=tol, max_iter=max_iter)
    if not rep.converged:
        raise ConvergenceError(
            f"interpolation solve stalled at residual {rep.residual:.3e}", rep)
    return TrigPoly(rep.coefficients[::-1])


def l2_norm(q: TrigPoly) -> float:
    """Exact L2 norm on [-pi, pi) via Parseval."""
    return math.sqrt(2.0 * math.pi * float(np.sum(np.abs(q.coeffs) ** 2)))


def sup_norm(q: TrigPoly, oversample_factor: int = 16) -> float:
    """Max ``|q|`` over ``oversample_factor * (2n+1)`` equispaced points.

    This never exceeds the true sup norm; the gap shrinks as the sampling
    gets denser.
    """
    if oversample_factor < 4:
        raise ValueError("oversample_factor must be at least 4")
    M = int(oversample_factor) * (2 * q.degree + 1)
    return float(np.max(np.abs(uniform_values(q, M))))


def sup_distance(f, q: TrigPoly, points: int) -> float:
    """Max ``|f - q|`` over ``points`` equispaced samples of [-pi, pi)."""
    x = -np.pi + 2 * np.pi * np.arange(points) / points
    return float(np.max(np.abs(f(x) - uniform_values(q, points))))


def lagrange_eval(grid: PerturbedGrid, j: int, points) -> np.ndarray:
    """Trigonometric Lagrange basis function of node ``j`` (``-N <= j <= N``).

    ``l_j(x) = prod_{m != j} sin((x - x_m)/2) / sin((x_j - x_m)/2)``, accumulated
    as a sum of log-magnitudes with the sign tracked separately so that large
    ``N`` does not underflow.
    """
    N = grid.N
    if not -N <= j <= N:
        raise ValueError(f"index {j} outside [-{N}, {N}]")
    x = np.asarray(points, dtype=float)
    flat = x.ravel()
    nodes = grid.nodes
    xj = nodes[j + N]
    others = np.delete(nodes, j + N)
    den = np.sin((xj - others) / 2)
    log_den = np.sum(np.log(np.abs(den)))
    neg_den = np.count_nonzero(den < 0)
    out = np.empty(flat.size)
    step = max(1, _BLOCK_ENTRIES // max(others.size, 1))
    with np.errstate(divide="ignore"):
        for s in range(0, flat.size, step):
            num = np.sin((flat[s:s + step, None] - others[None, :]) / 2)
            log_mag = np.sum(np.log(np.abs(num)), axis=1) - log_den
            neg = np.count_nonzero(num < 0, axis=1) + neg_den
            out[s:s + step] = np.where(neg % 2 == 0, 1.0, -1.0) * np.exp(log_mag)
    return out.reshape(x.shape)


def truncated_fourier(f, n: int, dense_points: int | None = None) -> TrigPoly:
    """Degree-``n`` Fourier truncation of a periodic ``f``.

    Coefficients come from the ``M``-point trapezoidal rule,
    ``c_k = (1/M) sum_m f(2 pi m / M) exp(-i k 2 pi m / M)``; they carry an
    aliasing error of the size of the coefficient tail beyond ``M - n``.
    """
    M = 8 * (2 * n + 1) if dense_points is None else int(dense_points)
    if M < 8 * (2 * n + 1):
        raise ValueError("dense_points must be at least 8(2n+1)")
    x = 2 * np.pi * np.arange(M) / M
    fhat = np.fft.fft(np.asarray(f(x), dtype=complex)) / M
    k = np.arange(-n, n + 1)
    return TrigPoly(fhat[k % M])
