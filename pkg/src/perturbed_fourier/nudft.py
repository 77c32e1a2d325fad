"""NUDFT operator ``F[j, k] = exp(-i x_j k)`` with Krylov and spectral tools.

Rows run over the grid indices ``j = -N..N`` and columns over the modes
``k = -n..n``. The matrix is applied by direct summation; it is only held in
memory when the operator is built with ``dense=True`` or a dense routine is
asked for explicitly.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz
from scipy.sparse.linalg import ArpackError, LinearOperator, eigsh

from . import bounds
from .grid import PerturbedGrid, make_uniform

__all__ = [
    "DENSE_CAP",
    "ConvergenceError",
    "ConvergenceWarning",
    "NudftOperator",
    "SolveReport",
    "PowerResult",
    "cg",
    "cgnr",
    "power_iteration",
    "apply_forward",
    "apply_adjoint",
    "solve_inverse",
    "extreme_singular_values",
    "condition_number",
    "spectral_norm_diff",
    "BoundCheck",
    "BoundReport",
    "kadec_check",
]

# largest Gram dimension that is formed and eigen-decomposed densely
DENSE_CAP = 2049
_BLOCK_ENTRIES = 1 << 20


class ConvergenceError(RuntimeError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConvergenceWarning(UserWarning):
    pass


class NudftOperator:
    """Applyable (possibly rectangular) NUDFT matrix on a perturbed grid.

    Parameters
    ----------
    grid : PerturbedGrid
        Sampling nodes; one row per node.
    degree : int, optional
        Largest mode ``n``; defaults to ``grid.N`` (square operator).
    dense : bool
        Materialize and cache the matrix once. Faster for repeated products at
        moderate sizes.
    """

    def __init__(self, grid: PerturbedGrid, degree: int | None = None, dense: bool = False):
        n = grid.N if degree is None else int(degree)
        if n < 0:
            raise ValueError("degree must be nonnegative")
        self.grid = grid
        self.degree = n
        self.modes = np.arange(-n, n + 1, dtype=float)
        self._matrix = self._build() if dense else None

    @property
    def rows(self) -> int:
        return self.grid.size

    @property
    def cols(self) -> int:
        return 2 * self.degree + 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.degree == self.grid.N

    def _build(self, rows=slice(None)) -> np.ndarray:
        return np.exp(-1j * np.outer(self.grid.nodes[rows], self.modes))

    def todense(self) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix
        return self._build()

    def _row_blocks(self):
        step = max(1, _BLOCK_ENTRIES // self.cols)
        for start in range(0, self.rows, step):
            yield slice(start, min(start + step, self.rows))

    def apply_forward(self, coeffs) -> np.ndarray:
        """``f_j = sum_k c_k exp(-i x_j k)``."""
        c = np.asarray(coeffs, dtype=complex)
        if c.shape != (self.cols,):
            raise ValueError(f"expected {self.cols} coefficients, got shape {c.shape}")
        if self._matrix is not None:
            return self._matrix @ c
        out = np.empty(self.rows, dtype=complex)
        for blk in self._row_blocks():
            out[blk] = self._build(blk) @ c
        return out

    def apply_adjoint(self, samples) -> np.ndarray:
        """``c_k = sum_j exp(+i x_j k) f_j``."""
        f = np.asarray(samples, dtype=complex)
        if f.shape != (self.rows,):
            raise ValueError(f"expected {self.rows} samples, got shape {f.shape}")
        if self._matrix is not None:
            return self._matrix.conj().T @ f
        out = np.zeros(self.cols, dtype=complex)
        for blk in self._row_blocks():
            out += self._build(blk).conj().T @ f[blk]
        return out

    def apply_gram(self, coeffs) -> np.ndarray:
        return self.apply_adjoint(self.apply_forward(coeffs))

    def gram(self) -> np.ndarray:
        """Dense ``F^H F`` of size ``cols x cols``.

        The entry ``(k, l)`` is ``m_{k-l}`` with ``m_d = sum_j exp(i x_j d)``, so
        the matrix is Toeplitz and is assembled from ``4n + 1`` moments.
        """
        if self.cols > DENSE_CAP:
            raise ValueError(f"Gram dimension {self.cols} exceeds dense cap {DENSE_CAP}")
        n = self.degree
        d = np.arange(0, 2 * n + 1, dtype=float)
        m = np.zeros(d.size, dtype=complex)
        step = max(1, _BLOCK_ENTRIES // d.size)
        x = self.grid.nodes
        for s in range(0, x.size, step):
            m += np.exp(1j * np.outer(x[s:s + step], d)).sum(axis=0)
        # m holds m_0..m_{2n}; m_{-d} = conj(m_d)
        return toeplitz(m, m.conj())

    def as_linear_operator(self) -> LinearOperator:
        return LinearOperator(self.shape, matvec=self.apply_forward,
                              rmatvec=self.apply_adjoint, dtype=complex)

    def __repr__(self):
        return f"NudftOperator(N={self.grid.N}, degree={self.degree}, alpha={self.grid.alpha:g})"


def apply_forward(op: NudftOperator, coeffs) -> np.ndarray:
    return op.apply_forward(coeffs)


def apply_adjoint(op: NudftOperator, samples) -> np.ndarray:
    return op.apply_adjoint(samples)


@dataclass
class SolveReport:
    coefficients: np.ndarray = field(repr=False)
    iterations: int
    residual: float
    converged: bool


def cg(matvec, b, tol=1e-10, max_iter=1000) -> SolveReport:
    """Conjugate gradients for a Hermitian positive definite operator.

    Stops when the relative residual ``||b - A x|| / ||b||`` drops below
    ``tol``; the recursively updated residual is confirmed against the true
    one before returning.
    """
    b = np.asarray(b, dtype=complex)
    nb = np.linalg.norm(b)
    x = np.zeros_like(b)
    if nb == 0:
        return SolveReport(x, 0, 0.0, True)
    r = b.copy()
    p = r.copy()
    rr = np.vdot(r, r).real
    it = 0
    while it < max_iter:
        it += 1
        Ap = matvec(p)
        a = rr / np.vdot(p, Ap).real
        x += a * p
        r -= a * Ap
        rr_new = np.vdot(r, r).real
        if math.sqrt(rr_new) <= tol * nb:
            r = b - matvec(x)
            rr_new = np.vdot(r, r).real
            if math.sqrt(rr_new) <= tol * nb:
                return SolveReport(x, it, math.sqrt(rr_new) / nb, True)
            p = r.copy()
            rr = rr_new
            continue
        p = r + (rr_new / rr) * p
        rr = rr_new
    res = np.linalg.norm(b - matvec(x)) / nb
    return SolveReport(x, it, float(res), bool(res <= tol))


def cgnr(op, b, tol=1e-10, max_iter=1000, criterion="residual") -> SolveReport:
    """CG on the normal equations ``A^H A x = A^H b``.

    ``criterion="residual"`` stops on ``||b - A x|| / ||b||`` (consistent
    systems); ``"gradient"`` stops on ``||A^H (b - A x)|| / ||A^H b||``
    (least squares). ``op`` needs ``apply_forward`` and ``apply_adjoint``.
    """
    if criterion not in ("residual", "gradient"):
        raise ValueError("criterion must be 'residual' or 'gradient'")
    b = np.asarray(b, dtype=complex)
    x = np.zeros(op.cols, dtype=complex)
    r = b.copy()
    z = op.apply_adjoint(r)
    nb = np.linalg.norm(b) if criterion == "residual" else np.linalg.norm(z)
    if nb == 0:
        return SolveReport(x, 0, 0.0, True)

    def measure(r, z):
        return np.linalg.norm(r if criterion == "residual" else z) / nb

    p = z.copy()
    zz = np.vdot(z, z).real
    it = 0
    while it < max_iter:
        it += 1
        w = op.apply_forward(p)
        a = zz / np.vdot(w, w).real
        x += a * p
        r -= a * w
        z = op.apply_adjoint(r)
        if measure(r, z) <= tol:
            r = b - op.apply_forward(x)
            z = op.apply_adjoint(r)
            if measure(r, z) <= tol:
                return SolveReport(x, it, float(measure(r, z)), True)
            p = z.copy()
            zz = np.vdot(z, z).real
            continue
        zz_new = np.vdot(z, z).real
        p = z + (zz_new / zz) * p
        zz = zz_new
    r = b - op.apply_forward(x)
    res = float(measure(r, op.apply_adjoint(r)))
    return SolveReport(x, it, res, res <= tol)


@dataclass
class PowerResult:
    value: float
    iterations: int
    converged: bool


def power_iteration(matvec, dim, seed=0, tol=1e-10, max_iter=5000) -> PowerResult:
    """Largest eigenvalue of a Hermitian positive semidefinite operator.

    Starts from a seeded complex Gaussian vector; converged once successive
    Rayleigh quotients agree to ``tol`` relatively.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    x /= np.linalg.norm(x)
    lam_old = None
    for it in range(1, max_iter + 1):
        y = matvec(x)
        lam = np.vdot(x, y).real
        ny = np.linalg.norm(y)
        if ny == 0:
            return PowerResult(0.0, it, True)
        if lam_old is not None and abs(lam - lam_old) <= tol * abs(lam):
            return PowerResult(float(lam), it, True)
        lam_old = lam
        x = y / ny
    return PowerResult(float(lam), max_iter, False)


def solve_inverse(op: NudftOperator, samples, tol=1e-10, max_iter=1000) -> SolveReport:
    """Coefficients ``c`` with ``F c = f`` via CG on the normal equations.

    Returns a report with ``converged=False`` (and the best iterate) if
    ``max_iter`` is exhausted.
    """
    if not op.is_square:
        raise ValueError("solve_inverse needs a square operator (degree == N)")
    f = np.asarray(samples, dtype=complex)
    if f.shape != (op.rows,):
        raise ValueError(f"expected {op.rows} samples, got shape {f.shape}")
    return cgnr(op, f, tol=tol, max_iter=max_iter, criterion="residual")


def extreme_singular_values(op: NudftOperator, method="auto", seed=0) -> tuple[float, float]:
    """Smallest and largest singular values of the operator.

    ``method="dense"`` eigen-decomposes the Gram matrix (exact up to rounding);
    ``"iterative"`` runs power iteration on the Gram operator for the top value
    and inverse iteration, each step a CG solve, for the bottom one. ``"auto"``
    picks dense whenever the Gram dimension is within :data:`DENSE_CAP`.
    """
    if method not in ("auto", "dense", "iterative"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "dense" if op.cols <= DENSE_CAP else "iterative"
    if method == "dense":
        if op.cols > DENSE_CAP:
            raise ValueError(f"Gram dimension {op.cols} exceeds dense cap {DENSE_CAP}")
        ev = np.linalg.eigvalsh(op.gram())
        ev = np.clip(ev, 0.0, None)
        return math.sqrt(ev[0]), math.sqrt(ev[-1])

    top = power_iteration(op.apply_gram, op.cols, seed=seed)
    if not top.converged:
        warnings.warn("power iteration did not converge", ConvergenceWarning)

    def inv(x):
        rep = cg(op.apply_gram, x, tol=1e-13, max_iter=10 * op.cols)
        return rep.coefficients

    bottom = power_iteration(inv, op.cols, seed=seed + 1)
    if not bottom.converged:
        warnings.warn("inverse iteration did not converge", ConvergenceWarning)
    return 1.0 / math.sqrt(bottom.value), math.sqrt(top.value)


def condition_number(op: NudftOperator, method="auto") -> float:
    smin, smax = extreme_singular_values(op, method=method)
    return smax / smin


def spectral_norm_diff(grid: PerturbedGrid, op: NudftOperator | None = None, seed=0,
                       tol=1e-10, max_iter=5000, method="lanczos") -> float:
    """``||F - F_tilde||_2`` between the uniform and perturbed square NUDFTs.

    The top eigenvalue of ``(F - F_tilde)^H (F - F_tilde)`` is found by
    implicitly restarted Lanczos (``method="lanczos"``, accurate to rounding)
    or by plain power iteration (``method="power"``, stopping at relative
    change ``tol``). Pass a dense ``op`` for ``grid`` to reuse its cached
    matrix.
    """
    if method not in ("lanczos", "power"):
        raise ValueError(f"unknown method {method!r}")
    if op is None:
        op = NudftOperator(grid)
    if not op.is_square:
        raise ValueError("spectral_norm_diff needs the square operator")
    if not np.any(grid.deltas):
        return 0.0
    if op._matrix is not None:
        D = NudftOperator(make_uniform(grid.N), dense=True).todense() - op._matrix

        def gram(c):
            return D.conj().T @ (D @ c)
    else:
        uni = NudftOperator(make_uniform(grid.N))

        def gram(c):
            d = uni.apply_forward(c) - op.apply_forward(c)
            return uni.apply_adjoint(d) - op.apply_adjoint(d)

    n = op.cols
    if method == "lanczos" and n > 2:
        v0 = np.random.Generator(np.random.Philox(int(seed))).standard_normal(n) + 0j
        L = LinearOperator((n, n), matvec=gram, dtype=complex)
        try:
            top = eigsh(L, k=1, which="LA", v0=v0, tol=1e-14, maxiter=max_iter,
                        return_eigenvectors=False)[0]
            return math.sqrt(max(float(top), 0.0))
        except ArpackError:  # Krylov breakdown on (near) rank-deficient differences
            pass
    res = power_iteration(gram, n, seed=seed, tol=tol, max_iter=max_iter)
    if not res.converged:
        warnings.warn(f"power iteration for ||F - F~|| stopped after {res.iterations} steps",
                      ConvergenceWarning)
    return math.sqrt(max(res.value, 0.0))


@dataclass
class BoundCheck:
    name: str
    measured: float
    bound: float | None
    relation: str  # "<=" or ">="
    slack: float = 0.0

    @property
    def passed(self) -> bool | None:
        if self.bound is None:
            return None
        if self.relation == "<=":
            return bool(self.measured <= self.bound + self.slack)
        return bool(self.measured >= self.bound - self.slack)


@dataclass
class BoundReport:
    """Measured quantities of one grid paired with their analytic bounds."""

    alpha: float
    N: int
    checks: list[BoundCheck]

    @property
    def applicable(self) -> bool:
        return all(c.bound is not None for c in self.checks)

    @property
    def passed(self) -> bool | None:
        if not self.applicable:
            return None
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> BoundCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self) -> dict:
        out = {"alpha": self.alpha, "N": self.N}
        for c in self.checks:
            out[c.name] = c.measured
            out[c.name + "_bound"] = c.bound
        out["passed"] = self.passed
        return out


def kadec_check(grid: PerturbedGrid, op: NudftOperator | None = None, seed=0,
                singular_values=None) -> BoundReport:
    """Compare the perturbed NUDFT against the ``phi(alpha)`` bounds.

    Checks ``||F - F~|| / ||F|| <= phi``, ``sigma_min / sqrt(2N+1) >= 1 - phi``,
    ``sigma_max / sqrt(2N+1) <= 1 + phi``, ``kappa <= (1+phi)/(1-phi)`` and the
    2-norm Lebesgue constant ``sqrt(2N+1) / sigma_min <= 1 / (1 - phi)``. For
    ``alpha >= 1/4`` the bounds are left as None. Known ``(smin, smax)`` can be
    passed as ``singular_values``.
    """
    if op is None:
        op = NudftOperator(grid, dense=grid.size <= DENSE_CAP)
    scale = math.sqrt(grid.size)
    diff = spectral_norm_diff(grid, op=op, seed=seed)
    smin, smax = singular_values if singular_values is not None else extreme_singular_values(op)
    if grid.alpha < 0.25:
        p = bounds.phi(grid.alpha)
        b = [p, 1 - p, 1 + p, (1 + p) / (1 - p), 1 / (1 - p)]
    else:
        b = [None] * 5
    checks = [
        BoundCheck("diff_ratio", diff / scale, b[0], "<=", 1e-8),
        BoundCheck("sigma_min_ratio", smin / scale, b[1], ">=", 1e-8),
        BoundCheck("sigma_max_ratio", smax / scale, b[2], "<=", 1e-8),
        BoundCheck("kappa", smax / smin, b[3], "<=", 1e-6),
        BoundCheck("lebesgue", scale / smin, b[4], "<=", 1e-6),
    ]
    return BoundReport(alpha=grid.alpha, N=grid.N, checks=checks)
