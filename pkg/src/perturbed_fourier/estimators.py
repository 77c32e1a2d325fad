"""scikit-learn style wrappers around interpolation and least-squares fitting.

``X`` holds sample locations (a 1-D array or a single-column 2-D array of
nodes in ``[-pi, pi)``), ``y`` the values. Complex ``y`` is supported, which
is why the input checks here are hand-written instead of ``check_array``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .grid import PerturbedGrid
from .oversample import degree_for, lsq_fit
from .trigpoly import evaluate, interpolate

__all__ = ["check_nodes", "check_samples", "TrigInterpolator", "TrigLeastSquares"]


def check_nodes(X) -> np.ndarray:
    """Return ``X`` as a finite 1-D float array (accepts shape ``(m, 1)``)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single feature column, got shape {X.shape}")
        X = X[:, 0]
    if X.ndim != 1:
        raise ValueError(f"expected 1-D nodes, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("nodes must be finite")
    return X


def check_samples(y, m: int) -> np.ndarray:
    y = np.asarray(y)
    if not (np.issubdtype(y.dtype, np.number)):
        raise ValueError("samples must be numeric")
    y = y.astype(complex if np.iscomplexobj(y) else float).ravel()
    if y.size != m:
        raise ValueError(f"expected {m} samples, got {y.size}")
    if not np.all(np.isfinite(y)):
        raise ValueError("samples must be finite")
    return y


class _TrigBase(RegressorMixin, BaseEstimator):
    def _grid(self, X, y):
        X = check_nodes(X)
        y = check_samples(y, X.size)
        order = np.argsort(X, kind="stable")
        grid = PerturbedGrid.from_nodes(X[order], self.alpha)
        return grid, y[order]

    def predict(self, X):
        check_is_fitted(self, "poly_")
        vals = evaluate(self.poly_, check_nodes(X))
        return vals if self.complex_ else vals.real

    def _fitted(self, grid, y, poly):
        self.grid_ = grid
        self.poly_ = poly
        self.complex_ = np.iscomplexobj(y)
        self.n_features_in_ = 1
        return self


class TrigInterpolator(_TrigBase):
    """Degree-``N`` trigonometric interpolation at ``2N + 1`` perturbed nodes.

    Parameters
    ----------
    alpha : float, optional
        Perturbation budget of the nodes; inferred as ``max |delta_j|`` if None.
    tol : float
        Relative residual tolerance of the CG solve.

    Attributes
    ----------
    grid_ : PerturbedGrid
    poly_ : TrigPoly
    """

    def __init__(self, alpha=None, tol=1e-13, max_iter=1000):
        self.alpha = alpha
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        grid, y = self._grid(X, y)
        return self._fitted(grid, y, interpolate(grid, y, tol=self.tol, max_iter=self.max_iter))


class TrigLeastSquares(_TrigBase):
    """Least-squares trigonometric polynomial of degree ``n <= N``.

    ``n`` is ``degree`` when given, else ``floor((1 - epsilon) N)``.
    """

    def __init__(self, degree=None, epsilon=0.1, alpha=None, tol=1e-10):
        self.degree = degree
        self.epsilon = epsilon
        self.alpha = alpha
        self.tol = tol

    def fit(self, X, y):
        grid, y = self._grid(X, y)
        n = self.degree if self.degree is not None else degree_for(self.epsilon, grid.N)
        self.degree_ = int(n)
        return self._fitted(grid, y, lsq_fit(grid, y, self.degree_, tol=self.tol))
