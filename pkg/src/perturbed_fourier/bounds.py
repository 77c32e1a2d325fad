"""Closed-form bounds for perturbed grids.

All functions are pure scalar maps. ``phi(alpha) = 1 - cos(pi alpha) + sin(pi alpha)``
controls every bound that is valid for ``alpha < 1/4``; the negative-weight
helpers (``g_function`` and friends) are valid on ``(0, 1/2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

__all__ = [
    "EULER_GAMMA",
    "phi",
    "kadec_condition_bound",
    "weight_abs_sum_bound",
    "mz_frame_bounds",
    "interp_bound_factor",
    "mz_threshold",
    "neg_weight_upper_threshold",
    "harmonic_number",
    "log_g_function",
    "g_function",
    "neg_weight_lower_bound",
    "corollary_L",
    "neg_weight_lower_bound_corollary",
    "NegWeightBounds",
    "neg_weight_bounds",
]

EULER_GAMMA = 0.57721566490153286061

# harmonic numbers are summed directly up to here, asymptotically beyond
HARMONIC_DIRECT_MAX = 10**6
_SCAN_CHUNK = 1 << 20
_SCAN_MAX_N = 10**9


def _check_alpha(alpha, upper=0.5, lower_open=False):
    alpha = float(alpha)
    lo_ok = alpha > 0 if lower_open else alpha >= 0
    if not (lo_ok and alpha < upper):
        lo = "(0" if lower_open else "[0"
        raise ValueError(f"alpha must lie in {lo}, {upper:g}), got {alpha!r}")
    return alpha


def phi(alpha: float) -> float:
    alpha = _check_alpha(alpha)
    return 1.0 - math.cos(math.pi * alpha) + math.sin(math.pi * alpha)


def _one_minus_phi(alpha: float) -> float:
    return math.cos(math.pi * alpha) - math.sin(math.pi * alpha)


def kadec_condition_bound(alpha: float) -> float:
    """Upper bound ``(1 + phi) / (1 - phi)`` on the square NUDFT condition number."""
    alpha = _check_alpha(alpha, 0.25)
    p = phi(alpha)
    return (1.0 + p) / _one_minus_phi(alpha)


def weight_abs_sum_bound(alpha: float) -> float:
    """Bound ``2 pi / (cos(pi alpha) - sin(pi alpha))`` on the sum of ``|w_j|``."""
    alpha = _check_alpha(alpha, 0.25)
    return 2.0 * math.pi / _one_minus_phi(alpha)


def mz_frame_bounds(alpha: float) -> tuple[float, float]:
    """Lower and upper r=2 frame constants ``(1 -+ phi)^2 / (2 pi)``."""
    alpha = _check_alpha(alpha, 0.25)
    p = phi(alpha)
    return (1.0 - p) ** 2 / (2.0 * math.pi), (1.0 + p) ** 2 / (2.0 * math.pi)


def interp_bound_factor(alpha: float, N: int) -> float:
    """Factor relating the interpolation error to the best sup-norm error."""
    alpha = _check_alpha(alpha, 0.25)
    if N < 0:
        raise ValueError("N must be nonnegative")
    return 1.0 + math.sqrt(2 * N + 1) / _one_minus_phi(alpha)


def mz_threshold(r: float) -> float:
    """Perturbation size ``min(1/(2r), (r-1)/(2r))`` above which L^r MZ inequalities can fail."""
    r = float(r)
    if not (1.0 <= r < math.inf):
        raise ValueError("r must lie in [1, inf)")
    return min(1.0 / (2.0 * r), (r - 1.0) / (2.0 * r))


def neg_weight_upper_threshold(alpha: float) -> float:
    """``exp(pi/(4 alpha) + 1/2)``: even ``N`` at or above it force a negative
    central weight on the alternating grid."""
    alpha = _check_alpha(alpha, lower_open=True)
    return math.exp(math.pi / (4.0 * alpha) + 0.5)


def harmonic_number(N: int) -> float:
    """``H_N = sum_{d=1}^N 1/d``; direct summation up to 10^6, asymptotic series beyond."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if N == 0:
        return 0.0
    if N <= HARMONIC_DIRECT_MAX:
        return math.fsum(1.0 / np.arange(1, N + 1, dtype=float))
    n = float(N)
    return math.log(n) + EULER_GAMMA + 1.0 / (2 * n) - 1.0 / (12 * n * n) + 1.0 / (120 * n**4)


def _log_factors(m: np.ndarray, alpha: float) -> np.ndarray:
    # log[(m + a)^2 / ((m - 2a) m)] without cancellation for large m
    return 2.0 * np.log1p(alpha / m) - np.log1p(-2.0 * alpha / m)


def log_g_function(N: int, alpha: float) -> float:
    if N < 1:
        raise ValueError("N must be a positive integer")
    alpha = _check_alpha(alpha)
    m = np.arange(1, N + 1, dtype=float)
    return math.fsum(_log_factors(m, alpha)) + math.log(harmonic_number(N))


def g_function(N: int, alpha: float) -> float:
    """``prod_{m<=N} (m+alpha)^2 / ((m-2 alpha) m)`` times the harmonic number ``H_N``.

    Accumulated in log space; overflows to ``inf`` only when the true value does.
    """
    return math.exp(log_g_function(N, alpha))


def _lgamma_log_g(N: float, alpha: float) -> float:
    # coarse closed form via the Gamma-function identity for the product; only
    # used to reject hopeless searches early
    lp = (math.lgamma(1 - 2 * alpha) + 2 * math.lgamma(N + 1 + alpha)
          - math.lgamma(N + 1 - 2 * alpha) - math.lgamma(N + 1) - 2 * math.lgamma(1 + alpha))
    return lp + math.log(math.log(N) + EULER_GAMMA + 1 / (2 * N))


def neg_weight_lower_bound(alpha: float, max_N: int = _SCAN_MAX_N) -> int:
    """Largest ``N`` with ``g(N) <= 1/(pi alpha)``.

    Every exact quadrature rule at ``alpha``-perturbed nodes with half-width at
    most this value has nonnegative weights. ``g`` is increasing in ``N``, so
    the answer is found by a single chunked scan of prefix sums of the
    log-factors and harmonic terms. Returns 0 when already ``g(1)`` exceeds the
    threshold.
    """
    alpha = _check_alpha(alpha, lower_open=True)
    target = -math.log(math.pi * alpha)
    if log_g_function(1, alpha) > target:
        return 0
    if _lgamma_log_g(float(max_N), alpha) < target - 1e-6:
        raise ValueError(f"lower bound exceeds max_N={max_N}; alpha too small to scan")
    log_prod = 0.0
    harm = 0.0
    start = 1
    while start <= max_N:
        stop = min(start + _SCAN_CHUNK, max_N + 1)
        m = np.arange(start, stop, dtype=float)
        lp = log_prod + np.cumsum(_log_factors(m, alpha))
        hs = harm + np.cumsum(1.0 / m)
        exceeded = np.nonzero(lp + np.log(hs) > target)[0]
        if exceeded.size:
            return int(start + exceeded[0] - 1)
        log_prod, harm = float(lp[-1]), float(hs[-1])
        start = stop
    raise ValueError(f"lower bound exceeds max_N={max_N}")


def corollary_L(alpha: float) -> float | None:
    """Root ``L`` of ``(alpha + L) e^{4L} = Gamma(1+alpha)^2 / (pi Gamma(1-2 alpha))``.

    The left side is increasing in ``L``, so the root is unique; None if it is
    not positive.
    """
    alpha = _check_alpha(alpha, 0.15, lower_open=True)
    rhs = math.gamma(1.0 + alpha) ** 2 / (math.pi * math.gamma(1.0 - 2.0 * alpha))
    if alpha >= rhs:
        return None
    return bisect(lambda L: (alpha + L) * math.exp(4.0 * L) - rhs, 0.0, 2.0, xtol=1e-14)


def _corollary_lhs(N: int, alpha: float) -> float:
    return math.log(N + 1 + alpha) + 1.0 / (2 * N - 1)


def neg_weight_lower_bound_corollary(alpha: float) -> int:
    """Closed-form lower bound for ``alpha < 0.15``.

    Largest ``N >= 1`` with ``log(N+1+alpha) + 1/(2N-1) <= (1 - gamma) + L/alpha``
    where ``L`` comes from :func:`corollary_L`; 0 if no such ``N``.
    """
    L = corollary_L(alpha)
    if L is None:
        return 0
    level = (1.0 - EULER_GAMMA) + L / alpha
    # the left side increases for N >= 2 but N = 1 sits above N = 2
    if _corollary_lhs(2, alpha) > level:
        return 1 if _corollary_lhs(1, alpha) <= level else 0
    N = max(2, int(math.exp(level) - 1 - alpha))
    while _corollary_lhs(N + 1, alpha) <= level:
        N += 1
    while N > 2 and _corollary_lhs(N, alpha) > level:
        N -= 1
    return N


@dataclass(frozen=True)
class NegWeightBounds:
    alpha: float
    lower_bound_N: int
    lower_bound_N_corollary: int | None
    upper_threshold_N: float


def neg_weight_bounds(alpha: float) -> NegWeightBounds:
    """Bracket for the smallest half-width admitting a negative weight."""
    cor = neg_weight_lower_bound_corollary(alpha) if 0 < alpha < 0.15 else None
    return NegWeightBounds(
        alpha=float(alpha),
        lower_bound_N=neg_weight_lower_bound(alpha),
        lower_bound_N_corollary=cor,
        upper_threshold_N=neg_weight_upper_threshold(alpha),
    )
