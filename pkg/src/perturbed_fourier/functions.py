"""Reference test functions with certified integrals and smoothness data."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "Analytic",
    "Differentiable",
    "TestFunction",
    "runge_trig",
    "exp_cos",
    "sigma_smooth",
    "get_function",
    "FUNCTIONS",
]


@dataclass(frozen=True)
class Analytic:
    """Analytic and periodic in the strip ``|Im z| < rho0``.

    ``M`` bounds ``|f|`` on the narrower strip ``|Im z| <= m_strip``.
    """

    M: float
    rho0: float
    m_strip: float


@dataclass(frozen=True)
class Differentiable:
    """``f^(sigma)`` has bounded variation ``V`` on one period."""

    sigma: int
    V: float


@dataclass(frozen=True, eq=False)
class TestFunction:
    name: str
    evaluator: object
    smoothness: Analytic | Differentiable
    exact_integral: complex | None = None
    integral_note: str = ""
    fourier: object = None  # optional callable k -> c_k

    __test__ = False  # keep pytest from collecting this class

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))


def _runge(x):
    return 1.0 / (1.25 - np.cos(x))


def runge_trig() -> TestFunction:
    """``f(x) = 1 / (1.25 - cos x) = (4/3) sum_k 2^{-|k|} e^{ikx}``.

    Poles at ``Im z = +-ln 2``; the integral is ``2 pi (4/3) = 8 pi / 3``.
    """
    rho0 = math.log(2.0)
    half = rho0 / 2
    return TestFunction(
        name="runge_trig",
        evaluator=_runge,
        smoothness=Analytic(M=1.0 / (1.25 - math.cosh(half)), rho0=rho0, m_strip=half),
        exact_integral=8.0 * math.pi / 3.0,
        integral_note="closed form: 2 pi / sqrt(1.25^2 - 1)",
        fourier=lambda k: (4.0 / 3.0) * 2.0 ** (-np.abs(np.asarray(k, dtype=float))),
    )


def _bessel_i0_series(z: float) -> float:
    # I_0(z) = sum_k (z^2/4)^k / (k!)^2; stop once terms fall below 1e-18
    t, total, k = 1.0, 1.0, 0
    q = z * z / 4.0
    while t > 1e-18 * total:
        k += 1
        t *= q / (k * k)
        total += t
    return total


def exp_cos() -> TestFunction:
    """``f(x) = exp(cos x)``, entire; ``int f = 2 pi I_0(1)``."""
    return TestFunction(
        name="exp_cos",
        evaluator=lambda x: np.exp(np.cos(x)),
        smoothness=Analytic(M=math.exp(math.cosh(1.0)), rho0=math.inf, m_strip=1.0),
        exact_integral=2.0 * math.pi * _bessel_i0_series(1.0),
        integral_note="power series of I_0(1) summed until terms < 1e-18 relative",
    )


SIGMA_SMOOTH_TERMS = 2000
_TV_POINTS = 1 << 20


@lru_cache(maxsize=None)
def _sigma_smooth_variation(sigma: int, K: int) -> float:
    # V = int |f^(sigma+1)| and f^(sigma+1)(x) = sum_k cos(kx + (sigma+1) pi / 2)
    k = np.arange(1, K + 1)
    coef = np.zeros(_TV_POINTS // 2 + 1, dtype=complex)
    coef[k] = np.exp(1j * (sigma + 1) * math.pi / 2)
    # irfft doubles every positive mode into 2 Re(...), hence the factor 1/2
    vals = np.fft.irfft(coef, n=_TV_POINTS) * (_TV_POINTS / 2)
    return 2.0 * math.pi * float(np.mean(np.abs(vals)))


def sigma_smooth(sigma: int, K: int = SIGMA_SMOOTH_TERMS) -> TestFunction:
    """``f(x) = sum_{k=1}^{K} k^{-(sigma+1)} cos(kx)``.

    Every mode has zero mean, so ``int f = 0`` exactly. ``V`` is the total
    variation of ``f^(sigma)``, i.e. ``int |f^(sigma+1)|``, evaluated from the
    coefficients on ``2^20`` equispaced points.
    """
    sigma = int(sigma)
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    k = np.arange(1, K + 1, dtype=float)
    a = k ** (-(sigma + 1.0))

    def f(x):
        flat = x.ravel()
        out = np.empty(flat.size)
        step = max(1, (1 << 20) // K)
        for s in range(0, flat.size, step):
            out[s:s + step] = np.cos(np.outer(flat[s:s + step], k)) @ a
        return out.reshape(x.shape)

    def fourier(m):
        m = np.abs(np.asarray(m))
        return np.where((m >= 1) & (m <= K), 0.5 * np.maximum(m, 1.0) ** (-(sigma + 1.0)), 0.0)

    return TestFunction(
        name=f"sigma_smooth_{sigma}",
        evaluator=f,
        smoothness=Differentiable(sigma=sigma, V=_sigma_smooth_variation(sigma, K)),
        exact_integral=0.0,
        integral_note="all modes k >= 1 integrate to zero",
        fourier=fourier,
    )


FUNCTIONS = {
    "runge_trig": runge_trig,
    "exp_cos": exp_cos,
    "sigma_smooth_1": lambda: sigma_smooth(1),
    "sigma_smooth_2": lambda: sigma_smooth(2),
}


def get_function(name: str) -> TestFunction:
    try:
        return FUNCTIONS[name]()
    except KeyError:
        raise ValueError(f"unknown test function {name!r}; choose from {sorted(FUNCTIONS)}") from None
