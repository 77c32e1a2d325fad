import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from conftest import random_coeffs
from perturbed_fourier.functions import runge_trig
from perturbed_fourier.grid import make_random, make_uniform
from perturbed_fourier.nudft import NudftOperator
from perturbed_fourier.oversample import (OVERSAMPLE_COLUMNS, OversampleConfig, degree_for,
                                          lsq_fit, lsq_residual, minnorm_weights,
                                          nonneg_oversampling_experiment, oversample_sweep,
                                          rect_condition)
from perturbed_fourier.quadrature import compute_weights, exactness_check
from perturbed_fourier.trigpoly import TrigPoly, evaluate, interpolate, sup_distance


def test_degree_floor_is_exact():
    assert degree_for(0.1, 10) == 9
    assert degree_for(0.9, 10) == 1  # 0.1 * 10 in binary floating point is 0.999...
    assert degree_for(0.3, 1024) == 716
    cfg = OversampleConfig(0.1, 64)
    assert cfg.n == 57 and cfg.n <= cfg.N
    with pytest.raises(ValueError):
        OversampleConfig(0.0, 10)


@given(st.floats(0.01, 1.0), st.integers(0, 5000))
def test_degree_matches_floor(eps, N):
    n = degree_for(eps, N)
    assert 0 <= n <= N
    assert n <= (1 - eps) * N + 1e-9 < n + 1


def test_square_case_equals_interpolation(rng):
    g = make_random(20, 0.3, 1)
    f = rng.standard_normal(41)
    assert_allclose(lsq_fit(g, f, 20).coeffs, interpolate(g, f).coeffs, atol=1e-9)


@given(st.integers(2, 40), st.floats(0, 0.45), st.floats(0.05, 0.9), st.integers(0, 10**6))
def test_exact_recovery_of_low_degree(N, alpha, eps, seed):
    rng = np.random.default_rng(seed)
    n = degree_for(eps, N)
    c = random_coeffs(rng, n)
    g = make_random(N, alpha, seed)
    f = evaluate(TrigPoly(c), g.nodes)
    q = lsq_fit(g, f, n)
    assert lsq_residual(g, f, q) <= 1e-9
    assert_allclose(q.coeffs, c, atol=1e-8 * np.abs(c).max())


def test_runge_fit_decays_geometrically():
    f = runge_trig()
    errs, ns = [], []
    for N in (20, 40, 60):
        g = make_random(N, 0.35, N)
        n = degree_for(0.1, N)
        # a tight solve: with the default 1e-10 gradient tolerance the error
        # stalls near 1e-9, long before the approximation error does
        errs.append(sup_distance(f, lsq_fit(g, f(g.nodes), n, tol=1e-13), 4000))
        ns.append(n)
    assert errs[0] > errs[1] > errs[2]
    # about -ln 2 per degree until rounding (~1e-13) takes over at n = 54
    assert np.log(errs[1] / errs[0]) / (ns[1] - ns[0]) < -0.6
    assert np.polyfit(ns, np.log(errs), 1)[0] < -0.4


def test_residual_monotone_and_orthogonal(rng):
    g = make_random(30, 0.3, 4)
    f = runge_trig()(g.nodes) + 0.1 * rng.standard_normal(61)
    prev = math.inf
    for n in range(0, 31, 3):
        q = lsq_fit(g, f, n, tol=1e-12)
        res = lsq_residual(g, f, q)
        assert res <= prev + 1e-10
        prev = res
        r = f - evaluate(q, g.nodes)
        grad = NudftOperator(g, n).apply_adjoint(r)
        assert np.linalg.norm(grad) <= 1e-8 * np.linalg.norm(f)


def test_lsq_errors():
    g = make_uniform(4)
    with pytest.raises(ValueError):
        lsq_fit(g, np.ones(9), 5)
    with pytest.raises(ValueError):
        lsq_fit(g, np.ones(8), 2)


def test_rect_condition_trivial_cases():
    assert rect_condition(make_uniform(10), 10) == pytest.approx(1.0, abs=1e-12)
    assert rect_condition(make_uniform(10), 4) == pytest.approx(1.0, abs=1e-12)
    assert rect_condition(make_random(10, 0.4, 0), 0) == pytest.approx(1.0, abs=1e-12)


def test_rect_condition_iterative_matches_dense():
    g = make_random(40, 0.3, 0)
    assert rect_condition(g, 36, "iterative") == pytest.approx(rect_condition(g, 36), rel=1e-6)


@pytest.mark.parametrize("n", [0, 3, 10])
def test_minnorm_uniform_is_trapezoidal(n):
    rule = minnorm_weights(make_uniform(10), n)
    assert_allclose(rule.weights, 2 * math.pi / 21, rtol=1e-13)


def test_minnorm_oversampled():
    g = make_random(64, 0.3, 0)
    n = degree_for(0.1, 64)
    rule = minnorm_weights(g, n)
    assert rule.exactness_degree == n
    assert rule.weights.sum() == pytest.approx(2 * math.pi, rel=1e-12)
    assert exactness_check(rule) <= 1e-8
    assert exactness_check(rule, n + 1) > 1e-6
    k = minnorm_weights(g, n, method="krylov")
    assert_allclose(k.weights, rule.weights, atol=1e-9)
    # minimum norm: adding any null-space direction only increases the norm
    M = np.exp(1j * np.outer(np.arange(-n, n + 1), g.nodes))
    ref = np.linalg.pinv(M) @ np.where(np.arange(-n, n + 1) == 0, 2 * math.pi, 0)
    assert_allclose(rule.weights, ref.real, atol=1e-10)


def test_minnorm_square_is_compute_weights():
    g = make_random(25, 0.35, 2)
    assert_allclose(minnorm_weights(g, 25).weights, compute_weights(g).weights, atol=1e-8)


def test_nonneg_experiment_rows():
    rows = nonneg_oversampling_experiment(0.4, [32, 64])
    assert len(rows) == 4
    assert [r["n"] for r in rows] == [10, 30, 20, 60]
    for r in rows:
        assert set(OVERSAMPLE_COLUMNS) <= set(r)
    assert rows[0]["min_weight"] > 0  # observed for n = N / pi; not guaranteed in general
    zero = nonneg_oversampling_experiment(0.0, [16])
    for r in zero:
        assert r["min_weight"] == pytest.approx(2 * math.pi / 33)


def test_oversample_sweep_rows():
    rows = oversample_sweep(0.3, 0.1, [16, 32], seeds=[0, 1])
    assert len(rows) == 4
    assert {r["seed"] for r in rows} == {0, 1}
    assert all(r["kappa"] >= 1 for r in rows)
