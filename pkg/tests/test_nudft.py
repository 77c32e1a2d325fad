import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from conftest import random_coeffs
from perturbed_fourier import bounds, nudft
from perturbed_fourier.grid import make_alternating, make_random, make_uniform
from perturbed_fourier.nudft import (NudftOperator, cg, cgnr, condition_number,
                                     extreme_singular_values, kadec_check, power_iteration,
                                     solve_inverse, spectral_norm_diff)


def reference_matrix(grid, n):
    # straight from the definition, entry by entry
    return np.array([[np.exp(-1j * x * k) for k in range(-n, n + 1)] for x in grid.nodes])


@pytest.mark.parametrize("n", [None, 0, 3])
def test_dense_matrix_matches_definition(n):
    g = make_random(6, 0.3, 2)
    op = NudftOperator(g, n)
    assert_allclose(op.todense(), reference_matrix(g, op.degree), atol=1e-14)
    assert op.shape == (13, op.cols)
    assert op.is_square == (n is None)


@given(st.integers(0, 30), st.floats(0, 0.45), st.integers(0, 1000))
def test_adjoint_identity(N, alpha, seed):
    g = make_random(N, alpha, seed)
    op = NudftOperator(g)
    rng = np.random.default_rng(seed)
    c = random_coeffs(rng, N)
    f = rng.standard_normal(g.size) + 1j * rng.standard_normal(g.size)
    lhs = np.vdot(f, op.apply_forward(c))
    rhs = np.vdot(op.apply_adjoint(f), c)
    assert abs(lhs - rhs) <= 1e-10 * (1 + abs(lhs))


def test_blocked_application_matches_dense(monkeypatch, rng):
    g = make_random(40, 0.2, 1)
    dense = NudftOperator(g, dense=True)
    monkeypatch.setattr(nudft, "_BLOCK_ENTRIES", 100)
    lazy = NudftOperator(g)
    c = random_coeffs(rng, 40)
    f = rng.standard_normal(81) + 0j
    assert_allclose(lazy.apply_forward(c), dense.apply_forward(c), atol=1e-12)
    assert_allclose(lazy.apply_adjoint(f), dense.apply_adjoint(f), atol=1e-12)
    assert_allclose(lazy.gram(), dense.todense().conj().T @ dense.todense(), atol=1e-11)


def test_module_level_apply_helpers(rng):
    op = NudftOperator(make_random(5, 0.1, 0))
    c = random_coeffs(rng, 5)
    assert_allclose(nudft.apply_forward(op, c), op.apply_forward(c))
    assert_allclose(nudft.apply_adjoint(op, c), op.apply_adjoint(c))


def test_shape_errors():
    op = NudftOperator(make_uniform(3))
    with pytest.raises(ValueError):
        op.apply_forward(np.zeros(5))
    with pytest.raises(ValueError):
        op.apply_adjoint(np.zeros(6))
    with pytest.raises(ValueError):
        NudftOperator(make_uniform(3), -1)


@pytest.mark.parametrize("n", [8, 3])
def test_gram_is_toeplitz_product(n):
    g = make_random(8, 0.35, 5)
    op = NudftOperator(g, n)
    M = reference_matrix(g, n)
    assert_allclose(op.gram(), M.conj().T @ M, atol=1e-12)


def test_uniform_grid_is_orthogonal():
    op = NudftOperator(make_uniform(7))
    assert_allclose(op.gram(), 15 * np.eye(15), atol=1e-12)
    assert condition_number(op) == pytest.approx(1.0, abs=1e-12)
    assert spectral_norm_diff(make_uniform(7)) == 0.0


def test_cg_against_direct_solve(rng):
    A = rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20))
    H = A.conj().T @ A + 20 * np.eye(20)
    b = rng.standard_normal(20) + 0j
    rep = cg(lambda x: H @ x, b, tol=1e-13, max_iter=200)
    assert rep.converged
    assert_allclose(rep.coefficients, np.linalg.solve(H, b), rtol=1e-10)


def test_cg_zero_rhs():
    rep = cg(lambda x: x, np.zeros(3))
    assert rep.converged and rep.iterations == 0


def test_cgnr_least_squares_against_lstsq(rng):
    g = make_random(30, 0.3, 3)
    op = NudftOperator(g, 20)
    f = rng.standard_normal(61) + 1j * rng.standard_normal(61)
    rep = cgnr(op, f, tol=1e-12, max_iter=500, criterion="gradient")
    assert rep.converged
    ref = np.linalg.lstsq(op.todense(), f, rcond=None)[0]
    assert_allclose(rep.coefficients, ref, atol=1e-9)


def test_cgnr_rejects_unknown_criterion():
    with pytest.raises(ValueError):
        cgnr(NudftOperator(make_uniform(2)), np.ones(5), criterion="energy")


def test_solve_inverse_recovers_coefficients(rng):
    g = make_random(50, 0.2, 9)
    op = NudftOperator(g)
    c = random_coeffs(rng, 50)
    rep = solve_inverse(op, op.apply_forward(c), tol=1e-12)
    assert rep.converged and rep.iterations < 60
    assert_allclose(rep.coefficients, c, atol=1e-9)


def test_solve_inverse_reports_non_convergence(rng):
    op = NudftOperator(make_alternating(40, 0.45))
    rep = solve_inverse(op, random_coeffs(rng, 40), max_iter=2)
    assert not rep.converged and rep.iterations == 2


def test_solve_inverse_needs_square():
    op = NudftOperator(make_uniform(4), 2)
    with pytest.raises(ValueError):
        solve_inverse(op, np.ones(9))


def test_power_iteration_on_diagonal():
    d = np.array([1.0, 3.0, 7.0, 2.0])
    res = power_iteration(lambda x: d * x, 4)
    assert res.converged
    assert res.value == pytest.approx(7.0, rel=1e-9)


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.45])
def test_singular_values_three_ways(alpha):
    g = make_random(20, alpha, 4)
    op = NudftOperator(g)
    s = sla.svdvals(reference_matrix(g, 20))
    dense = extreme_singular_values(op, "dense")
    it = extreme_singular_values(op, "iterative")
    assert_allclose(dense, (s[-1], s[0]), rtol=1e-12)
    assert_allclose(it, (s[-1], s[0]), rtol=1e-6)


def test_singular_values_bad_method():
    with pytest.raises(ValueError):
        extreme_singular_values(NudftOperator(make_uniform(2)), "magic")


def test_spectral_norm_diff_against_svd():
    g = make_random(25, 0.2, 11)
    D = reference_matrix(make_uniform(25), 25) - reference_matrix(g, 25)
    ref = sla.svdvals(D)[0]
    assert spectral_norm_diff(g) == pytest.approx(ref, rel=1e-12)
    assert spectral_norm_diff(g, NudftOperator(g, dense=True)) == pytest.approx(ref, rel=1e-12)
    assert spectral_norm_diff(g, method="power") == pytest.approx(ref, rel=1e-8)
    with pytest.raises(ValueError):
        spectral_norm_diff(g, method="svd")


def test_kadec_check_below_quarter():
    g = make_random(64, 0.1, 0)
    rep = kadec_check(g)
    assert rep.applicable and rep.passed
    p = bounds.phi(0.1)
    assert rep["diff_ratio"].bound == pytest.approx(p)
    assert rep["kappa"].measured == pytest.approx(
        rep["sigma_max_ratio"].measured / rep["sigma_min_ratio"].measured)
    d = rep.as_dict()
    assert d["passed"] is True and d["N"] == 64


def test_kadec_check_above_quarter_has_no_bounds():
    rep = kadec_check(make_random(16, 0.3, 0))
    assert not rep.applicable and rep.passed is None
    with pytest.raises(KeyError):
        rep["nonexistent"]


@given(st.integers(1, 40), st.floats(0.0, 0.2499), st.integers(0, 10**6))
def test_kadec_inequalities_hold(N, alpha, seed):
    rep = kadec_check(make_random(N, alpha, seed))
    assert rep.passed


def test_linear_operator_wrapper(rng):
    op = NudftOperator(make_random(4, 0.2, 0))
    lo = op.as_linear_operator()
    c = random_coeffs(rng, 4)
    assert_allclose(lo.matvec(c), op.apply_forward(c))
    assert_allclose(lo.rmatvec(c), op.apply_adjoint(c))
