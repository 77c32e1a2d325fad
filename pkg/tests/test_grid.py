import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from perturbed_fourier.grid import (PerturbedGrid, alternating_deltas, make_alternating,
                                    make_random, make_uniform, validate)

alphas = st.floats(0.0, 0.49)
halfwidths = st.integers(0, 60)
seeds = st.integers(0, 2**32 - 1)


def test_uniform_nodes_are_equispaced():
    g = make_uniform(5)
    h = 2 * np.pi / 11
    assert_allclose(g.nodes, np.arange(-5, 6) * h, rtol=0, atol=1e-15)
    assert_array_equal(g.deltas, 0.0)
    assert g.size == len(g) == 11
    assert g.h == pytest.approx(h)


def test_single_node_grid():
    g = make_uniform(0)
    assert_array_equal(g.nodes, [0.0])
    assert validate(g).valid


@given(halfwidths, alphas, seeds)
def test_random_grid_respects_budget_and_order(N, alpha, seed):
    g = make_random(N, alpha, seed)
    rep = validate(g)
    assert rep.valid
    assert rep.max_abs_delta <= alpha
    assert np.all(np.diff(g.nodes) > 0)
    assert g.nodes[-1] < g.nodes[0] + 2 * np.pi


def test_random_grid_is_reproducible():
    a, b, c = make_random(20, 0.3, 7), make_random(20, 0.3, 7), make_random(20, 0.3, 8)
    assert a.checksum() == b.checksum()
    assert a.checksum() != c.checksum()
    assert a.seed == 7 and a.kind == "random"


def test_random_grid_uses_the_whole_budget():
    g = make_random(500, 0.2, 0)
    assert g.deltas.min() < -0.19 and g.deltas.max() > 0.19


def test_alternating_pattern():
    a = 0.3
    d = alternating_deltas(3, a)
    # j = -3..3: negative side even -> -a, odd -> +a; node 0 fixed; positive side mirrored
    assert_allclose(d, [a, -a, a, 0.0, -a, a, -a])
    assert_allclose(d, -d[::-1])
    g = make_alternating(3, a)
    assert g.kind == "alternating"
    assert validate(g).valid


@given(st.integers(1, 80), st.floats(0.01, 0.49))
def test_alternating_is_odd_symmetric_and_maximal(N, alpha):
    g = make_alternating(N, alpha)
    assert_allclose(g.nodes, -g.nodes[::-1], atol=1e-13)
    off = np.delete(np.abs(g.deltas), N)
    assert_allclose(off, alpha)


@pytest.mark.parametrize("alpha", [-0.1, 0.5, 0.7])
def test_make_random_rejects_bad_alpha(alpha):
    with pytest.raises(ValueError):
        make_random(4, alpha, 0)


def test_make_alternating_rejects_bad_arguments():
    with pytest.raises(ValueError):
        make_alternating(0, 0.2)
    with pytest.raises(ValueError):
        make_alternating(4, 0.0)
    with pytest.raises(ValueError):
        make_uniform(-1)
    with pytest.raises(ValueError):
        make_uniform(2.5)


def test_validate_reports_budget_violation():
    d = np.zeros(5)
    d[1] = 0.3
    with pytest.raises(ValueError, match="exceeds alpha"):
        PerturbedGrid.from_deltas(d, 0.2)
    g = PerturbedGrid.from_deltas(d, 0.2, check=False)
    rep = validate(g)
    assert not rep.valid and not rep.within_budget and rep.cyclic_order
    assert rep.max_abs_delta == pytest.approx(0.3)


def test_validate_reports_order_violation():
    d = np.array([0.0, 0.0, 0.6, -0.6, 0.0])
    g = PerturbedGrid.from_deltas(d, 0.6, check=False)
    rep = validate(g)
    assert not rep.cyclic_order and not rep.budget_ok
    assert "increasing" in rep.reason


def test_even_length_rejected():
    with pytest.raises(ValueError):
        PerturbedGrid.from_deltas(np.zeros(4), 0.1)
    with pytest.raises(ValueError):
        PerturbedGrid.from_deltas(np.zeros(3), 0.1, kind="bogus")


@given(st.integers(0, 40), st.floats(0.0, 0.45), seeds)
def test_from_nodes_round_trip(N, alpha, seed):
    g = make_random(N, alpha, seed)
    back = PerturbedGrid.from_nodes(g.nodes, alpha)
    assert_allclose(back.deltas, g.deltas, atol=1e-12)


def test_from_nodes_uniform_with_zero_budget():
    back = PerturbedGrid.from_nodes(make_uniform(8).nodes, 0.0)
    assert np.all(back.deltas == 0.0)
    with pytest.raises(ValueError):
        PerturbedGrid.from_nodes(make_random(8, 0.2, 0).nodes, 0.1)


def test_from_nodes_infers_alpha():
    g = make_alternating(6, 0.25)
    assert PerturbedGrid.from_nodes(g.nodes).alpha == pytest.approx(0.25)


def test_arrays_are_read_only():
    g = make_random(3, 0.1, 0)
    with pytest.raises(ValueError):
        g.nodes[0] = 1.0
    with pytest.raises(ValueError):
        g.deltas[0] = 0.0
