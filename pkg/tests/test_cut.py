import itertools

import numpy as np
import pytest

from conftest import LOSS_POOL, random_dag, random_values
from isogirp.cut import find_partition, sigma
from isogirp.fitting import constant_fit_interval, root_fit
from isogirp.losses import (HingeLoss, HuberLoss, SquaredLoss, interval_add,
                            interval_negate)
from isogirp.order import induced_subgraph, is_lower_set, is_upper_set

HUBER09 = HuberLoss(0.9)
HINGE = HingeLoss()

# certificate tables for the 3-chain hinge instance at level b = 1:
# (upper ids, lower ids, sigma(upper), sigma(lower), sigma(up) - sigma(low)),
# ids 1..3 with 3 below 2 below 1, responses (+1, +1, -1)
HINGE_ROWS_FULL = [
    ((1, 2, 3), (), (-1, 1), (0, 0), (-1, 1)),
    ((1, 2), (), (0, 2), (0, 0), (0, 2)),
    ((1, 2), (3,), (0, 2), (-1, -1), (1, 3)),
    ((1,), (), (0, 1), (0, 0), (0, 1)),
    ((1,), (3,), (0, 1), (-1, -1), (1, 2)),
    ((1,), (2, 3), (0, 1), (-1, 0), (0, 2)),
    ((), (), (0, 0), (0, 0), (0, 0)),
    ((), (3,), (0, 0), (-1, -1), (1, 1)),
    ((), (2, 3), (0, 0), (-1, 0), (0, 1)),
    ((), (1, 2, 3), (0, 0), (-1, 1), (-1, 1)),
]
HINGE_ROWS_UPPER_PART = [
    ((1, 2), (), (0, 2), (0, 0), (0, 2)),
    ((1,), (), (0, 1), (0, 0), (0, 1)),
    ((1,), (2,), (0, 1), (0, 1), (-1, 1)),
    ((), (), (0, 0), (0, 0), (0, 0)),
    ((), (2,), (0, 0), (0, 1), (-1, 0)),
    ((), (1, 2), (0, 0), (0, 2), (-2, 0)),
]
HINGE_ROWS_LOWER_PART = [
    ((2, 3), (), (-1, 0), (0, 0), (-1, 0)),
    ((2,), (), (0, 1), (0, 0), (0, 1)),
    ((2,), (3,), (0, 1), (-1, -1), (1, 2)),
    ((), (), (0, 0), (0, 0), (0, 0)),
    ((), (3,), (0, 0), (-1, -1), (1, 1)),
    ((), (2, 3), (0, 0), (-1, 0), (0, 1)),
]

HINGE_G = {1: 1.0, 2: 1.0, 3: -1.0}


def _assert_interval(iv, expected):
    assert iv.lo == pytest.approx(expected[0], abs=1e-12)
    assert iv.hi == pytest.approx(expected[1], abs=1e-12)


@pytest.mark.parametrize("rows", [HINGE_ROWS_FULL, HINGE_ROWS_UPPER_PART,
                                  HINGE_ROWS_LOWER_PART],
                         ids=["full", "upper-part", "lower-part"])
def test_hinge_certificate_tables(rows):
    """Sigma intervals of every upper/lower pair at b = 1, frozen by hand."""
    for up, low, sig_up, sig_low, diff in rows:
        vals_up = np.array([HINGE_G[i] for i in up])
        vals_low = np.array([HINGE_G[i] for i in low])
        got_up = sigma(HINGE, vals_up, 1.0)
        got_low = sigma(HINGE, vals_low, 1.0)
        _assert_interval(got_up, sig_up)
        _assert_interval(got_low, sig_low)
        # the difference column follows by interval arithmetic
        got_diff = interval_add(got_up, interval_negate(got_low))
        _assert_interval(got_diff, diff)


def test_hinge_partition_of_the_chain(hinge3):
    _, values, dag = hinge3
    res = find_partition(dag, values, HINGE, 1.0)
    assert res.U.tolist() == [0, 1]
    assert res.L.tolist() == [2]
    assert res.min_sigma_U == pytest.approx(0.0, abs=1e-12)
    assert res.max_sigma_L == pytest.approx(-1.0, abs=1e-12)
    assert res.objective == pytest.approx(1.0, abs=1e-12)


def test_hinge_partition_terminates_on_upper_part(hinge3):
    _, values, dag = hinge3
    sub, node_map = induced_subgraph(dag, [0, 1])
    res = find_partition(sub, values[:2], HINGE, 1.0, tie_side="upper")
    assert res.min_sigma_U == pytest.approx(0.0, abs=1e-12)
    assert res.max_sigma_L == pytest.approx(0.0, abs=1e-12)
    assert res.objective == pytest.approx(0.0, abs=1e-12)


# ------------------------------------------------- 32-node reference splits

def test_reference_instance_root_split(example32):
    _, values, dag = example32
    res = find_partition(dag, values, HUBER09, 4.0)
    assert res.U.tolist() == list(range(16, 32))
    assert res.L.tolist() == list(range(16))
    assert res.min_sigma_U == pytest.approx(0.9, abs=1e-9)
    assert res.max_sigma_L == pytest.approx(-0.9, abs=1e-9)
    assert res.objective == pytest.approx(1.8, abs=1e-9)


def test_reference_instance_upper_split(example32):
    _, values, dag = example32
    sub, node_map = induced_subgraph(dag, np.arange(16, 32))
    res = find_partition(sub, values[16:], HUBER09, 4.1, tie_side="upper")
    assert (node_map[res.U] + 1).tolist() == [25, 29, 31]
    assert res.min_sigma_U == pytest.approx(0.9, abs=1e-9)
    assert res.max_sigma_L == pytest.approx(-0.9, abs=1e-9)


def test_reference_instance_lower_split(example32):
    _, values, dag = example32
    sub, node_map = induced_subgraph(dag, np.arange(16))
    res = find_partition(sub, values[:16], HUBER09, 3.78, tie_side="lower")
    assert (node_map[res.U] + 1).tolist() == [5, 6, 9, 13]
    assert (node_map[res.L] + 1).tolist() == [1, 2, 3, 4, 7, 8, 10, 11, 12,
                                              14, 15, 16]
    assert res.min_sigma_U == pytest.approx(0.12, abs=1e-9)
    assert res.max_sigma_L == pytest.approx(-0.12, abs=1e-9)


# -------------------------------------------------------------- brute force

def _enumerate_extremes(dag, values, loss, b):
    """Exhaustive optima of both closure problems, bitmask enumeration."""
    n = dag.n
    best_up, best_low = -np.inf, np.inf
    for bits in range(1 << n):
        members = [i for i in range(n) if bits >> i & 1]
        sub = values[members]
        if is_upper_set(dag, members):
            best_up = max(best_up, sigma(loss, sub, b).lo)
        if is_lower_set(dag, members):
            best_low = min(best_low, sigma(loss, sub, b).hi)
    return best_up, best_low


@pytest.mark.parametrize("seed", range(24))
def test_partition_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    dag = random_dag(rng, n, p=0.45)
    loss = LOSS_POOL[seed % len(LOSS_POOL)]
    values = random_values(rng, loss, n)
    cf = constant_fit_interval(values, loss)
    if seed % 3 == 0 and cf.attained:
        b = root_fit(cf, "mid")
    else:
        b = float(np.round(rng.normal(0.0, 1.5), 2))
    res = find_partition(dag, values, loss, b)
    best_up, best_low = _enumerate_extremes(dag, values, loss, b)
    assert res.min_sigma_U == pytest.approx(best_up, abs=1e-9)
    assert res.max_sigma_L == pytest.approx(best_low, abs=1e-9)
    # the returned sets are witnesses of those optima
    assert is_upper_set(dag, res.U)
    assert is_lower_set(dag, res.L)
    assert sigma(loss, values[res.U], b).lo == pytest.approx(best_up,
                                                             abs=1e-9)
    assert sigma(loss, values[res.L], b).hi == pytest.approx(best_low,
                                                             abs=1e-9)


@pytest.mark.parametrize("seed", range(40))
def test_partition_invariants(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(2, 15))
    dag = random_dag(rng, n, p=0.35)
    loss = LOSS_POOL[seed % len(LOSS_POOL)]
    values = random_values(rng, loss, n)
    cf = constant_fit_interval(values, loss)
    assert cf.attained
    b = root_fit(cf, "mid")
    for tie_side in ("auto", "upper", "lower"):
        res = find_partition(dag, values, loss, b, tie_side=tie_side)
        assert is_upper_set(dag, res.U)
        assert is_lower_set(dag, res.L)
        assert np.intersect1d(res.U, res.L).size == 0
        # at an optimal level the certificates cannot cross zero
        assert res.min_sigma_U >= -1e-9
        assert res.max_sigma_L <= 1e-9
        assert res.objective == pytest.approx(
            res.min_sigma_U - res.max_sigma_L, abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_partition_complement_for_pointwise_gradients(seed):
    """With a single-valued gradient the two sides split the node set."""
    rng = np.random.default_rng(2000 + seed)
    n = int(rng.integers(2, 12))
    dag = random_dag(rng, n, p=0.4)
    loss = SquaredLoss() if seed % 2 else HUBER09
    values = random_values(rng, loss, n)
    b = root_fit(constant_fit_interval(values, loss), "mid")
    res = find_partition(dag, values, loss, b)
    if 0 < res.U.size < n:
        both = np.concatenate([res.U, res.L])
        np.testing.assert_array_equal(np.sort(both), np.arange(n))


def test_tie_side_orders_by_inclusion():
    # a two-node antichain of zeros is all ties: every subset is optimal
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(rng.integers(2, 10))
        dag = random_dag(rng, n, p=0.3)
        values = np.round(rng.normal(0.0, 1.0, n), 1)
        b = root_fit(constant_fit_interval(values, HUBER09), "mid")
        upper_pref = find_partition(dag, values, HUBER09, b,
                                    tie_side="upper")
        lower_pref = find_partition(dag, values, HUBER09, b,
                                    tie_side="lower")
        assert set(lower_pref.U) <= set(upper_pref.U)
        assert set(upper_pref.L) <= set(lower_pref.L)
        assert upper_pref.min_sigma_U == pytest.approx(
            lower_pref.min_sigma_U, abs=1e-9)
        assert upper_pref.max_sigma_L == pytest.approx(
            lower_pref.max_sigma_L, abs=1e-9)


def test_sigma_of_empty_subset_is_zero():
    iv = sigma(HUBER09, np.array([]), 1.0)
    assert (iv.lo, iv.hi) == (0.0, 0.0)
