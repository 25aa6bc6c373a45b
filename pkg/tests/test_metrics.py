import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cchp_moo.metrics import (
    brute_force_front,
    clean_front,
    generalized_spread,
    hypervolume,
    indicator_report,
    joint_bounds,
    normalize_front,
    spread_extremes,
)
from cchp_moo.model import bounds, evaluate
from cchp_moo.moea import nondominated_mask
from cchp_moo.scenario_io import load_bundled

from conftest import single_period

ONES = (1.0, 1.0, 1.0)


def inclusion_exclusion(P, ref):
    """Union of boxes [p, ref] by inclusion-exclusion over all subsets."""
    total = 0.0
    for k in range(1, len(P) + 1):
        for S in itertools.combinations(P, k):
            corner = np.max(S, axis=0)
            total += (-1) ** (k + 1) * np.prod(np.maximum(0.0, np.asarray(ref) - corner))
    return total


# --- normalization -----------------------------------------------------------


def test_normalize_examples():
    ideal, nadir = np.array([1.0, 10.0, 100.0]), np.array([3.0, 30.0, 300.0])
    np.testing.assert_allclose(normalize_front(ideal[None], ideal, nadir), [[0, 0, 0]])
    np.testing.assert_allclose(normalize_front(nadir[None], ideal, nadir), [[1, 1, 1]])
    np.testing.assert_allclose(normalize_front(((ideal + nadir) / 2)[None], ideal, nadir), [[0.5, 0.5, 0.5]])


def test_normalize_degenerate_axis_and_clipping():
    out = normalize_front(np.array([[5.0, 2.0, -1.0]]), [0, 2, 0], [4, 2, 1])
    np.testing.assert_allclose(out, [[1.0, 0.0, 0.0]])


def test_clean_front_and_bounds():
    F = np.array([[1, 2, 3], [1, 2, 3], [2, 3, 4], [3, 1, 1]], dtype=float)
    np.testing.assert_array_equal(clean_front(F), [[1, 2, 3], [3, 1, 1]])
    np.testing.assert_array_equal(clean_front(F, cv=[0, 0, 0, 1]), [[1, 2, 3]])
    lo, hi = joint_bounds([F[:2], F[3:]])
    np.testing.assert_array_equal(lo, [1, 1, 1])
    np.testing.assert_array_equal(hi, [3, 2, 3])


# --- hypervolume -------------------------------------------------------------


def test_hv_single_box():
    assert hypervolume(np.array([[0.5, 0.5, 0.5]]), ONES) == 0.125


def test_hv_two_boxes():
    P = np.array([[0.2, 0.8, 0.8], [0.8, 0.2, 0.2]])
    assert abs(hypervolume(P, ONES) - (0.032 + 0.128 - 0.008)) <= 1e-12


def test_hv_duplicates():
    P = np.array([[0.2, 0.8, 0.8], [0.8, 0.2, 0.2], [0.2, 0.8, 0.8]])
    assert hypervolume(P, ONES) == hypervolume(P[:2], ONES)


def test_hv_point_beyond_reference_is_dropped():
    with pytest.warns(RuntimeWarning):
        hv = hypervolume(np.array([[0.5, 0.5, 0.5], [0.1, 0.1, 1.5]]), ONES)
    assert hv == 0.125


def test_hv_empty_and_two_objectives():
    assert hypervolume(np.empty((0, 3))) == 0.0
    assert hypervolume(np.array([[0.25, 0.5], [0.5, 0.25]]), (1.0, 1.0)) == pytest.approx(0.375 + 0.375 - 0.25)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 9))
def test_hv_matches_inclusion_exclusion(seed, n):
    rng = np.random.default_rng(seed)
    P = rng.random((n, 3))
    ref = (1.1, 1.1, 1.1)
    assert hypervolume(P, ref) == pytest.approx(inclusion_exclusion(P, ref), rel=1e-10, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 30))
def test_hv_monotone_under_insertion(seed, n):
    rng = np.random.default_rng(seed)
    P = rng.random((n, 3))
    q = rng.random((1, 3))
    assert hypervolume(np.vstack([P, q]), ONES) >= hypervolume(P, ONES) - 1e-12


# --- spread ------------------------------------------------------------------


def test_spread_zero_for_even_front_spanning_extremes():
    F = np.array([[0.0, 1.0, 0.5], [0.5, 0.5, 0.5], [1.0, 0.0, 0.5]])
    assert generalized_spread(F, spread_extremes(F)) == 0.0


def test_spread_of_coincident_pair():
    F = np.array([[0.5, 0.5, 0.5], [0.5, 0.5, 0.5]])
    E = np.eye(3)
    # mean neighbour distance is 0, so both sums reduce to the extreme gaps
    assert generalized_spread(F, E) == 1.0


def test_spread_hand_computed():
    F = np.array([[0.0, 1.0, 0.0], [0.25, 0.5, 0.0], [1.0, 0.0, 0.0]])
    E = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    d = np.array([np.hypot(0.25, 0.5)] * 2 + [np.hypot(0.75, 0.5)])
    d_ext = 0.0 + 0.0 + min(np.sqrt(2.0), np.sqrt(0.25**2 + 0.25 + 1))
    expected = (d_ext + np.abs(d - d.mean()).sum()) / (d_ext + 3 * d.mean())
    assert generalized_spread(F, E) == pytest.approx(expected, rel=1e-12)


def test_spread_needs_two_points():
    with pytest.raises(ValueError):
        generalized_spread(np.array([[0.1, 0.2, 0.3]]), np.eye(3))
    rep = indicator_report(np.array([[1.0, 2.0, 3.0]]), [0, 0, 0], [2, 4, 6], np.eye(3))
    assert np.isnan(rep.spread) and rep.hv == pytest.approx(0.6 ** 3)


# --- brute-force oracle ------------------------------------------------------


def test_oracle_zero_demand():
    front = brute_force_front(load_bundled("zero_demand"), resolution=16)
    np.testing.assert_array_equal(front.F, [[0.0, 0.0, 0.0]])
    np.testing.assert_array_equal(front.X, [[0.0, 0.0, 0.0]])


def test_oracle_corners():
    sc = single_period(e=4166.0, c=6145.0, h=7080.0)
    lo, hi = bounds(sc)
    corners = np.array(list(itertools.product(*zip(lo, hi))))
    F, V = evaluate(corners, sc)
    F = F[V.sum(axis=1) == 0]
    expected = np.unique(F[nondominated_mask(F)], axis=0)
    np.testing.assert_array_equal(brute_force_front(sc, resolution=2).F, expected)


def test_oracle_rejects_multi_period_and_tiny_grid():
    with pytest.raises(ValueError, match="single-period"):
        brute_force_front(load_bundled("residential"))
    with pytest.raises(ValueError):
        brute_force_front(single_period(e=1.0), resolution=1)


def test_oracle_front_is_nondominated_and_feasible():
    sc = load_bundled("rated_residential_t1")
    front = brute_force_front(sc, resolution=20)
    F, V = evaluate(front.X, sc)
    assert np.all(V == 0)
    np.testing.assert_array_equal(F, front.F)
    assert nondominated_mask(F).all()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert hypervolume(normalize_front(F, *joint_bounds([F]))) > 0
