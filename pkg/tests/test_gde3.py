import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cchp_moo.gde3 import (
    BcsMode,
    Population,
    SolverParams,
    best_compromise,
    bcs_index,
    compromise_distances,
    de_trial,
    de_trials,
    gde3_selection,
    run,
    survivors,
)
from cchp_moo.metrics import hypervolume, normalize_front
from cchp_moo.model import OperatingCase, evaluate
from cchp_moo.moea import FrontArchive, Individual, prune
from cchp_moo.scenario_io import load_bundled

from conftest import random_scenario, single_period

SMALL = SolverParams(pop_size=20, max_iters=30)


def pop_of(F, cv=None, X=None):
    F = np.asarray(F, dtype=float)
    n = len(F)
    V = np.zeros((n, 2)) if cv is None else np.column_stack([cv, np.zeros(n)])
    X = np.arange(n, dtype=float)[:, None] if X is None else X
    return Population(np.asarray(X, dtype=float), F, V)


# --- variation ---------------------------------------------------------------


def test_zero_differential_copies_first_donor(rng):
    X = rng.random((6, 4))
    params = SolverParams(pop_size=6, f=1e-300, cr=1.0)
    for parent in range(6):
        trial = de_trial(X, parent, params, (np.zeros(4), np.ones(4)), rng)
        matches = [i for i in range(6) if np.allclose(trial, X[i], rtol=0, atol=1e-12)]
        assert matches and parent not in matches


def test_cr_zero_changes_one_coordinate(rng):
    X = rng.random((10, 8))
    T = de_trials(X, 0.5, 0.0, np.full(8, -10.0), np.full(8, 10.0), rng)
    assert np.all((T != X).sum(axis=1) == 1)


def test_out_of_bounds_component_is_clamped(rng):
    X = np.full((5, 3), -5.0)
    T = de_trials(X, 0.5, 1.0, np.zeros(3), np.ones(3), rng)
    assert np.all(T == 0.0)
    T = de_trials(-X, 0.5, 1.0, np.zeros(3), np.ones(3), rng)
    assert np.all(T == 1.0)


def test_population_too_small(rng):
    with pytest.raises(ValueError):
        de_trials(np.zeros((3, 2)), 0.5, 0.5, np.zeros(2), np.ones(2), rng)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trials_stay_in_bounds(seed):
    rng = np.random.default_rng(seed)
    lo, hi = rng.uniform(-5, 0, 6), rng.uniform(0.1, 5, 6)
    X = lo + rng.random((12, 6)) * (hi - lo)
    T = de_trials(X, rng.uniform(0.1, 2.0), rng.random(), lo, hi, rng)
    assert np.all((T >= lo) & (T <= hi))


# --- selection ---------------------------------------------------------------


def test_infeasible_trial_loses():
    parents = pop_of([[5, 5, 5]], cv=[0.0])
    trials = pop_of([[0, 0, 0]], cv=[1.0], X=[[9.0]])
    pool = gde3_selection(parents, trials)
    assert len(pool) == 1 and pool.X[0, 0] == 0.0


def test_dominating_trial_replaces_parent():
    parents = pop_of([[5, 5, 5], [1, 2, 3]])
    trials = pop_of([[4, 4, 4], [3, 2, 1]], X=[[7.0], [8.0]])
    pool = gde3_selection(parents, trials)
    # first trial replaces its parent in place, second is incomparable and appended
    assert pool.X[:, 0].tolist() == [7.0, 1.0, 8.0]


def test_incomparable_trials_pool_then_prune(rng):
    n = 10
    F = rng.dirichlet(np.ones(3), size=2 * n)
    parents, trials = pop_of(F[:n]), pop_of(F[n:], X=np.arange(n, 2 * n, dtype=float)[:, None])
    pool = gde3_selection(parents, trials)
    assert len(pool) == 2 * n
    kept = survivors(parents, trials, n)
    expected = pool.take(prune(pool.F, pool.cv, n))
    assert np.array_equal(kept.X, expected.X)
    assert len(kept) == n


# --- best compromise ---------------------------------------------------------


def members(rows):
    return FrontArchive(np.zeros((len(rows), 1)), np.array(rows, dtype=float))


def test_bcs_pythagorean():
    pick = best_compromise(members([(5, 5, 5), (3, 4, 0)]))
    assert tuple(pick.objectives) == (3, 4, 0)
    assert compromise_distances(np.array([[3.0, 4.0, 0.0]]))[0] == 5.0


def test_bcs_singleton():
    assert tuple(best_compromise(members([(7, 8, 9)]), BcsMode.NORMALIZED).objectives) == (7, 8, 9)


def test_bcs_raw_vs_normalized():
    F = np.array([(1, 100, 100), (50, 50, 50)], dtype=float)
    raw = compromise_distances(F, BcsMode.RAW)
    np.testing.assert_allclose(raw, [np.sqrt(20001.0), np.sqrt(7500.0)])
    assert bcs_index(F, BcsMode.RAW) == 1
    # normalized: (0, 1, 1) at distance sqrt(2) vs (1, 0, 0) at distance 1
    np.testing.assert_allclose(compromise_distances(F, BcsMode.NORMALIZED), [np.sqrt(2.0), 1.0])
    assert bcs_index(F, BcsMode.NORMALIZED) == 1
    # raw distances 1000, 10, ~400; normalized 1, 1, sqrt(0.52)
    G = np.array([(0, 1000, 0), (10, 0, 0), (6, 400, 0)], dtype=float)
    assert bcs_index(G, BcsMode.RAW) == 1
    assert bcs_index(G, BcsMode.NORMALIZED) == 2


def test_bcs_tie_goes_to_lexicographic_minimum():
    F = np.array([(0, 5, 0), (5, 0, 0), (0, 0, 5)], dtype=float)
    assert bcs_index(F) == 2


def test_bcs_empty():
    with pytest.raises(ValueError):
        best_compromise(members([]))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(list(BcsMode)))
def test_bcs_is_exhaustive_minimum(seed, mode):
    rng = np.random.default_rng(seed)
    F = rng.dirichlet(np.ones(3), size=int(rng.integers(1, 25))) * rng.uniform(1, 1e4, 3)
    i = bcs_index(F, mode)
    d = compromise_distances(F, mode)
    assert all(d[i] <= d[j] for j in range(len(F)))
    perm = rng.permutation(len(F))
    assert np.array_equal(F[perm][bcs_index(F[perm], mode)], F[i])


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_normalized_bcs_ignores_objective_scale(seed):
    rng = np.random.default_rng(seed)
    F = rng.dirichlet(np.ones(3), size=15)
    scale, shift = rng.uniform(0.01, 100, 3), rng.uniform(0, 50, 3)
    assert bcs_index(F, BcsMode.NORMALIZED) == bcs_index(F * scale + shift, BcsMode.NORMALIZED)


# --- full runs ---------------------------------------------------------------


def test_zero_demand_collapses_to_origin():
    res = run(load_bundled("zero_demand"), SMALL)
    assert len(res.front) == 1
    assert np.all(res.front.X == 0.0)
    assert tuple(res.bcs.objectives) == (0.0, 0.0, 0.0)


def test_same_seed_same_front():
    sc = load_bundled("rated_residential_t1")
    a, b = run(sc, SMALL), run(sc, SMALL)
    assert np.array_equal(a.front.X, b.front.X) and np.array_equal(a.front.F, b.front.F)
    c = run(sc, SolverParams(pop_size=20, max_iters=30, n_threads=3))
    assert np.array_equal(a.front.F, c.front.F)


def test_front_is_feasible_nondominated_and_in_bounds(rng):
    from cchp_moo.model import bounds
    from cchp_moo.moea import nondominated_mask

    for case in OperatingCase:
        sc = random_scenario(rng, n_periods=4, case=case)
        res = run(sc, SolverParams(pop_size=24, max_iters=40, seed=int(rng.integers(1000))))
        assert res.feasible
        F, V = evaluate(res.front.X, sc)
        assert np.all(V == 0.0)
        assert np.array_equal(F, res.front.F)
        assert nondominated_mask(F).all()
        lo, hi = bounds(sc)
        assert np.all((res.front.X >= lo) & (res.front.X <= hi))


def test_archive_hypervolume_never_decreases():
    sc = load_bundled("rated_residential_t1")
    archive = FrontArchive()
    snapshots = []

    def record(it, pop):
        feas = pop.cv == 0
        archive.extend(pop.X[feas], pop.F[feas])
        snapshots.append(archive.F.copy())

    res = run(sc, SolverParams(pop_size=20, max_iters=40), callback=record)
    final = res.archive.F
    ideal, nadir = final.min(axis=0), final.max(axis=0)
    hv = [hypervolume(normalize_front(s, ideal, nadir)) for s in snapshots]
    assert all(b >= a - 1e-12 for a, b in zip(hv, hv[1:]))
    assert [t.archive_size for t in res.telemetry][-1] == len(res.archive)


def test_infeasible_run_reports_diagnostic():
    # four random 72-variable decisions and no iterations: some period is always short
    res = run(load_bundled("hotel"), SolverParams(pop_size=4, max_iters=0))
    assert not res.feasible
    assert res.bcs is None
    assert isinstance(res.diagnostic, Individual)
    assert res.diagnostic.violation.total == res.population.cv.min() > 0


def test_params_validation():
    with pytest.raises(ValueError):
        SolverParams(pop_size=3)
    with pytest.raises(ValueError):
        SolverParams(cr=1.5)
    with pytest.raises(ValueError):
        SolverParams(bcs_mode="nearest")
