"""Generalized differential evolution (GDE3) with best-compromise extraction.

Each generation builds one DE/rand/1/bin trial per parent. A trial that
constraint-dominates its parent replaces it, a trial dominated by its parent
is dropped, and otherwise both survive into an enlarged pool that is pruned
back to the population size by rank and crowding distance.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .model import Scenario, bounds as variable_bounds, evaluate
from .moea import FrontArchive, Individual, nondominated_mask, prune


class BcsMode(str, enum.Enum):
    RAW = "raw"
    NORMALIZED = "normalized"


@dataclass(frozen=True)
class SolverParams:
    pop_size: int = 100
    max_iters: int = 250
    f: float = 0.5
    cr: float = 0.5
    seed: int = 1
    bcs_mode: BcsMode = BcsMode.RAW
    n_threads: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "bcs_mode", BcsMode(self.bcs_mode))
        if self.pop_size < 4:
            raise ValueError("pop_size must be at least 4 for DE/rand/1")
        if not 0 <= self.cr <= 1:
            raise ValueError("cr must lie in [0, 1]")
        if not self.f > 0:
            raise ValueError("f must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")
        if self.n_threads < 1:
            raise ValueError("n_threads must be at least 1")


@dataclass
class Population:
    """Decisions ``X``, objectives ``F`` and deficits ``V`` (electric, heat)."""

    X: np.ndarray
    F: np.ndarray
    V: np.ndarray

    def __len__(self) -> int:
        return len(self.X)

    @property
    def cv(self) -> np.ndarray:
        return self.V.sum(axis=1)

    def take(self, idx) -> "Population":
        return Population(self.X[idx], self.F[idx], self.V[idx])

    @staticmethod
    def concat(parts: Sequence["Population"]) -> "Population":
        return Population(
            np.vstack([p.X for p in parts]),
            np.vstack([p.F for p in parts]),
            np.vstack([p.V for p in parts]),
        )

    def individual(self, i: int) -> Individual:
        return Individual.from_arrays(self.X[i], self.F[i], self.V[i])


def evaluate_population(X: np.ndarray, scenario: Scenario, n_threads: int = 1) -> Population:
    """Evaluate a batch, optionally split across threads in fixed-order chunks."""
    X = np.asarray(X, dtype=float)
    if n_threads <= 1 or len(X) < 2 * n_threads:
        F, V = evaluate(X, scenario)
        return Population(X, F, V)
    chunks = np.array_split(X, n_threads)
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        results = list(pool.map(lambda c: evaluate(c, scenario), chunks))
    return Population(X, np.vstack([r[0] for r in results]), np.vstack([r[1] for r in results]))


def _donors(n: int, parents: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Three distinct random indices per parent, none equal to the parent."""
    keys = rng.random((len(parents), n))
    keys[np.arange(len(parents)), parents] = np.inf
    picked = np.argpartition(keys, 3, axis=1)[:, :3]
    # argpartition leaves the three smallest unordered; order them by key
    order = np.argsort(np.take_along_axis(keys, picked, axis=1), axis=1)
    return np.take_along_axis(picked, order, axis=1)


def de_trials(
    X: np.ndarray,
    f: float,
    cr: float,
    lo: np.ndarray,
    hi: np.ndarray,
    rng: np.random.Generator,
    parents: np.ndarray | None = None,
) -> np.ndarray:
    """DE/rand/1/bin trial vectors for the given parent indices.

    Components outside ``[lo, hi]`` are clamped to the violated bound.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    if n < 4:
        raise ValueError("DE/rand/1 needs a population of at least 4")
    parents = np.arange(n) if parents is None else np.asarray(parents, dtype=int)
    r = _donors(n, parents, rng)
    mutant = X[r[:, 0]] + f * (X[r[:, 1]] - X[r[:, 2]])
    cross = rng.random((len(parents), d)) < cr
    j_rand = rng.integers(d, size=len(parents))
    cross[np.arange(len(parents)), j_rand] = True
    trial = np.where(cross, mutant, X[parents])
    return np.clip(trial, lo, hi)


def de_trial(pop, parent_index: int, params: SolverParams, bounds, rng: np.random.Generator) -> np.ndarray:
    X = pop.X if isinstance(pop, Population) else np.asarray(pop, dtype=float)
    lo, hi = bounds
    return de_trials(X, params.f, params.cr, lo, hi, rng, parents=np.array([parent_index]))[0]


def _constraint_dominates_rows(Fa, cva, Fb, cvb) -> np.ndarray:
    fa, fb = cva == 0, cvb == 0
    dom = np.all(Fa <= Fb, axis=1) & np.any(Fa < Fb, axis=1)
    return (fa & fb & dom) | (fa & ~fb) | (~fa & ~fb & (cva < cvb))


def gde3_selection(parents: Population, trials: Population) -> Population:
    """Pool after one-to-one selection: replacements in place, extra trials appended."""
    cvp, cvt = parents.cv, trials.cv
    trial_wins = _constraint_dominates_rows(trials.F, cvt, parents.F, cvp)
    parent_wins = _constraint_dominates_rows(parents.F, cvp, trials.F, cvt)
    base = parents.take(slice(None))
    base = Population(base.X.copy(), base.F.copy(), base.V.copy())
    base.X[trial_wins] = trials.X[trial_wins]
    base.F[trial_wins] = trials.F[trial_wins]
    base.V[trial_wins] = trials.V[trial_wins]
    both = ~trial_wins & ~parent_wins
    return Population.concat([base, trials.take(both)])


def gde3_step(
    pop: Population,
    scenario: Scenario,
    params: SolverParams,
    rng: np.random.Generator,
    bounds=None,
) -> Population:
    lo, hi = variable_bounds(scenario) if bounds is None else bounds
    trials = evaluate_population(de_trials(pop.X, params.f, params.cr, lo, hi, rng), scenario, params.n_threads)
    return survivors(pop, trials, params.pop_size)


def survivors(parents: Population, trials: Population, size: int) -> Population:
    """One-to-one selection followed by pruning back to ``size``."""
    pool = gde3_selection(parents, trials)
    if len(pool) > size:
        pool = pool.take(prune(pool.F, pool.cv, size))
    return pool


def feasible_front(pop: Population) -> FrontArchive:
    """Feasible non-dominated members, one per distinct objective vector.

    Among members sharing an objective vector the lexicographically smallest
    decision is kept. Members are ordered lexicographically by objectives.
    """
    feas = np.flatnonzero(pop.cv == 0)
    if feas.size == 0:
        return FrontArchive(np.empty((0, pop.X.shape[1])), np.empty((0, pop.F.shape[1])))
    X, F = pop.X[feas], pop.F[feas]
    keep = nondominated_mask(F)
    X, F = X[keep], F[keep]
    order = np.lexsort(np.vstack([X.T[::-1], F.T[::-1]]))
    X, F = X[order], F[order]
    distinct = np.ones(len(F), dtype=bool)
    distinct[1:] = np.any(F[1:] != F[:-1], axis=1)
    return FrontArchive(X[distinct].copy(), F[distinct].copy())


def compromise_distances(F: np.ndarray, mode: BcsMode | str = BcsMode.RAW) -> np.ndarray:
    """Euclidean distance of each objective vector to the ideal point (the origin).

    In normalized mode every objective is first min-max scaled over ``F``;
    an objective with zero range maps to 0.
    """
    F = np.asarray(F, dtype=float)
    if BcsMode(mode) is BcsMode.NORMALIZED:
        lo, hi = F.min(axis=0), F.max(axis=0)
        span = hi - lo
        F = np.where(span > 0, (F - lo) / np.where(span > 0, span, 1.0), 0.0)
    return np.sqrt(np.sum(F * F, axis=1))


def bcs_index(F: np.ndarray, mode: BcsMode | str = BcsMode.RAW) -> int:
    F = np.asarray(F, dtype=float)
    if len(F) == 0:
        raise ValueError("best compromise of an empty front is undefined")
    d = compromise_distances(F, mode)
    tied = np.flatnonzero(d == d.min())
    if len(tied) == 1:
        return int(tied[0])
    lex = np.lexsort(F[tied].T[::-1])
    return int(tied[lex[0]])


def best_compromise(front, mode: BcsMode | str = BcsMode.RAW) -> Individual:
    """Front member closest to the ideal point; ties go to the lexicographically
    smallest objective vector."""
    members = list(front)
    if not members:
        raise ValueError("best compromise of an empty front is undefined")
    F = np.array([m.objectives for m in members], dtype=float)
    return members[bcs_index(F, mode)]


@dataclass
class IterationStats:
    iteration: int
    feasible_count: int
    front_size: int
    archive_size: int
    min_violation: float


@dataclass
class SolveResult:
    front: FrontArchive
    population: Population
    archive: FrontArchive
    telemetry: list[IterationStats] = field(default_factory=list)
    bcs_mode: BcsMode = BcsMode.RAW

    @property
    def feasible(self) -> bool:
        return len(self.front) > 0

    @property
    def bcs(self) -> Individual | None:
        return self.bcs_for(self.bcs_mode)

    def bcs_for(self, mode: BcsMode | str) -> Individual | None:
        if not self.feasible:
            return None
        return best_compromise(self.front, mode)

    @property
    def diagnostic(self) -> Individual:
        """Least-violating population member (first on ties)."""
        return self.population.individual(int(np.argmin(self.population.cv)))


def initial_population(scenario: Scenario, size: int, rng: np.random.Generator, n_threads: int = 1) -> Population:
    lo, hi = variable_bounds(scenario)
    X = lo + rng.random((size, scenario.n_vars)) * (hi - lo)
    return evaluate_population(X, scenario, n_threads)


def _stats(it: int, pop: Population, archive: FrontArchive) -> IterationStats:
    cv = pop.cv
    feas = cv == 0
    front = int(nondominated_mask(pop.F[feas]).sum()) if feas.any() else 0
    return IterationStats(it, int(feas.sum()), front, len(archive), float(cv.min()))


def run(
    scenario: Scenario,
    params: SolverParams = SolverParams(),
    callback: Callable[[int, Population], None] | None = None,
) -> SolveResult:
    """Run BCS-GDE for exactly ``params.max_iters`` generations.

    The returned front is the feasible rank-0 set of the final population.
    An unbounded archive of every feasible non-dominated point seen is kept
    alongside for telemetry. If nothing feasible was found the front is
    empty and ``SolveResult.diagnostic`` holds the least-violating member.
    """
    rng = np.random.default_rng(params.seed)
    bnds = variable_bounds(scenario)
    pop = initial_population(scenario, params.pop_size, rng, params.n_threads)
    archive = FrontArchive()
    feas = pop.cv == 0
    archive.extend(pop.X[feas], pop.F[feas])
    telemetry = [_stats(0, pop, archive)]
    for it in range(1, params.max_iters + 1):
        pop = gde3_step(pop, scenario, params, rng, bnds)
        feas = pop.cv == 0
        archive.extend(pop.X[feas], pop.F[feas])
        telemetry.append(_stats(it, pop, archive))
        if callback is not None:
            callback(it, pop)
    return SolveResult(
        front=feasible_front(pop),
        population=pop,
        archive=archive,
        telemetry=telemetry,
        bcs_mode=params.bcs_mode,
    )
