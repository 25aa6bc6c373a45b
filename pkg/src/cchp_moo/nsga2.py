"""NSGA-II baseline with simulated binary crossover and polynomial mutation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gde3 import Population, SolveResult, evaluate_population, feasible_front, initial_population, IterationStats
from .model import Scenario, bounds as variable_bounds
from .moea import FrontArchive, crowding_distance, fast_nondominated_sort, nondominated_mask, prune

EPS = 1e-14


@dataclass(frozen=True)
class Nsga2Params:
    """Canonical settings; ``mutation_prob=None`` means one over the number of variables."""

    pop_size: int = 100
    max_gens: int = 250
    crossover_prob: float = 0.9
    crossover_dist_index: float = 20.0
    mutation_prob: float | None = None
    mutation_dist_index: float = 20.0
    seed: int = 1
    n_threads: int = 1

    def __post_init__(self) -> None:
        if self.pop_size < 2 or self.pop_size % 2:
            raise ValueError("pop_size must be a positive even number")
        if not 0 <= self.crossover_prob <= 1:
            raise ValueError("crossover_prob must lie in [0, 1]")
        if self.mutation_prob is not None and not 0 <= self.mutation_prob <= 1:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if not (self.crossover_dist_index > 0 and self.mutation_dist_index > 0):
            raise ValueError("distribution indices must be positive")

    def mutation_rate(self, n_vars: int) -> float:
        return 1.0 / n_vars if self.mutation_prob is None else self.mutation_prob


def _sbx_beta_q(rand: np.ndarray, beta: np.ndarray, eta: float) -> np.ndarray:
    alpha = 2.0 - np.power(beta, -(eta + 1.0))
    return np.where(
        rand <= 1.0 / alpha,
        np.power(rand * alpha, 1.0 / (eta + 1.0)),
        np.power(1.0 / (2.0 - rand * alpha), 1.0 / (eta + 1.0)),
    )


def sbx_batch(P1: np.ndarray, P2: np.ndarray, params: Nsga2Params, bounds, rng: np.random.Generator):
    """Bounded simulated binary crossover (Deb and Agrawal) on rows of parent pairs.

    Each pair is recombined with probability ``crossover_prob``; within a
    recombined pair every variable takes part with probability 1/2, and the
    two children are swapped per variable with probability 1/2 so that each
    child is centred on the parents' midpoint.
    """
    P1 = np.atleast_2d(np.asarray(P1, dtype=float))
    P2 = np.atleast_2d(np.asarray(P2, dtype=float))
    if P1.shape != P2.shape:
        raise ValueError("parents must have the same dimension")
    lo, hi = (np.broadcast_to(np.asarray(b, dtype=float), P1.shape) for b in bounds)
    n, d = P1.shape
    do_pair = rng.random(n) <= params.crossover_prob
    pick = rng.random((n, d)) <= 0.5
    rand = rng.random((n, d))
    swap = rng.random((n, d)) <= 0.5
    C1, C2 = P1.copy(), P2.copy()
    active = do_pair[:, None] & pick & (np.abs(P1 - P2) > EPS)
    if not active.any():
        return C1, C2
    y1 = np.minimum(P1, P2)[active]
    y2 = np.maximum(P1, P2)[active]
    yl, yu, r = lo[active], hi[active], rand[active]
    gap = y2 - y1
    eta = params.crossover_dist_index
    bq1 = _sbx_beta_q(r, 1.0 + 2.0 * (y1 - yl) / gap, eta)
    bq2 = _sbx_beta_q(r, 1.0 + 2.0 * (yu - y2) / gap, eta)
    ch1 = np.clip(0.5 * ((y1 + y2) - bq1 * gap), yl, yu)
    ch2 = np.clip(0.5 * ((y1 + y2) + bq2 * gap), yl, yu)
    s = swap[active]
    C1[active] = np.where(s, ch2, ch1)
    C2[active] = np.where(s, ch1, ch2)
    return C1, C2


def sbx_crossover(p1, p2, params: Nsga2Params, bounds, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    c1, c2 = sbx_batch(p1, p2, params, bounds, rng)
    return c1[0], c2[0]


def mutation_batch(X: np.ndarray, params: Nsga2Params, bounds, rng: np.random.Generator) -> np.ndarray:
    """Bounded polynomial mutation (Deb and Goyal) applied per variable to every row."""
    X = np.array(np.atleast_2d(X), dtype=float)
    lo, hi = (np.broadcast_to(np.asarray(b, dtype=float), X.shape) for b in bounds)
    rate = params.mutation_rate(X.shape[1])
    mutate = rng.random(X.shape) <= rate
    rnd = rng.random(X.shape)
    mutate &= hi > lo
    if not mutate.any():
        return X
    y, yl, yu, r = X[mutate], lo[mutate], hi[mutate], rnd[mutate]
    span = yu - yl
    eta = params.mutation_dist_index
    mut_pow = 1.0 / (eta + 1.0)
    val_low = 2.0 * r + (1.0 - 2.0 * r) * np.power(1.0 - (y - yl) / span, eta + 1.0)
    val_high = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * np.power(1.0 - (yu - y) / span, eta + 1.0)
    deltaq = np.where(r <= 0.5, np.power(val_low, mut_pow) - 1.0, 1.0 - np.power(val_high, mut_pow))
    X[mutate] = np.clip(y + deltaq * span, yl, yu)
    return X


def polynomial_mutation(x, params: Nsga2Params, bounds, rng: np.random.Generator) -> np.ndarray:
    return mutation_batch(np.asarray(x, dtype=float)[None, :], params, bounds, rng)[0]


def _tournament(pop: Population, ranks: np.ndarray, crowd: np.ndarray, rng: np.random.Generator, k: int) -> np.ndarray:
    """Binary tournaments: lower rank wins, then larger crowding, then a coin flip."""
    a = rng.integers(len(pop), size=k)
    b = rng.integers(len(pop), size=k)
    coin = rng.random(k) < 0.5
    a_wins = (ranks[a] < ranks[b]) | ((ranks[a] == ranks[b]) & ((crowd[a] > crowd[b]) | ((crowd[a] == crowd[b]) & coin)))
    return np.where(a_wins, a, b)


def _rank_and_crowding(pop: Population) -> tuple[np.ndarray, np.ndarray]:
    ranks = np.empty(len(pop), dtype=int)
    crowd = np.empty(len(pop))
    for r, front in enumerate(fast_nondominated_sort(pop.F, pop.cv)):
        ranks[front] = r
        crowd[front] = crowding_distance(pop.F[front])
    return ranks, crowd


def make_offspring(pop: Population, params: Nsga2Params, bounds, rng: np.random.Generator) -> np.ndarray:
    # ranks follow constraint-domination, so tournaments prefer feasible and less violating parents
    ranks, crowd = _rank_and_crowding(pop)
    mates = _tournament(pop, ranks, crowd, rng, params.pop_size)
    C1, C2 = sbx_batch(pop.X[mates[0::2]], pop.X[mates[1::2]], params, bounds, rng)
    kids = np.empty((params.pop_size, pop.X.shape[1]))
    kids[0::2], kids[1::2] = C1, C2
    return mutation_batch(kids, params, bounds, rng)


def nsga2_run(scenario: Scenario, params: Nsga2Params = Nsga2Params()) -> SolveResult:
    """Run NSGA-II with (mu + lambda) survival for ``params.max_gens`` generations."""
    rng = np.random.default_rng(params.seed)
    bnds = variable_bounds(scenario)
    pop = initial_population(scenario, params.pop_size, rng, params.n_threads)
    telemetry = []
    for gen in range(1, params.max_gens + 1):
        kids = evaluate_population(make_offspring(pop, params, bnds, rng), scenario, params.n_threads)
        pool = Population.concat([pop, kids])
        pop = pool.take(prune(pool.F, pool.cv, params.pop_size))
        feas = pop.cv == 0
        front_size = int(nondominated_mask(pop.F[feas]).sum()) if feas.any() else 0
        telemetry.append(IterationStats(gen, int(feas.sum()), front_size, front_size, float(pop.cv.min())))
    front = feasible_front(pop)
    return SolveResult(front=front, population=pop, archive=FrontArchive(front.X.copy(), front.F.copy()), telemetry=telemetry)
