"""Dominance relations, non-dominated sorting, crowding and pruning.

Sorting and pruning work on plain arrays: ``F`` of shape ``(n, m)`` holds
objective vectors (all minimized) and ``cv`` of shape ``(n,)`` holds total
constraint violation, zero meaning feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .model import ObjectiveVector, ViolationMeasure


@dataclass(frozen=True)
class Individual:
    decision: np.ndarray
    objectives: ObjectiveVector
    violation: ViolationMeasure

    @property
    def feasible(self) -> bool:
        return self.violation.total == 0

    @classmethod
    def from_arrays(cls, x, f, v) -> "Individual":
        return cls(
            decision=np.array(x, dtype=float),
            objectives=ObjectiveVector(*(float(t) for t in f)),
            violation=ViolationMeasure(*(float(t) for t in v)),
        )


def _objectives(a) -> np.ndarray:
    if isinstance(a, Individual):
        return np.asarray(a.objectives, dtype=float)
    return np.asarray(a, dtype=float)


def dominates(a, b) -> bool:
    """Pareto dominance for minimization; accepts Individuals or vectors."""
    fa, fb = _objectives(a), _objectives(b)
    return bool(np.all(fa <= fb) and np.any(fa < fb))


def constraint_dominates(a: Individual, b: Individual) -> bool:
    """Feasible beats infeasible, lower total violation beats higher,
    and two feasible solutions compare by Pareto dominance."""
    va, vb = a.violation.total, b.violation.total
    if va == 0 and vb == 0:
        return dominates(a, b)
    if va == 0:
        return True
    if vb == 0:
        return False
    return va < vb


def _relations(A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise ``(all(A_i <= B_j), any(A_i < B_j))`` as two boolean matrices."""
    le = A[:, None, 0] <= B[None, :, 0]
    lt = A[:, None, 0] < B[None, :, 0]
    for j in range(1, A.shape[1]):
        le &= A[:, None, j] <= B[None, :, j]
        lt |= A[:, None, j] < B[None, :, j]
    return le, lt


def dominance_matrix(F: np.ndarray) -> np.ndarray:
    """``D[i, j]`` is True when row ``i`` Pareto-dominates row ``j``."""
    F = np.asarray(F, dtype=float)
    le, lt = _relations(F, F)
    return le & lt


def constraint_dominance_matrix(F: np.ndarray, cv: np.ndarray | None = None) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    D = dominance_matrix(F)
    if cv is None:
        return D
    cv = np.asarray(cv, dtype=float)
    feas = cv == 0
    both = feas[:, None] & feas[None, :]
    infeas_pair = ~feas[:, None] & ~feas[None, :]
    return np.where(
        both,
        D,
        (feas[:, None] & ~feas[None, :]) | (infeas_pair & (cv[:, None] < cv[None, :])),
    )


def fast_nondominated_sort(F: np.ndarray, cv: np.ndarray | None = None) -> list[np.ndarray]:
    """Partition indices into fronts under constraint-domination.

    Returns a list of index arrays, front 0 first, each sorted ascending.
    """
    F = np.asarray(F, dtype=float)
    n = len(F)
    if n == 0:
        return []
    D = constraint_dominance_matrix(F, cv)
    dominated_by = D.sum(axis=0)
    remaining = np.ones(n, dtype=bool)
    fronts = []
    while remaining.any():
        current = np.flatnonzero(remaining & (dominated_by == 0))
        fronts.append(current)
        remaining[current] = False
        dominated_by = dominated_by - D[current].sum(axis=0)
    return fronts


def nondominated_ranks(F: np.ndarray, cv: np.ndarray | None = None) -> np.ndarray:
    ranks = np.empty(len(F), dtype=int)
    for r, front in enumerate(fast_nondominated_sort(F, cv)):
        ranks[front] = r
    return ranks


def nondominated_mask(F: np.ndarray) -> np.ndarray:
    """Mask of non-dominated rows; exact duplicates are all kept.

    Small sets use the full dominance matrix. Large ones are culled
    sequentially from the smallest objective sum, which stays cheap when the
    front is small relative to the set.
    """
    F = np.asarray(F, dtype=float)
    n = len(F)
    if n <= 512:
        return ~dominance_matrix(F).any(axis=0) if n else np.zeros(0, dtype=bool)
    keep = np.zeros(n, dtype=bool)
    # lexicographic pre-order breaks floating ties in the sums correctly
    order = np.lexsort(F.T[::-1])
    order = order[np.argsort(F[order].sum(axis=1), kind="stable")]
    alive = order
    while alive.size:
        p = alive[0]
        keep[p] = True
        rest = F[alive[1:]]
        dominated = np.all(F[p] <= rest, axis=1) & np.any(F[p] < rest, axis=1)
        alive = alive[1:][~dominated]
    return keep


def crowding_distance(F: np.ndarray) -> np.ndarray:
    """NSGA-II crowding distance of the members of one front.

    Boundary members of every objective get ``inf``; an objective with zero
    range contributes nothing to interior members.
    """
    F = np.asarray(F, dtype=float)
    n, m = F.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for j in range(m):
        order = np.argsort(F[:, j], kind="stable")
        col = F[order, j]
        span = col[-1] - col[0]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def prune(F: np.ndarray, cv: np.ndarray | None, n: int) -> np.ndarray:
    """Indices (ascending) of the ``n`` survivors of rank-then-crowding selection.

    Whole fronts are taken in rank order; the front that does not fit is cut
    by descending crowding distance, ties going to the earlier index.
    """
    F = np.asarray(F, dtype=float)
    if n > len(F):
        raise ValueError(f"cannot keep {n} members of a population of {len(F)}")
    chosen: list[np.ndarray] = []
    room = n
    for front in fast_nondominated_sort(F, cv):
        if room == 0:
            break
        if len(front) <= room:
            chosen.append(front)
            room -= len(front)
            continue
        cd = crowding_distance(F[front])
        order = np.lexsort((front, -cd))
        chosen.append(front[order[:room]])
        room = 0
    if not chosen:
        return np.array([], dtype=int)
    return np.sort(np.concatenate(chosen))


@dataclass
class FrontArchive:
    """Mutually non-dominated feasible solutions.

    Members with identical objective vectors are treated as one point: the
    first one inserted is kept.
    """

    X: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    F: np.ndarray = field(default_factory=lambda: np.empty((0, 3)))

    def __len__(self) -> int:
        return len(self.F)

    def __iter__(self) -> Iterator[Individual]:
        return iter(self.members)

    @property
    def members(self) -> list[Individual]:
        return [Individual.from_arrays(x, f, (0.0, 0.0)) for x, f in zip(self.X, self.F)]

    @classmethod
    def from_individuals(cls, members: Sequence[Individual]) -> "FrontArchive":
        archive = cls()
        for ind in members:
            archive.insert(ind)
        return archive

    def insert(self, ind: Individual) -> bool:
        """Add a feasible solution; return True if it entered the archive."""
        if not ind.feasible:
            return False
        return self.extend(np.asarray(ind.decision)[None, :], np.asarray(ind.objectives)[None, :]) > 0

    def extend(self, X: np.ndarray, F: np.ndarray) -> int:
        """Merge a batch of feasible solutions; return how many were accepted."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        F = np.atleast_2d(np.asarray(F, dtype=float))
        if len(F) == 0:
            return 0
        if len(self.F) == 0:
            self.X = np.empty((0, X.shape[1]))
        # de-duplicate the batch against itself, first occurrence wins
        _, first = np.unique(F, axis=0, return_index=True)
        first = np.sort(first)
        X, F = X[first], F[first]
        batch_keep = nondominated_mask(F)
        X, F = X[batch_keep], F[batch_keep]
        if len(self.F):
            le, lt = _relations(self.F, F)
            rejected = le.any(axis=0)  # dominated by or equal to a member
            X, F = X[~rejected], F[~rejected]
            if len(F) == 0:
                return 0
            le, lt = _relations(F, self.F)
            evicted = (le & lt).any(axis=0)
            self.X = self.X[~evicted]
            self.F = self.F[~evicted]
        self.X = np.vstack([self.X, X])
        self.F = np.vstack([self.F, F])
        return len(F)
