"""Front quality indicators and the grid brute-force Pareto oracle."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Scenario, bounds, evaluate
from .moea import FrontArchive, nondominated_mask

HV_REFERENCE = 1.1


@dataclass(frozen=True)
class IndicatorReport:
    hv: float
    spread: float
    n_solutions: int


def clean_front(F: np.ndarray, cv: np.ndarray | None = None) -> np.ndarray:
    """Feasible, distinct, non-dominated rows of ``F`` in lexicographic order."""
    F = np.asarray(F, dtype=float).reshape(-1, 3) if np.size(F) else np.empty((0, 3))
    if cv is not None:
        F = F[np.asarray(cv, dtype=float) == 0]
    if len(F) == 0:
        return F
    F = np.unique(F, axis=0)
    return F[nondominated_mask(F)]


def joint_bounds(fronts: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise (ideal, nadir) over the union of several fronts."""
    stacked = np.vstack([np.asarray(f, dtype=float) for f in fronts if len(f)])
    return stacked.min(axis=0), stacked.max(axis=0)


def normalize_front(front: np.ndarray, ideal, nadir) -> np.ndarray:
    """Min-max scale to ``[0, 1]``; an axis with ``nadir == ideal`` maps to 0."""
    front = np.asarray(front, dtype=float)
    ideal = np.asarray(ideal, dtype=float)
    span = np.asarray(nadir, dtype=float) - ideal
    ok = span > 0
    scaled = np.where(ok, (front - ideal) / np.where(ok, span, 1.0), 0.0)
    return np.clip(scaled, 0.0, 1.0)


def _hv2d(P: np.ndarray, ref: np.ndarray) -> float:
    order = np.argsort(P[:, 0], kind="stable")
    x = P[order, 0]
    y = np.minimum.accumulate(P[order, 1])
    widths = np.diff(np.append(x, ref[0]))
    return float(np.sum(widths * (ref[1] - y)))


def hypervolume(front: np.ndarray, ref_point=(HV_REFERENCE,) * 3) -> float:
    """Exact hypervolume dominated by ``front`` and bounded by ``ref_point``.

    Two- and three-objective fronts are supported. In three objectives the
    volume is swept slab by slab along the last objective, each slab adding
    the 2-D area of every point at or below it. Points that do not dominate
    the reference point are dropped with a warning.
    """
    P = np.asarray(front, dtype=float)
    ref = np.asarray(ref_point, dtype=float)
    if P.size == 0:
        return 0.0
    P = P.reshape(-1, len(ref))
    if len(ref) not in (2, 3):
        raise ValueError("hypervolume supports 2 or 3 objectives")
    outside = np.any(P > ref, axis=1)
    if outside.any():
        warnings.warn(f"{int(outside.sum())} point(s) beyond the reference point ignored", RuntimeWarning, stacklevel=2)
    P = P[~outside & np.all(P < ref, axis=1)]
    if len(P) == 0:
        return 0.0
    if len(ref) == 2:
        return _hv2d(P, ref)
    P = np.unique(P, axis=0)
    P = P[np.argsort(P[:, 2], kind="stable")]
    z = np.append(P[:, 2], ref[2])
    volume = 0.0
    for i in range(len(P)):
        depth = z[i + 1] - z[i]
        if depth > 0:
            volume += _hv2d(P[: i + 1, :2], ref[:2]) * depth
    return volume


def spread_extremes(reference_front: np.ndarray) -> np.ndarray:
    """For every objective, the reference point with the largest value in it."""
    R = np.asarray(reference_front, dtype=float)
    rows = []
    for j in range(R.shape[1]):
        order = np.lexsort(np.vstack([R.T[::-1], R[:, j]]))
        rows.append(R[order[-1]])
    return np.array(rows)


def _nearest_distances(A: np.ndarray, B: np.ndarray, exclude_self: bool = False) -> np.ndarray:
    d = np.sqrt(((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2))
    if exclude_self:
        np.fill_diagonal(d, np.inf)
    return d.min(axis=1)


def generalized_spread(front: np.ndarray, extremes: np.ndarray) -> float:
    """Diversity of ``front`` relative to the reference ``extremes``; lower is better.

    The numerator adds the distances from each extreme to its closest front
    member and the absolute deviations of nearest-neighbour distances from
    their mean. The denominator adds the extreme distances and ``n`` times
    the mean. A front collapsed onto its extremes (zero denominator) scores 1.
    """
    F = np.asarray(front, dtype=float)
    E = np.asarray(extremes, dtype=float)
    if len(F) < 2:
        raise ValueError("spread needs at least two solutions")
    d_ext = float(_nearest_distances(E, F).sum())
    d = _nearest_distances(F, F, exclude_self=True)
    mean = float(d.mean())
    denom = d_ext + len(F) * mean
    if denom == 0:
        return 1.0
    return (d_ext + float(np.abs(d - mean).sum())) / denom


def indicator_report(front: np.ndarray, ideal, nadir, extremes: np.ndarray, ref=HV_REFERENCE) -> IndicatorReport:
    """HV and spread of a raw front after normalizing with ``(ideal, nadir)``.

    ``extremes`` must already be normalized. Spread of a single-point front
    is reported as NaN.
    """
    N = normalize_front(front, ideal, nadir)
    m = N.shape[1] if N.ndim == 2 else 3
    hv = hypervolume(N, (ref,) * m)
    spread = generalized_spread(N, extremes) if len(N) >= 2 else float("nan")
    return IndicatorReport(hv=hv, spread=spread, n_solutions=len(N))


def brute_force_front(scenario: Scenario, resolution: int = 64, chunk: int = 1 << 16) -> FrontArchive:
    """Feasible non-dominated set over a regular grid of the decision box.

    Only single-period scenarios are supported. Each variable takes
    ``resolution`` evenly spaced values between its bounds (both included).
    """
    if scenario.n_periods != 1:
        raise ValueError(f"the grid oracle needs a single-period scenario, got {scenario.n_periods} periods")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    lo, hi = bounds(scenario)
    axes = [np.unique(np.linspace(lo[j], hi[j], resolution)) for j in range(3)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    keep_X, keep_F = [], []
    for start in range(0, len(grid), chunk):
        X = grid[start : start + chunk]
        F, V = evaluate(X, scenario)
        feas = V.sum(axis=1) == 0
        X, F = X[feas], F[feas]
        if len(F):
            nd = nondominated_mask(F)
            keep_X.append(X[nd])
            keep_F.append(F[nd])
    if not keep_F:
        return FrontArchive(np.empty((0, 3)), np.empty((0, 3)))
    X, F = np.vstack(keep_X), np.vstack(keep_F)
    # same selection rule as solver fronts: one member per objective vector
    from .gde3 import Population, feasible_front

    return feasible_front(Population(X, F, np.zeros((len(F), 2))))
