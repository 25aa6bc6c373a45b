"""Multi-seed experiment plumbing shared by the CLI and the acceptance suite."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .gde3 import SolveResult, SolverParams, run as gde3_run
from .metrics import IndicatorReport, clean_front, indicator_report, joint_bounds, normalize_front, spread_extremes
from .model import Scenario
from .nsga2 import Nsga2Params, nsga2_run
from .stats import WilcoxonResult, wilcoxon_signed_rank

ALGORITHMS = ("bcs-gde", "nsga2")


def make_params(algorithm: str, seed: int, overrides: Mapping | None = None):
    overrides = dict(overrides or {})
    overrides["seed"] = seed
    if algorithm == "bcs-gde":
        if "max_gens" in overrides:
            overrides["max_iters"] = overrides.pop("max_gens")
        return SolverParams(**overrides)
    if algorithm == "nsga2":
        if "max_iters" in overrides:
            overrides["max_gens"] = overrides.pop("max_iters")
        return Nsga2Params(**overrides)
    raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")


def run_algorithm(scenario: Scenario, algorithm: str, seed: int, overrides: Mapping | None = None) -> SolveResult:
    params = make_params(algorithm, seed, overrides)
    if algorithm == "bcs-gde":
        return gde3_run(scenario, params)
    return nsga2_run(scenario, params)


def _job(args) -> tuple[str, int, SolveResult]:
    scenario, algorithm, seed, overrides = args
    return algorithm, seed, run_algorithm(scenario, algorithm, seed, overrides)


def run_batch(jobs: Sequence[tuple[Scenario, str, int, Mapping | None]], workers: int = 1) -> list[tuple[str, int, SolveResult]]:
    """Run independent solver jobs, in worker processes when ``workers > 1``.

    Results come back in job order regardless of completion order.
    """
    if workers <= 1 or len(jobs) <= 1:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_job, jobs))


@dataclass
class Comparison:
    algorithms: list[str]
    seeds: list[int]
    reports: dict[str, list[IndicatorReport]]
    ideal: np.ndarray
    nadir: np.ndarray
    wilcoxon: list[dict] = field(default_factory=list)

    def values(self, algorithm: str, indicator: str) -> np.ndarray:
        return np.array([getattr(r, indicator) for r in self.reports[algorithm]], dtype=float)

    def summary_rows(self) -> list[dict]:
        """Max / min / mean of each indicator per algorithm."""
        rows = []
        for indicator in ("hv", "spread"):
            for name in self.algorithms:
                v = self.values(name, indicator)
                v = v[np.isfinite(v)]
                stats = (float(v.max()), float(v.min()), float(v.mean())) if len(v) else (math.nan,) * 3
                rows.append({"indicator": indicator, "algorithm": name, "max": stats[0], "min": stats[1], "ave": stats[2]})
        return rows


def _wilcoxon_record(res: WilcoxonResult) -> dict:
    return {
        "p_value": res.p_value,
        "defined": res.defined,
        "w_plus": res.w_plus,
        "w_minus": res.w_minus,
        "n": res.n,
        "method": res.method,
        "alternative": res.alternative,
    }


def compare_fronts(fronts: Mapping[str, Sequence[np.ndarray]], seeds: Sequence[int] | None = None) -> Comparison:
    """Indicators of every run on a common scale, plus pairwise Wilcoxon tests.

    ``fronts`` maps algorithm name to one objective array per seed, each
    already restricted to feasible solutions. Fronts are cleaned (distinct,
    non-dominated), normalized by the ideal and nadir of their union, and
    scored against the reference point (1.1, 1.1, 1.1). Spread extremes come
    from the non-dominated union of all fronts.

    For each ordered pair (A, B) the HV test asks whether A's HV is greater
    and the spread test whether A's spread is smaller.
    """
    names = list(fronts)
    if len(names) < 2:
        raise ValueError("a comparison needs at least two algorithms")
    counts = {n: len(fronts[n]) for n in names}
    if len(set(counts.values())) != 1:
        raise ValueError(f"mismatched seed counts across algorithms: {counts}")
    n_runs = counts[names[0]]
    seeds = list(seeds) if seeds is not None else list(range(1, n_runs + 1))
    cleaned = {n: [clean_front(f) for f in fronts[n]] for n in names}
    all_fronts = [f for n in names for f in cleaned[n] if len(f)]
    if not all_fronts:
        raise ValueError("no feasible solutions in any front")
    ideal, nadir = joint_bounds(all_fronts)
    reference = clean_front(np.vstack(all_fronts))
    extremes = spread_extremes(normalize_front(reference, ideal, nadir))
    reports = {
        n: [indicator_report(f, ideal, nadir, extremes) if len(f) else IndicatorReport(0.0, math.nan, 0) for f in cleaned[n]]
        for n in names
    }
    comp = Comparison(names, seeds, reports, ideal, nadir)
    for a, b in itertools.permutations(names, 2):
        record = {"a": a, "b": b}
        for indicator, alternative in (("hv", "greater"), ("spread", "less")):
            va, vb = comp.values(a, indicator), comp.values(b, indicator)
            ok = np.isfinite(va) & np.isfinite(vb)
            record[indicator] = _wilcoxon_record(wilcoxon_signed_rank(va[ok], vb[ok], alternative=alternative))
        comp.wilcoxon.append(record)
    return comp


def comparison_table(comp: Comparison) -> list[dict]:
    rows = []
    for name in comp.algorithms:
        for seed, rep in zip(comp.seeds, comp.reports[name]):
            rows.append({"algorithm": name, "seed": seed, **asdict(rep)})
    return rows
