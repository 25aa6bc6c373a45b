"""Wilcoxon signed-rank test with an exact null distribution for small samples."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm, rankdata

EXACT_MAX_N = 25
ALTERNATIVES = ("two-sided", "greater", "less")


@dataclass(frozen=True)
class WilcoxonResult:
    """Outcome of a paired signed-rank test on ``x - y``.

    ``p_value`` is None when every difference is zero, in which case the
    test is undefined.
    """

    w_plus: float
    w_minus: float
    n: int
    p_value: float | None
    method: str
    alternative: str

    @property
    def defined(self) -> bool:
        return self.p_value is not None

    @property
    def statistic(self) -> float:
        if self.alternative == "two-sided":
            return min(self.w_plus, self.w_minus)
        return self.w_plus


def signed_rank_null_counts(ranks: np.ndarray) -> tuple[np.ndarray, int]:
    """Number of sign patterns giving each value of ``2 * W+``.

    Ranks may be half-integers (average ranks of ties), hence the doubling.
    Counts are exact integers accumulated by dynamic programming over ranks,
    equivalent to enumerating all ``2**n`` sign assignments.
    """
    doubled = np.rint(2 * np.asarray(ranks, dtype=float)).astype(int)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled:
        counts[r:] = counts[r:] + counts[: total + 1 - r].copy()
    return counts, total


def _exact_p(ranks: np.ndarray, w_plus: float, alternative: str) -> float:
    counts, _ = signed_rank_null_counts(ranks)
    denom = float(2 ** len(ranks))
    k = int(round(2 * w_plus))
    p_greater = counts[k:].sum() / denom
    p_less = counts[: k + 1].sum() / denom
    if alternative == "greater":
        return float(p_greater)
    if alternative == "less":
        return float(p_less)
    return float(min(1.0, 2 * min(p_greater, p_less)))


def _normal_p(ranks: np.ndarray, w_plus: float, alternative: str) -> float:
    n = len(ranks)
    mean = n * (n + 1) / 4.0
    _, tie_sizes = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(tie_sizes**3 - tie_sizes)) / 48.0
    sd = math.sqrt(var)
    p_greater = float(norm.sf((w_plus - mean - 0.5) / sd))
    p_less = float(norm.cdf((w_plus - mean + 0.5) / sd))
    if alternative == "greater":
        return p_greater
    if alternative == "less":
        return p_less
    return min(1.0, 2 * min(p_greater, p_less))


def wilcoxon_signed_rank(x, y=None, alternative: str = "two-sided", method: str = "auto") -> WilcoxonResult:
    """Paired Wilcoxon signed-rank test.

    Args:
        x: First sample, or the paired differences when ``y`` is None.
        y: Second sample, paired with ``x``.
        alternative: ``"greater"`` tests whether ``x - y`` tends to be
            positive, ``"less"`` whether it tends to be negative.
        method: ``"exact"``, ``"approx"`` (normal with continuity and tie
            corrections) or ``"auto"``, which is exact for up to 25 non-zero
            differences.

    Zero differences are discarded and tied magnitudes get average ranks.
    """
    if alternative not in ALTERNATIVES:
        raise ValueError(f"alternative must be one of {ALTERNATIVES}")
    if method not in ("auto", "exact", "approx"):
        raise ValueError("method must be 'auto', 'exact' or 'approx'")
    x = np.asarray(x, dtype=float)
    d = x if y is None else x - np.asarray(y, dtype=float)
    if d.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    d = d[d != 0]
    n = len(d)
    if n == 0:
        return WilcoxonResult(0.0, 0.0, 0, None, "undefined", alternative)
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    if method == "auto":
        method = "exact" if n <= EXACT_MAX_N else "approx"
    p = _exact_p(ranks, w_plus, alternative) if method == "exact" else _normal_p(ranks, w_plus, alternative)
    return WilcoxonResult(w_plus, w_minus, n, p, method, alternative)
