"""CSV interchange format for fronts.

One row per solution: decision columns ``x1_1, x2_1, x3_1, ..., x3_T``, then
``cost, pec, cde`` and ``violation``. Numbers are written with 12
significant digits. External tools (other optimizers) can emit the same
layout; files without decision columns are accepted on input.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

OBJECTIVE_COLUMNS = ("cost", "pec", "cde")
DIGITS = 12


def fmt(v: float) -> str:
    return f"{float(v):.{DIGITS}g}"


def rounded(a) -> np.ndarray:
    """Values exactly as they read back after a CSV round trip."""
    return np.vectorize(lambda v: float(fmt(v)), otypes=[float])(np.asarray(a, dtype=float))


@dataclass
class FrontData:
    X: np.ndarray
    F: np.ndarray
    violation: np.ndarray

    def __len__(self) -> int:
        return len(self.F)


def decision_columns(n_periods: int) -> list[str]:
    return [f"x{k}_{t}" for t in range(1, n_periods + 1) for k in (1, 2, 3)]


def front_csv(X: np.ndarray, F: np.ndarray, violation=None) -> str:
    F = np.asarray(F, dtype=float).reshape(-1, 3)
    X = np.asarray(X, dtype=float)
    X = X if X.ndim == 2 else X.reshape(len(F), -1)
    violation = np.zeros(len(F)) if violation is None else np.asarray(violation, dtype=float)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(decision_columns(X.shape[1] // 3) + list(OBJECTIVE_COLUMNS) + ["violation"])
    for x, f, v in zip(X, F, violation):
        writer.writerow([fmt(t) for t in x] + [fmt(t) for t in f] + [fmt(v)])
    return buf.getvalue()


def write_front_csv(path: str | Path, X: np.ndarray, F: np.ndarray, violation=None) -> None:
    Path(path).write_text(front_csv(X, F, violation))


def read_front_csv(path: str | Path) -> FrontData:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        missing = [c for c in OBJECTIVE_COLUMNS if c not in header]
        if missing:
            raise ValueError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = [r for r in reader if r]
    xcols = [i for i, h in enumerate(header) if h.startswith("x")]
    fcols = [header.index(c) for c in OBJECTIVE_COLUMNS]
    vcol = header.index("violation") if "violation" in header else None
    try:
        data = np.array([[float(v) for v in r] for r in rows], dtype=float).reshape(len(rows), len(header))
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    return FrontData(
        X=data[:, xcols],
        F=data[:, fcols],
        violation=data[:, vcol] if vcol is not None else np.zeros(len(rows)),
    )
