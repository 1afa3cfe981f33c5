"""Scaling reports: (parameter, measurement) rows with fitted log-log slopes.

Every scaling experiment emits a ScalingReport; the slope is an ordinary
least-squares fit of log(value) against log(parameter), with a 95% bootstrap
confidence half-width when per-trial data are available and a residual-based
one otherwise.  CSV serialization uses 17 significant digits so outputs are
bit-stable golden files.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = [format_float(c) if isinstance(c, float) else str(c) for c in row]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def fit_loglog(params, values) -> tuple:
    """OLS slope and intercept of log(values) vs log(params).

    A single point carries no slope information: slope 0 with the intercept
    at the point (callers pair this with an infinite confidence width).
    """
    x = np.log(np.asarray(params, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    if x.size == 0:
        raise ValueError("need at least one point")
    if x.size == 1:
        return 0.0, float(y[0])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def bootstrap_slope_ci(params, trial_values, seed: int, n_boot: int = 500) -> float:
    """95% half-width of the slope under bootstrap resampling of trials.

    trial_values[i] holds the per-trial measurements at params[i]; each
    bootstrap replicate resamples trials independently per parameter and
    refits the slope on the resampled means.
    """
    params = np.asarray(params, dtype=float)
    mats = [np.asarray(v, dtype=float) for v in trial_values]
    if params.size < 2 or any(m.size < 2 for m in mats):
        return float("inf")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0xB007,)))
    logs = np.log(params)
    slopes = np.empty(n_boot)
    for b in range(n_boot):
        means = np.array([m[rng.integers(0, m.size, m.size)].mean() for m in mats])
        slopes[b] = np.polyfit(logs, np.log(means), 1)[0]
    lo, hi = np.percentile(slopes, [2.5, 97.5])
    return float((hi - lo) / 2.0)


def ols_slope_ci(params, values) -> float:
    """Residual-based 95% half-width for the OLS slope (no trial data)."""
    x = np.log(np.asarray(params, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    n = x.size
    if n < 3:
        return float("inf")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    s2 = resid @ resid / (n - 2)
    se = np.sqrt(s2 / np.sum((x - x.mean()) ** 2))
    # two-sided 97.5% Student t quantiles for n-2 in 1..8
    t975 = {1: 12.706, 2: 4.303, 3: 3.182, 4: 2.776, 5: 2.571, 6: 2.447, 7: 2.365, 8: 2.306}
    return float(se * t975.get(n - 2, 2.0))


@dataclass(frozen=True)
class ScalingReport:
    """Rows of (parameter, measured value, stderr) plus the fitted exponent."""

    rows: tuple
    slope: float
    slope_ci: float
    seed: int
    label: str = ""

    def __post_init__(self):
        if len(self.rows) == 0:
            raise ValueError("a scaling report needs at least one row")
        if not np.isfinite(self.slope):
            raise ValueError(f"fitted slope must be finite, got {self.slope}")

    @property
    def params(self) -> np.ndarray:
        return np.array([r[0] for r in self.rows], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows], dtype=float)

    def csv_rows(self, experiment: Optional[str] = None):
        name = experiment if experiment is not None else self.label
        return [(name, float(p), float(v), float(e)) for (p, v, e) in self.rows]


def make_report(params, values, stderrs, slope_ci: float, seed: int, label: str = "") -> ScalingReport:
    slope, _ = fit_loglog(params, values)
    rows = tuple((float(p), float(v), float(e)) for p, v, e in zip(params, values, stderrs))
    return ScalingReport(rows=rows, slope=slope, slope_ci=slope_ci, seed=seed, label=label)
