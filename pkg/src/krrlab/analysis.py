"""Error measurement, per-n aggregation, and power-law rate fitting.

The generalization error of a fitted model is the L^2(0, 1) distance to the
target, estimated by composite Simpson quadrature on a uniform grid.  Trial
errors are aggregated per sample size (mean, sample standard deviation,
mean squared error) and the convergence rate is the slope of an ordinary
least-squares fit in log-log coordinates.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .krr import KrrModel, predict
from .targets import SeriesTarget, eval_target

__all__ = [
    "TrialRecord",
    "SummaryRow",
    "SweepSummary",
    "RateFit",
    "default_quadrature_points",
    "simpson_weights",
    "simpson_integral",
    "l2_norm_simpson",
    "l2_error_simpson",
    "summarize",
    "fit_power_law",
    "fit_rate",
]


@dataclass(frozen=True)
class TrialRecord:
    """One fitted trial: sample size, trial index, lambda used, L^2 error."""

    n: int
    trial: int
    lam: float
    error_l2: float

    def __post_init__(self):
        if self.error_l2 < 0.0 or self.lam <= 0.0:
            raise ValueError("error_l2 must be >= 0 and lambda > 0")


@dataclass(frozen=True)
class SummaryRow:
    n: int
    mean_error: float
    std_error: float
    mean_sq_error: float
    trials: int


@dataclass(frozen=True)
class SweepSummary:
    """Per-n aggregates, rows sorted by n ascending."""

    rows: tuple[SummaryRow, ...]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(row, name) for row in self.rows])


@dataclass(frozen=True)
class RateFit:
    """log(err) = slope * log(n) + intercept, with RMS fit residual."""

    slope: float
    intercept: float
    rms_residual: float


def default_quadrature_points(n_max: int) -> int:
    """Grid size 10 * n_max + 1, bumped to the next odd integer if needed."""
    points = 10 * n_max + 1
    return points if points % 2 == 1 else points + 1


def simpson_weights(points: int) -> np.ndarray:
    """Composite Simpson weights on the uniform grid over [0, 1] (h/3 included)."""
    if points < 3 or points % 2 == 0:
        raise ValueError(f"composite Simpson needs an odd number of points >= 3, got {points}")
    w = np.ones(points)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * (points - 1))


def simpson_integral(fn: Callable[[np.ndarray], np.ndarray], points: int) -> float:
    """Composite Simpson estimate of int_0^1 fn(x) dx on a uniform grid."""
    grid = np.linspace(0.0, 1.0, points)
    return float(simpson_weights(points) @ np.asarray(fn(grid), dtype=np.float64))


def l2_norm_simpson(fn: Callable[[np.ndarray], np.ndarray], points: int) -> float:
    """sqrt of the Simpson estimate of int_0^1 fn(x)**2 dx."""
    return float(np.sqrt(max(simpson_integral(lambda x: np.asarray(fn(x)) ** 2, points), 0.0)))


def l2_error_simpson(model: KrrModel, target: SeriesTarget, points: int) -> float:
    """L^2(0, 1) distance between the fitted predictor and the target."""
    return l2_norm_simpson(lambda x: predict(model, x) - eval_target(target, x), points)


def summarize(records: Iterable[TrialRecord]) -> SweepSummary:
    """Aggregate trial records per n; input order is irrelevant.

    Records are sorted by (n, trial) before accumulation, so any permutation
    of the same records produces a bit-identical summary.  Standard
    deviations use the n - 1 denominator and need >= 2 trials per n.
    """
    ordered = sorted(records, key=lambda r: (r.n, r.trial))
    groups: dict[int, list[float]] = defaultdict(list)
    for rec in ordered:
        groups[rec.n].append(rec.error_l2)
    rows = []
    for n in sorted(groups):
        errs = np.array(groups[n])
        if errs.size < 2:
            raise ValueError(f"need >= 2 trials per n for a standard deviation, n={n} has {errs.size}")
        rows.append(SummaryRow(
            n=n,
            mean_error=float(np.mean(errs)),
            std_error=float(np.std(errs, ddof=1)),
            mean_sq_error=float(np.mean(errs ** 2)),
            trials=int(errs.size),
        ))
    return SweepSummary(rows=tuple(rows))


def fit_power_law(n_values: Sequence[float], values: Sequence[float]) -> RateFit:
    """Ordinary least squares of log(values) on log(n_values)."""
    ns = np.asarray(n_values, dtype=np.float64)
    vals = np.asarray(values, dtype=np.float64)
    if np.unique(ns).size < 2:
        raise ValueError("need at least 2 distinct n to fit a rate")
    if np.any(vals <= 0.0):
        raise ValueError("all values must be positive for a log-log fit")
    design = np.column_stack([np.log(ns), np.ones(ns.size)])
    coef, *_ = np.linalg.lstsq(design, np.log(vals), rcond=None)
    residual = design @ coef - np.log(vals)
    return RateFit(
        slope=float(coef[0]),
        intercept=float(coef[1]),
        rms_residual=float(np.sqrt(np.mean(residual ** 2))),
    )


def fit_rate(summary: SweepSummary) -> RateFit:
    """Rate fit of the mean (RMS-convention) errors against n."""
    return fit_power_law(summary.column("n"), summary.column("mean_error"))
