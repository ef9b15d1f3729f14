"""Render the log-log error decay figure from krrlab output files.

The plotter is a pure renderer: the mean curve and one-standard-deviation
band come straight out of ``summary.csv``, and the dashed fitted line and
slope annotation come out of ``rate_report.txt``. Nothing is refitted
here, so the figure always agrees with the numbers the experiment wrote.
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["SchemaError", "PlotSpec", "RenderResult", "SummaryTable", "RateReport",
           "load_summary", "load_rate_report", "annotation_text", "render_decay_plot"]

SUMMARY_COLUMNS = ["n", "mean_error", "std_error", "mean_sq_error", "trials"]
REPORT_KEYS = ["r_squared_error", "r_rms_error", "intercept_b"]

FIGSIZE = (6.4, 4.8)
DPI = 120


class SchemaError(ValueError):
    """Input file does not conform to the krrlab output schema."""


@dataclass(frozen=True)
class PlotSpec:
    summary_path: str
    rate_report_path: str
    output_path: str
    title: str = "KRR error decay"
    xlabel: str = "sample size n"
    ylabel: str = "L2 error"


@dataclass(frozen=True)
class SummaryTable:
    n: np.ndarray
    mean_error: np.ndarray
    std_error: np.ndarray
    mean_sq_error: np.ndarray
    trials: np.ndarray


@dataclass(frozen=True)
class RateReport:
    r_squared_error: float
    r_rms_error: float
    intercept_b: float


@dataclass(frozen=True)
class RenderResult:
    output_path: str
    annotation: str
    width_px: int
    height_px: int


def load_summary(path: str) -> SummaryTable:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines or lines[0].split(",") != SUMMARY_COLUMNS:
        raise SchemaError(f"{path}: expected header {','.join(SUMMARY_COLUMNS)}")
    if len(lines) < 3:
        raise SchemaError(f"{path}: need at least 2 summary rows, got {len(lines) - 1}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(SUMMARY_COLUMNS):
            raise SchemaError(f"{path}: line {lineno}: expected {len(SUMMARY_COLUMNS)} fields")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise SchemaError(f"{path}: line {lineno}: non-numeric field") from exc
    table = np.array(rows)
    if np.any(table[:, 1] <= 0.0):
        raise ValueError(f"{path}: mean errors must be positive for a log-log plot")
    return SummaryTable(
        n=table[:, 0], mean_error=table[:, 1], std_error=table[:, 2],
        mean_sq_error=table[:, 3], trials=table[:, 4],
    )


def load_rate_report(path: str) -> RateReport:
    values: dict[str, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if "=" not in line:
                continue
            key, _, val = line.partition("=")
            key = key.strip()
            if key in REPORT_KEYS:
                try:
                    values[key] = float(val.strip())
                except ValueError as exc:
                    raise SchemaError(f"{path}: bad value for {key}: {val.strip()!r}") from exc
    missing = [k for k in REPORT_KEYS if k not in values]
    if missing:
        raise SchemaError(f"{path}: missing keys {missing}")
    return RateReport(**values)


def annotation_text(report: RateReport) -> str:
    return f"r = {report.r_squared_error:.3f}  (rms r = {report.r_rms_error:.3f})"


def render_decay_plot(spec: PlotSpec) -> RenderResult:
    """Draw mean curve, one-std band, and the dashed fitted line; save image.

    The band is drawn on the RMS-error column and clipped below at a small
    positive floor so the logarithmic axis stays valid; the dashed line is
    exp(intercept) * n**r_rms, the least-squares fit the experiment wrote.
    """
    summary = load_summary(spec.summary_path)
    report = load_rate_report(spec.rate_report_path)

    lower = summary.mean_error - summary.std_error
    floor = 1e-3 * float(np.min(summary.mean_error))
    lower = np.maximum(lower, floor)
    upper = summary.mean_error + summary.std_error
    fitted = np.exp(report.intercept_b) * summary.n ** report.r_rms_error
    note = annotation_text(report)

    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.fill_between(summary.n, lower, upper, color="tab:green", alpha=0.25,
                    linewidth=0, label="within one std")
    ax.plot(summary.n, summary.mean_error, color="tab:green", marker="o",
            markersize=4, label="mean error")
    ax.plot(summary.n, fitted, "k--", linewidth=1.2, label="log-log fit")
    ax.text(0.05, 0.08, note, transform=ax.transAxes)
    ax.set_title(spec.title)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    ax.legend(loc="upper right", fontsize=9)
    fig.tight_layout()
    fig.savefig(spec.output_path)
    width, height = fig.canvas.get_width_height()
    plt.close(fig)
    return RenderResult(output_path=spec.output_path, annotation=note,
                        width_px=int(width), height_px=int(height))
