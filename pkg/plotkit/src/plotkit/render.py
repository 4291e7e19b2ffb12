"""Render plot jobs to image files with matplotlib (Agg backend)."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import List, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .jobs import REQUIRED_COLUMNS, PlotJob, SchemaError, read_fit, read_table


@dataclass
class RenderReport:
    """What a render actually drew, for callers and tests."""

    kind: str
    output: str
    points_plotted: int = 0
    series: int = 0
    legend: Tuple[str, ...] = ()
    warnings: Tuple[str, ...] = ()


def _warn(report: RenderReport, message: str) -> None:
    report.warnings = report.warnings + (message,)
    print(f"warning: {message}", file=sys.stderr)


def _load_inputs(job: PlotJob):
    required = REQUIRED_COLUMNS[job.kind]
    tables = []
    for path in job.inputs:
        tables.append((path, read_table(path, required)))
    return tables


def render(job: PlotJob) -> RenderReport:
    """Draw the job to its output file and report what was plotted."""
    report = RenderReport(kind=job.kind, output=job.output)
    tables = _load_inputs(job)
    fig, ax = plt.subplots(figsize=(7, 5))
    try:
        if job.kind == "st_scatter":
            _render_st_scatter(ax, tables, report)
        elif job.kind == "st_curves":
            _render_st_curves(ax, tables, report)
        elif job.kind == "split_loglog":
            _render_split_loglog(ax, job, tables, report)
        else:
            _render_model_compare(ax, tables, report)
        if report.points_plotted == 0:
            _warn(report, "no data rows; writing empty axes")
        handles, labels = ax.get_legend_handles_labels()
        if labels:
            ax.legend()
            report.legend = tuple(labels)
        fig.tight_layout()
        fig.savefig(job.output)
    finally:
        plt.close(fig)
    return report


def _render_st_scatter(ax, tables, report):
    for path, rows in tables:
        xs = [float(r["n"]) for r in rows]
        ys = [float(r["ln_st"]) for r in rows]
        ax.scatter(xs, ys, s=12, alpha=0.8)
        report.points_plotted += len(xs)
        report.series += 1
    ax.set_xlabel("n")
    ax.set_ylabel("ln_st")
    ax.set_title("log spanning-tree count vs graph size")


def _render_st_curves(ax, tables, report):
    for path, rows in tables:
        by_model = {}
        for r in rows:
            by_model.setdefault(r["model"], []).append(
                (float(r["n"]), float(r["st_constant"]))
            )
        for model in sorted(by_model):
            pts = sorted(by_model[model])
            ax.plot(
                [p[0] for p in pts], [p[1] for p in pts],
                marker="o", markersize=3, label=model,
            )
            report.points_plotted += len(pts)
            report.series += 1
    ax.set_xlabel("n")
    ax.set_ylabel("st_constant")
    ax.set_title("spanning-tree constant vs graph size")


def _render_split_loglog(ax, job, tables, report):
    for path, rows in tables:
        xs, ys = [], []
        skipped = 0
        for r in rows:
            if r["p_hat"] in ("", None):
                skipped += 1
                continue
            n, p = float(r["n"]), float(r["p_hat"])
            if p <= 0:
                skipped += 1
                continue
            xs.append(n)
            ys.append(p)
        if skipped:
            _warn(report, f"{path}: skipped {skipped} rows without an estimate")
        ax.scatter(xs, ys, s=14, alpha=0.8)
        report.points_plotted += len(xs)
        report.series += 1
    ax.set_xscale("log", base=10)
    ax.set_yscale("log", base=10)
    ax.set_xlabel("n")
    ax.set_ylabel("p_hat")
    ax.set_title("splittability probability vs graph size")
    if job.overlay_fit:
        fit = read_fit(job.fit)
        xmin, xmax = ax.get_xlim() if report.points_plotted else (1.0, 10.0)
        line_x = [xmin * (xmax / xmin) ** (t / 99.0) for t in range(100)]
        line_y = [math.exp(fit["intercept"]) * x ** fit["slope"] for x in line_x]
        label = (
            f"log({fit['y']}) = {fit['slope']:.4f} log({fit['x']}) "
            f"+ {fit['intercept']:.4f} (R^2 = {fit['r_squared']:.4f})"
        )
        ax.plot(line_x, line_y, "r-", linewidth=1.2, label=label)


def _render_model_compare(ax, tables, report):
    for path, rows in tables:
        for r in rows:
            x, y = float(r["avg_degree"]), float(r["avg_st_constant"])
            name = r["model"].split(":", 1)[0]
            ax.scatter([x], [y], s=30)
            ax.annotate(name, (x, y), textcoords="offset points",
                        xytext=(5, 3), fontsize=8)
            report.points_plotted += 1
        report.series += 1
    ax.set_xlabel("avg_degree")
    ax.set_ylabel("avg_st_constant")
    ax.set_title("model comparison: degree vs spanning-tree constant")
