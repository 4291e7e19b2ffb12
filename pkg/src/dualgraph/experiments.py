"""Sweep orchestration and log-log regression.

Sweep cells (model x size x replicate) are independent work items seeded by
chained child seeds of the master seed.  Cells may run on a worker pool
(capped by the ``DUALGRAPH_THREADS`` environment variable) but results are
gathered and emitted in deterministic cell order, so the output bytes never
depend on scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DualGraphError, InputError, TrialCapExceeded
from .graph import Graph, degree_stats, largest_component
from .models import ModelSpec, build_model, build_model_raw, resolve_model, spec_for_size
from .planarity import is_planar
from .rngutil import child_seed
from .spanning import spanning_tree_constant
from .splitting import (
    DEFAULT_TARGET_SUCCESSES,
    DEFAULT_TRIAL_CAP,
    BalanceRule,
    default_rule,
    run_splittability_trials,
)

ANALYZE_SCHEMA = (
    "graph", "n", "m", "avg_degree", "median_degree", "max_degree",
    "connected", "planar", "ln_st", "st_constant",
)
SPLIT_SCHEMA = (
    "graph", "n", "k", "successes", "trials", "p_hat", "seed", "estimator",
)
SWEEP_SCHEMA = (
    "model", "planar_rate", "connected_rate", "avg_degree", "median_degree",
    "max_degree", "avg_st_constant", "errors",
)
STCONST_SCHEMA = ("model", "n", "ln_st", "st_constant")


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


@dataclass(frozen=True)
class SweepConfig:
    models: Tuple[str, ...]
    sizes: Tuple[int, ...] = (100, 250, 500, 1000, 2500)
    seeds_per_size: int = 10
    k_values: Tuple[int, ...] = (2,)
    target_successes: int = DEFAULT_TARGET_SUCCESSES
    master_seed: int = 0
    trial_cap: int = DEFAULT_TRIAL_CAP
    estimator: str = "both"  # ratio | gbas | both

    def __post_init__(self):
        if not self.models:
            raise InputError("sweep needs at least one model")
        if any(s <= 0 for s in self.sizes):
            raise InputError("sweep sizes must be positive")
        if self.seeds_per_size < 1:
            raise InputError("seeds_per_size must be >= 1")
        if self.estimator not in ("ratio", "gbas", "both"):
            raise InputError(f"unknown estimator {self.estimator!r}")


def max_workers() -> int:
    raw = os.environ.get("DUALGRAPH_THREADS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise InputError(f"DUALGRAPH_THREADS must be an integer, got {raw!r}")
    return max(workers, 1)


def _run_cells(tasks: Sequence[Callable[[], object]]) -> List[object]:
    """Run independent thunks, deterministically ordered results."""
    workers = max_workers()
    if workers == 1 or len(tasks) <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(t) for t in tasks]
        return [f.result() for f in futures]


def loglog_fit(samples: Sequence[Tuple[float, float]]) -> RegressionFit:
    """Ordinary least squares of ln(p) on ln(n).

    The slope and R^2 are invariant to the log base; the intercept is in
    natural-log units.
    """
    if len(samples) < 2:
        raise InputError("regression needs at least 2 samples")
    for i, (x, y) in enumerate(samples):
        if x <= 0 or y <= 0:
            raise InputError(
                f"sample {i} = ({x}, {y}) is not positive; cannot take logs"
            )
    lx = np.log([x for x, _ in samples])
    ly = np.log([y for _, y in samples])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res < 1e-12 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return RegressionFit(
        slope=float(slope), intercept=float(intercept), r_squared=r2,
        n_points=len(samples),
    )


# -- analyze ------------------------------------------------------------------

def analyze_row(g: Graph, label: str) -> dict:
    """One row of the analyze schema; spanning stats use the largest component."""
    stats = degree_stats(g)
    comp = largest_component(g)
    ln_st = spanning_tree_constant(comp) * comp.n if comp.n > 1 else 0.0
    return {
        "graph": label,
        "n": g.n,
        "m": g.m,
        "avg_degree": stats.average,
        "median_degree": stats.median,
        "max_degree": stats.maximum,
        "connected": g.is_connected(),
        "planar": is_planar(g, extract_kuratowski=False).planar,
        "ln_st": ln_st,
        "st_constant": ln_st / comp.n if comp.n else 0.0,
    }


# -- model sweep ----------------------------------------------------------------

def _cell_seed(master: int, model_idx: int, size_idx: int, rep: int) -> int:
    return child_seed(child_seed(child_seed(master, model_idx), size_idx), rep)


def model_sweep(config: SweepConfig) -> List[dict]:
    """Average structural statistics per model across sizes and seeds.

    Connectivity is measured before any largest-component postprocess; the
    other statistics describe the finished graph (spanning-tree constant on
    its largest component).  Failed instances are counted in ``errors`` and
    excluded from the averages.
    """
    specs = [resolve_model(name) for name in config.models]

    def instance_stats(spec: ModelSpec, size: int, seed: int):
        try:
            raw = build_model_raw(spec_for_size(spec, size), size, seed)
            final = raw if spec.postprocess == "none" else largest_component(raw)
            stats = degree_stats(final)
            comp = largest_component(final)
            st_const = spanning_tree_constant(comp) if comp.n > 1 else 0.0
            return {
                "connected": raw.is_connected(),
                "planar": is_planar(final, extract_kuratowski=False).planar,
                "avg": stats.average,
                "med": stats.median,
                "mx": stats.maximum,
                "st": st_const,
            }
        except DualGraphError:
            return None

    rows = []
    for mi, spec in enumerate(specs):
        tasks = []
        for si, size in enumerate(config.sizes):
            for rep in range(config.seeds_per_size):
                seed = _cell_seed(config.master_seed, mi, si, rep)
                tasks.append(
                    lambda spec=spec, size=size, seed=seed: instance_stats(
                        spec, size, seed
                    )
                )
        results = _run_cells(tasks)
        good = [r for r in results if r is not None]
        errors = len(results) - len(good)
        if good:
            row = {
                "model": spec.text(),
                "planar_rate": float(np.mean([r["planar"] for r in good])),
                "connected_rate": float(np.mean([r["connected"] for r in good])),
                "avg_degree": float(np.mean([r["avg"] for r in good])),
                "median_degree": float(np.mean([r["med"] for r in good])),
                "max_degree": float(np.mean([r["mx"] for r in good])),
                "avg_st_constant": float(np.mean([r["st"] for r in good])),
                "errors": errors,
            }
        else:
            row = {
                "model": spec.text(), "planar_rate": float("nan"),
                "connected_rate": float("nan"), "avg_degree": float("nan"),
                "median_degree": float("nan"), "max_degree": float("nan"),
                "avg_st_constant": float("nan"), "errors": errors,
            }
        rows.append(row)
    return rows


# -- splittability sweep ----------------------------------------------------------

def split_rows_for_graph(
    g: Graph,
    label: str,
    k: int,
    target_successes: int,
    seed: int,
    trial_cap: int = DEFAULT_TRIAL_CAP,
    estimator: str = "both",
    mode: str = "auto",
    absorb_cap: bool = True,
) -> List[dict]:
    """SplitEstimate rows (one per requested estimator) for a single graph.

    With ``absorb_cap`` a trial-cap exhaustion becomes a row with an empty
    p_hat (the sweep convention); otherwise the error propagates.
    """
    comp = largest_component(g)
    if mode == "auto":
        rule = default_rule(comp.n, k)
    else:
        rule = BalanceRule(k=k, mode=mode)
    kinds = ("ratio", "gbas") if estimator == "both" else (estimator,)
    try:
        record = run_splittability_trials(
            g, rule, target_successes, seed, trial_cap, graph_label=label
        )
    except TrialCapExceeded as exc:
        if not absorb_cap:
            raise
        return [
            {
                "graph": label, "n": comp.n, "k": k,
                "successes": exc.successes, "trials": exc.trials,
                "p_hat": "", "seed": seed, "estimator": kind,
            }
            for kind in kinds
        ]
    rows = []
    for kind in kinds:
        est = record.estimate(kind)
        rows.append(
            {
                "graph": label, "n": est.n, "k": est.k,
                "successes": est.successes, "trials": est.trials,
                "p_hat": est.p_hat, "seed": seed, "estimator": kind,
            }
        )
    return rows


def splittability_sweep(
    config: SweepConfig,
    graphs: Optional[Sequence[Tuple[str, Graph]]] = None,
) -> Tuple[List[dict], Dict[int, Optional[RegressionFit]]]:
    """Estimate k-splittability across graphs; fit log p against log n per k.

    ``graphs`` defaults to model instances generated from the config.  Graphs
    whose largest component has fewer than 4k vertices are excluded (the
    small-graph rule); trial-cap exhaustion yields a row with empty p_hat
    that is excluded from the fit.
    """
    items: List[Tuple[str, Graph, int]] = []  # (label, graph, seed)
    if graphs is None:
        specs = [resolve_model(name) for name in config.models]
        for mi, spec in enumerate(specs):
            for si, size in enumerate(config.sizes):
                for rep in range(config.seeds_per_size):
                    seed = _cell_seed(config.master_seed, mi, si, rep)
                    g = build_model(spec_for_size(spec, size), size, seed)
                    items.append((f"{spec.name}-n{size}-r{rep}", g, seed))
    else:
        for gi, (label, g) in enumerate(graphs):
            items.append((label, g, child_seed(config.master_seed, gi)))

    rows: List[dict] = []
    fits: Dict[int, Optional[RegressionFit]] = {}
    for k in config.k_values:
        tasks = []
        for label, g, seed in items:
            comp_n = largest_component(g).n
            if comp_n < 4 * k:
                continue
            tasks.append(
                lambda g=g, label=label, seed=seed, k=k: split_rows_for_graph(
                    g, label, k, config.target_successes,
                    child_seed(seed, k), config.trial_cap, config.estimator,
                )
            )
        results = _run_cells(tasks)
        k_rows = [row for batch in results for row in batch]
        rows.extend(k_rows)
        fit_kind = "ratio" if config.estimator in ("ratio", "both") else "gbas"
        pts = [
            (row["n"], row["p_hat"])
            for row in k_rows
            if row["estimator"] == fit_kind and row["p_hat"] != ""
            and row["p_hat"] > 0
        ]
        fits[k] = loglog_fit(pts) if len(pts) >= 2 else None
    return rows, fits


# -- spanning-tree-constant sweep ---------------------------------------------------

def spanning_constant_sweep(
    specs: Sequence[ModelSpec],
    sizes: Sequence[int],
    seeds_per_size: int = 1,
    master_seed: int = 0,
) -> List[dict]:
    """ln N_ST and the spanning-tree constant per (model, size, replicate)."""
    tasks = []
    for mi, spec in enumerate(specs):
        for si, size in enumerate(sizes):
            for rep in range(seeds_per_size):
                def cell(spec=spec, mi=mi, si=si, rep=rep, size=size):
                    seed = _cell_seed(master_seed, mi, si, rep)
                    g = build_model(spec_for_size(spec, size), size, seed)
                    comp = largest_component(g)
                    ln_st = (
                        spanning_tree_constant(comp) * comp.n if comp.n > 1 else 0.0
                    )
                    return {
                        "model": spec.text(),
                        "n": comp.n,
                        "ln_st": ln_st,
                        "st_constant": ln_st / comp.n if comp.n else 0.0,
                    }

                tasks.append(cell)
    return _run_cells(tasks)
