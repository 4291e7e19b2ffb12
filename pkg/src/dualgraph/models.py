"""Random graph generators: perturbed grids and point-cloud models.

Grid generators place vertices on an integer lattice (scaled into the unit
square); the point-cloud models draw uniform points and connect them through
an ordered pipeline of perturbation stages.  Every generator is a pure
function of (spec, n, seed): stage i consumes its own child seed, so editing
one stage never shifts the randomness of another.

A spec has a compact textual form used by the CLI and echoed into result
files::

    name:source|stage(args)|...[|largest_component]

e.g. ``11c:point_cloud|add_shortest(7.0)|remove_random(0.6)|largest_component``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .errors import InputError
from .geometry import PointCloud, delaunay, random_point_cloud
from .graph import Graph, largest_component
from .rngutil import child_seed

STAGE_KINDS = (
    "delaunay", "add_shortest", "remove_longest", "remove_random",
    "add_random", "add_distance_prob", "add_preferential",
)
SOURCE_KINDS = ("grid", "triangular_grid", "perturbed_grid", "point_cloud")
DEFAULT_TARGET_DEGREE = 5.4


@dataclass(frozen=True)
class Source:
    kind: str
    rows: Optional[int] = None
    cols: Optional[int] = None
    diag_prob: Optional[float] = None

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise InputError(f"unknown source kind {self.kind!r}")
        if self.kind != "point_cloud":
            if not self.rows or not self.cols or self.rows < 1 or self.cols < 1:
                raise InputError(f"{self.kind} needs positive rows and cols")
        if self.kind == "perturbed_grid":
            if self.diag_prob is None or not 0.0 <= self.diag_prob <= 1.0:
                raise InputError("perturbed_grid needs diag_prob in [0, 1]")


@dataclass(frozen=True)
class Stage:
    kind: str
    value: Optional[float] = None  # prob / count multiple / base / scale

    def __post_init__(self):
        if self.kind not in STAGE_KINDS:
            raise InputError(f"unknown stage kind {self.kind!r}")
        v = self.value
        if self.kind == "delaunay":
            if v is not None:
                raise InputError("delaunay stage takes no parameter")
        elif self.kind in ("remove_random", "add_random"):
            if v is None or not 0.0 <= v <= 1.0:
                raise InputError(f"{self.kind} needs a probability in [0, 1]")
        elif self.kind in ("add_shortest", "remove_longest", "add_preferential"):
            if v is None or v < 0:
                raise InputError(f"{self.kind} needs a nonnegative count rule")
        elif self.kind == "add_distance_prob":
            if v is not None and v <= 1.0:
                raise InputError("add_distance_prob needs base > 1 (or auto)")

    @property
    def needs_coords(self) -> bool:
        return self.kind in (
            "delaunay", "add_shortest", "remove_longest", "add_distance_prob"
        )


@dataclass(frozen=True)
class ModelSpec:
    name: str
    source: Source
    stages: Tuple[Stage, ...] = ()
    postprocess: str = "none"  # "none" | "largest_component"

    def __post_init__(self):
        if self.postprocess not in ("none", "largest_component"):
            raise InputError(f"unknown postprocess {self.postprocess!r}")
        if self.source.kind != "point_cloud":
            return  # grid sources always carry coordinates

    def text(self) -> str:
        src = self.source
        if src.kind == "point_cloud":
            parts = ["point_cloud"]
        elif src.kind == "perturbed_grid":
            parts = [f"perturbed_grid({src.rows},{src.cols},{_fmt(src.diag_prob)})"]
        else:
            parts = [f"{src.kind}({src.rows},{src.cols})"]
        for st in self.stages:
            if st.kind == "delaunay":
                parts.append("delaunay")
            elif st.kind == "add_distance_prob" and st.value is None:
                parts.append("add_distance_prob(auto)")
            else:
                parts.append(f"{st.kind}({_fmt(st.value)})")
        if self.postprocess == "largest_component":
            parts.append("largest_component")
        return f"{self.name}:" + "|".join(parts)


def _fmt(x: float) -> str:
    return f"{x:g}"


_TOKEN_RE = re.compile(r"^([a-z_]+)(?:\(([^)]*)\))?$")


def parse_model_spec(text: str) -> ModelSpec:
    """Parse the compact textual form back into a ModelSpec."""
    if ":" not in text:
        raise InputError(f"model spec {text!r} needs a 'name:' prefix")
    name, body = text.split(":", 1)
    tokens = body.split("|")
    if not tokens or not tokens[0]:
        raise InputError(f"model spec {text!r} has no source")

    def _parse(token):
        m = _TOKEN_RE.match(token.strip())
        if not m:
            raise InputError(f"cannot parse model token {token!r}")
        kind, args = m.group(1), m.group(2)
        argv = [a.strip() for a in args.split(",")] if args else []
        return kind, argv

    kind, argv = _parse(tokens[0])
    if kind == "point_cloud":
        source = Source(kind="point_cloud")
    elif kind in ("grid", "triangular_grid"):
        if len(argv) != 2:
            raise InputError(f"{kind} takes (rows, cols)")
        source = Source(kind=kind, rows=int(argv[0]), cols=int(argv[1]))
    elif kind == "perturbed_grid":
        if len(argv) != 3:
            raise InputError("perturbed_grid takes (rows, cols, diag_prob)")
        source = Source(kind=kind, rows=int(argv[0]), cols=int(argv[1]),
                        diag_prob=float(argv[2]))
    else:
        raise InputError(f"unknown source kind {kind!r}")

    stages: List[Stage] = []
    postprocess = "none"
    for i, token in enumerate(tokens[1:]):
        kind, argv = _parse(token)
        if kind == "largest_component":
            if i != len(tokens) - 2:
                raise InputError("largest_component must be the final token")
            postprocess = "largest_component"
            continue
        if kind == "delaunay":
            stages.append(Stage(kind="delaunay"))
            continue
        if len(argv) != 1:
            raise InputError(f"stage {kind!r} takes exactly one parameter")
        value = None if argv[0] == "auto" else float(argv[0])
        if value is None and kind != "add_distance_prob":
            raise InputError(f"stage {kind!r} does not accept 'auto'")
        stages.append(Stage(kind=kind, value=value))
    return ModelSpec(name=name, source=source, stages=tuple(stages),
                     postprocess=postprocess)


# -- grid generators -----------------------------------------------------------

def _lattice_coords(rows: int, cols: int) -> Dict[int, Tuple[float, float]]:
    dx = max(cols - 1, 1)
    dy = max(rows - 1, 1)
    return {
        r * cols + c: (c / dx, r / dy) for r in range(rows) for c in range(cols)
    }


def square_grid(rows: int, cols: int) -> Graph:
    """rows x cols lattice with horizontal and vertical unit adjacencies."""
    if rows < 1 or cols < 1:
        raise InputError("grid needs rows, cols >= 1")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return Graph(range(rows * cols), edges, _lattice_coords(rows, cols))


def triangular_grid(rows: int, cols: int) -> Graph:
    """Square grid plus all (x, y)-(x+1, y+1) diagonals; interior degree 6."""
    if rows < 2 or cols < 2:
        raise InputError("triangular grid needs rows, cols >= 2")
    g = square_grid(rows, cols)
    edges = list(g.edges)
    for r in range(rows - 1):
        for c in range(cols - 1):
            edges.append((r * cols + c, (r + 1) * cols + c + 1))
    return Graph(g.vertices, edges, dict(g.coords))


def perturbed_grid(rows: int, cols: int, p: float, seed: int) -> Graph:
    """Square grid where each cell gains one random-orientation diagonal w.p. p."""
    if not 0.0 <= p <= 1.0:
        raise InputError("diagonal probability must lie in [0, 1]")
    g = square_grid(rows, cols)
    edges = list(g.edges)
    rng = np.random.default_rng(seed)
    ncells = (rows - 1) * (cols - 1)
    include = rng.random(ncells) < p
    direction = rng.integers(0, 2, ncells)
    i = 0
    for r in range(rows - 1):
        for c in range(cols - 1):
            if include[i]:
                if direction[i] == 0:
                    edges.append((r * cols + c, (r + 1) * cols + c + 1))
                else:
                    edges.append((r * cols + c + 1, (r + 1) * cols + c))
            i += 1
    return Graph(g.vertices, edges, dict(g.coords))


# -- stage machinery -------------------------------------------------------------

class _BuildState:
    """Mutable edge set + fixed coordinates while stages run."""

    def __init__(self, n: int, coords: Optional[np.ndarray], edges: Set[Tuple[int, int]]):
        self.n = n
        self.coords = coords  # (n, 2) float array or None
        self.edges = edges  # canonical (i, j) with i < j

    def pair_arrays(self):
        iu, ju = np.triu_indices(self.n, k=1)
        return iu.astype(np.int64), ju.astype(np.int64)

    def pair_distances(self, iu, ju):
        d = self.coords[ju] - self.coords[iu]
        return np.hypot(d[:, 0], d[:, 1])

    def absent_mask(self, iu, ju):
        mask = np.ones(len(iu), dtype=bool)
        if self.edges:
            lin = iu * self.n + ju
            existing = np.fromiter(
                (i * self.n + j for i, j in self.edges), dtype=np.int64,
                count=len(self.edges),
            )
            mask &= ~np.isin(lin, existing)
        return mask


def _stage_delaunay(state: _BuildState, value, rng) -> None:
    pts = PointCloud(
        points=tuple((float(x), float(y)) for x, y in state.coords), seed=0
    )
    tri = delaunay(pts)
    state.edges = set(tri.graph.edges)


def _stage_add_shortest(state: _BuildState, value, rng) -> None:
    count = math.floor(value * state.n)
    if count <= 0:
        return
    iu, ju = state.pair_arrays()
    mask = state.absent_mask(iu, ju)
    iu, ju = iu[mask], ju[mask]
    d = state.pair_distances(iu, ju)
    order = np.lexsort((ju, iu, d))[:count]
    state.edges.update((int(iu[t]), int(ju[t])) for t in order)


def _stage_remove_longest(state: _BuildState, value, rng) -> None:
    count = math.floor(value * state.n)
    if count <= 0 or not state.edges:
        return
    edges = sorted(state.edges)
    iu = np.array([e[0] for e in edges], dtype=np.int64)
    ju = np.array([e[1] for e in edges], dtype=np.int64)
    d = state.pair_distances(iu, ju)
    order = np.lexsort((ju, iu, -d))[:count]
    for t in order:
        state.edges.discard((int(iu[t]), int(ju[t])))


def _stage_remove_random(state: _BuildState, value, rng) -> None:
    edges = sorted(state.edges)
    keep = rng.random(len(edges)) >= value
    state.edges = {e for e, k in zip(edges, keep) if k}


def _stage_add_random(state: _BuildState, value, rng) -> None:
    iu, ju = state.pair_arrays()
    mask = state.absent_mask(iu, ju)
    iu, ju = iu[mask], ju[mask]
    hit = rng.random(len(iu)) < value
    state.edges.update((int(a), int(b)) for a, b in zip(iu[hit], ju[hit]))


def _expected_degree(dists: np.ndarray, n: int, b: float) -> float:
    return 2.0 * float(np.sum(np.power(b, -dists))) / n


def _solve_distance_base(dists: np.ndarray, n: int, target: float,
                         tol: float = 0.05) -> float:
    lo, hi = 1.0 + 1e-9, 1e6
    f_lo = _expected_degree(dists, n, lo)
    f_hi = _expected_degree(dists, n, hi)
    if f_lo < target or f_hi > target:
        raise InputError(
            f"cannot reach average degree {target} with any base in (1, 1e6]"
        )
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        f_mid = _expected_degree(dists, n, mid)
        if abs(f_mid - target) <= tol:
            return mid
        if f_mid > target:
            lo = mid
        else:
            hi = mid
    raise InputError("distance-base bisection failed to converge")


def _stage_add_distance_prob(state: _BuildState, value, rng) -> None:
    iu, ju = state.pair_arrays()
    mask = state.absent_mask(iu, ju)
    iu, ju = iu[mask], ju[mask]
    d = state.pair_distances(iu, ju)
    b = value
    if b is None:
        b = _solve_distance_base(d, state.n, DEFAULT_TARGET_DEGREE)
    probs = np.power(b, -d)
    hit = rng.random(len(iu)) < probs
    state.edges.update((int(a), int(c)) for a, c in zip(iu[hit], ju[hit]))


def _stage_add_preferential(state: _BuildState, value, rng) -> None:
    count = math.floor(value * state.n)
    if count <= 0:
        return
    deg = np.zeros(state.n, dtype=np.float64)
    for i, j in state.edges:
        deg[i] += 1
        deg[j] += 1
    if deg.sum() == 0:
        raise InputError("preferential attachment needs at least one edge")
    for _ in range(count):
        cum = np.cumsum(deg)
        for attempt in range(100):
            u = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            v = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            if u == v:
                continue
            e = (u, v) if u < v else (v, u)
            if e in state.edges:
                continue
            state.edges.add(e)
            deg[u] += 1
            deg[v] += 1
            break
        else:
            raise InputError(
                "preferential attachment exhausted 100 attempts for an insertion"
            )


_STAGE_FUNCS = {
    "delaunay": _stage_delaunay,
    "add_shortest": _stage_add_shortest,
    "remove_longest": _stage_remove_longest,
    "remove_random": _stage_remove_random,
    "add_random": _stage_add_random,
    "add_distance_prob": _stage_add_distance_prob,
    "add_preferential": _stage_add_preferential,
}


def _source_graph(spec: ModelSpec, n: Optional[int], seed: int) -> Graph:
    src = spec.source
    if src.kind == "point_cloud":
        if n is None or n < 1:
            raise InputError("point-cloud models need a positive n")
        if any(st.kind == "delaunay" for st in spec.stages) and n < 3:
            raise InputError("Delaunay-based models need n >= 3")
        cloud = random_point_cloud(n, seed)
        return Graph(range(n), (), {i: p for i, p in enumerate(cloud.points)})
    if n is not None and n != src.rows * src.cols:
        raise InputError(
            f"{src.kind} source has {src.rows}x{src.cols} vertices; n={n} conflicts"
        )
    if src.kind == "grid":
        return square_grid(src.rows, src.cols)
    if src.kind == "triangular_grid":
        return triangular_grid(src.rows, src.cols)
    return perturbed_grid(src.rows, src.cols, src.diag_prob, seed)


def build_model_raw(spec: ModelSpec, n: Optional[int] = None, seed: int = 0) -> Graph:
    """Run source and stages, skipping the postprocess step."""
    g = _source_graph(spec, n, seed)
    nv = g.n
    has_coords = g.has_full_coords()
    coords_arr = None
    if has_coords:
        coords_arr = np.array([g.coords[v] for v in g.vertices])
    index = {v: i for i, v in enumerate(g.vertices)}
    edges = {tuple(sorted((index[u], index[v]))) for u, v in g.edges}
    state = _BuildState(nv, coords_arr, edges)
    for i, stage in enumerate(spec.stages):
        if stage.needs_coords and coords_arr is None:
            raise InputError(
                f"stage {stage.kind!r} needs coordinates, but the graph has none"
            )
        rng = np.random.default_rng(child_seed(seed, i + 1))
        _STAGE_FUNCS[stage.kind](state, stage.value, rng)
    verts = g.vertices
    out_edges = [(verts[i], verts[j]) for i, j in sorted(state.edges)]
    return Graph(verts, out_edges, g.coords)


def build_model(spec: ModelSpec, n: Optional[int] = None, seed: int = 0) -> Graph:
    """Run the full pipeline: source, stages in order, then postprocess."""
    g = build_model_raw(spec, n, seed)
    if spec.postprocess == "largest_component":
        g = largest_component(g)
    return g


def tune_model1_base(n: int, target_avg_degree: float = DEFAULT_TARGET_DEGREE,
                     seed: int = 0) -> float:
    """Base b with expected average degree (2/n) * sum over pairs of b^-d."""
    if not 0 < target_avg_degree < n - 1:
        raise InputError(
            f"target degree must lie in (0, {n - 1}) for n={n}"
        )
    cloud = random_point_cloud(n, seed)
    pts = np.array(cloud.points)
    iu, ju = np.triu_indices(n, k=1)
    d = np.hypot(*(pts[ju] - pts[iu]).T)
    return _solve_distance_base(d, n, target_avg_degree)


# -- the paper's named models -----------------------------------------------------

def _pc_spec(name, stages, post="none"):
    return ModelSpec(name=name, source=Source(kind="point_cloud"),
                     stages=tuple(stages), postprocess=post)


def model_catalog() -> Dict[str, ModelSpec]:
    """The named presets, keyed by model number."""
    s = Stage
    specs = [
        _pc_spec("1", [s("add_distance_prob", None)]),
        _pc_spec("2", [s("add_shortest", 2.7)], post="largest_component"),
        _pc_spec("3", [s("delaunay")]),
        _pc_spec("4", [s("delaunay"), s("remove_random", 0.2)],
                 post="largest_component"),
        _pc_spec("4b", [s("delaunay"), s("remove_random", 0.4)],
                 post="largest_component"),
        _pc_spec("5", [s("delaunay"), s("remove_random", 0.2), s("add_random", 0.05)]),
        _pc_spec("5b", [s("delaunay"), s("remove_random", 0.4), s("add_random", 0.05)]),
        _pc_spec("6", [s("delaunay"), s("add_shortest", 1.0)]),
        _pc_spec("7", [s("delaunay"), s("add_shortest", 1.0), s("remove_longest", 1.0)]),
        _pc_spec("8", [s("delaunay"), s("remove_random", 0.05), s("add_preferential", 0.3)]),
        _pc_spec("9", [s("delaunay"), s("remove_random", 0.2), s("add_shortest", 1.0)]),
        _pc_spec("9b", [s("delaunay"), s("remove_random", 0.4), s("add_shortest", 1.0)]),
        _pc_spec("10", [s("delaunay"), s("add_shortest", 1.0), s("remove_random", 0.2)]),
        _pc_spec("10b", [s("delaunay"), s("add_shortest", 1.0), s("remove_random", 0.4)]),
        _pc_spec("11", [s("add_shortest", 3.4), s("remove_random", 0.2)],
                 post="largest_component"),
        _pc_spec("11b", [s("add_shortest", 4.5), s("remove_random", 0.4)],
                 post="largest_component"),
        _pc_spec("11c", [s("add_shortest", 7.0), s("remove_random", 0.6)],
                 post="largest_component"),
        _pc_spec("12", [s("delaunay"), s("add_preferential", 0.5), s("remove_random", 0.14)]),
    ]
    return {spec.name: spec for spec in specs}


def resolve_model(text: str) -> ModelSpec:
    """A catalog preset by name, or a full textual spec."""
    catalog = model_catalog()
    if text in catalog:
        return catalog[text]
    return parse_model_spec(text)


def spec_for_size(spec: ModelSpec, n: int) -> ModelSpec:
    """Rescale a grid-source spec to n vertices.

    A spec whose grid already has n vertices keeps its shape; otherwise the
    grid becomes square, so n must be a perfect square.
    """
    if spec.source.kind == "point_cloud":
        return spec
    if spec.source.rows * spec.source.cols == n:
        return spec
    r = math.isqrt(n)
    if r * r != n:
        raise InputError(f"grid sweeps need perfect-square sizes, got {n}")
    src = Source(kind=spec.source.kind, rows=r, cols=r,
                 diag_prob=spec.source.diag_prob)
    return ModelSpec(name=spec.name, source=src, stages=spec.stages,
                     postprocess=spec.postprocess)
