"""Random point clouds in the unit square and their Delaunay triangulations.

Triangulation is incremental Bowyer-Watson: points are inserted in
generation order into a scaffold triangle far outside the unit square, each
insertion carves out the cavity of triangles whose open circumdisk contains
the point and re-fans it, and the scaffold corners are dropped at the end.

The orientation and in-circumcircle predicates are evaluated with a floating
point filter (Shewchuk's static error bounds); when the filter cannot decide
the sign, the determinant is recomputed in exact rational arithmetic.  Points
on a circumcircle count as outside, which together with the fixed insertion
order makes the triangulation deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError
from .graph import Graph

Point = Tuple[float, float]

# Shewchuk's static filter constants for double precision
_EPS = float(np.finfo(np.float64).eps) / 2  # 2^-53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS

# scaffold corners sit far outside the unit square so they fall outside the
# circumcircles the inputs can realistically produce
_SCAFFOLD_SCALE = float(2 ** 26)


@dataclass(frozen=True)
class PointCloud:
    points: Tuple[Point, ...]
    seed: int

    @property
    def n(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Triangulation:
    graph: Graph
    triangles: Tuple[Tuple[int, int, int], ...]


def random_point_cloud(n: int, seed: int) -> PointCloud:
    """n points independently uniform on the closed unit square."""
    if n < 1:
        raise InputError("point cloud needs at least one point")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    return PointCloud(points=tuple((float(x), float(y)) for x, y in pts), seed=seed)


# -- exact-filtered predicates -------------------------------------------------

def orientation(a: Point, b: Point, c: Point) -> int:
    """Sign of the signed area of (a, b, c): +1 counterclockwise, 0 collinear."""
    detleft = (b[0] - a[0]) * (c[1] - a[1])
    detright = (b[1] - a[1]) * (c[0] - a[0])
    det = detleft - detright
    detsum = abs(detleft) + abs(detright)
    if abs(det) > _CCW_BOUND * detsum:
        return 1 if det > 0 else -1
    # exact fallback
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    exact = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (exact > 0) - (exact < 0)


def _incircle_sign(a: Point, b: Point, c: Point, d: Point) -> int:
    """Sign of the in-circle determinant for (a, b, c) counterclockwise.

    Positive means d lies strictly inside the circumcircle of abc.
    """
    adx = a[0] - d[0]
    ady = a[1] - d[1]
    bdx = b[0] - d[0]
    bdy = b[1] - d[1]
    cdx = c[0] - d[0]
    cdy = c[1] - d[1]
    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    alift = adx * adx + ady * ady
    cdxady = cdx * ady
    adxcdy = adx * cdy
    blift = bdx * bdx + bdy * bdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    clift = cdx * cdx + cdy * cdy
    det = (
        alift * (bdxcdy - cdxbdy)
        + blift * (cdxady - adxcdy)
        + clift * (adxbdy - bdxady)
    )
    permanent = (
        (abs(bdxcdy) + abs(cdxbdy)) * alift
        + (abs(cdxady) + abs(adxcdy)) * blift
        + (abs(adxbdy) + abs(bdxady)) * clift
    )
    if abs(det) > _ICC_BOUND * permanent:
        return 1 if det > 0 else -1
    adx = Fraction(a[0]) - Fraction(d[0])
    ady = Fraction(a[1]) - Fraction(d[1])
    bdx = Fraction(b[0]) - Fraction(d[0])
    bdy = Fraction(b[1]) - Fraction(d[1])
    cdx = Fraction(c[0]) - Fraction(d[0])
    cdy = Fraction(c[1]) - Fraction(d[1])
    exact = (
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    )
    return (exact > 0) - (exact < 0)


def in_circumcircle(a: Point, b: Point, c: Point, d: Point) -> str:
    """Where d lies relative to the circumcircle of the triangle abc."""
    orient = orientation(a, b, c)
    if orient == 0:
        raise InputError("circumcircle is undefined for collinear points")
    if orient < 0:
        b, c = c, b
    sign = _incircle_sign(a, b, c, d)
    if sign > 0:
        return "inside"
    if sign < 0:
        return "outside"
    return "on"


# -- Bowyer-Watson -------------------------------------------------------------

class _TriangulationState:
    """Triangle soup with half-edge adjacency for incremental insertion."""

    def __init__(self, pts: List[Point]):
        self.pts = pts
        self.tris: List[Optional[Tuple[int, int, int]]] = []
        self.half: Dict[Tuple[int, int], int] = {}  # directed edge -> triangle
        self.free: List[int] = []
        self.last: int = -1  # walk start hint

    def add_tri(self, a: int, b: int, c: int) -> int:
        tid = self.free.pop() if self.free else len(self.tris)
        tri = (a, b, c)
        if tid == len(self.tris):
            self.tris.append(tri)
        else:
            self.tris[tid] = tri
        self.half[(a, b)] = tid
        self.half[(b, c)] = tid
        self.half[(c, a)] = tid
        self.last = tid
        return tid

    def remove_tri(self, tid: int) -> None:
        a, b, c = self.tris[tid]
        for e in ((a, b), (b, c), (c, a)):
            if self.half.get(e) == tid:
                del self.half[e]
        self.tris[tid] = None
        self.free.append(tid)

    def locate(self, p: Point) -> int:
        """Walk from the last created triangle to one containing p."""
        tid = self.last
        pts = self.pts
        for _ in range(4 * len(self.tris) + 16):
            a, b, c = self.tris[tid]
            moved = False
            for u, v in ((a, b), (b, c), (c, a)):
                if orientation(pts[u], pts[v], p) < 0:
                    nxt = self.half.get((v, u))
                    if nxt is not None:
                        tid = nxt
                        moved = True
                        break
            if not moved:
                return tid
        raise InputError("point location walk failed to converge")

    def insert(self, pi: int) -> None:
        p = self.pts[pi]
        start = self.locate(p)
        # cavity: triangles whose open circumdisk contains p
        cavity = {start}
        stack = [start]
        while stack:
            tid = stack.pop()
            a, b, c = self.tris[tid]
            for u, v in ((a, b), (b, c), (c, a)):
                nbr = self.half.get((v, u))
                if nbr is None or nbr in cavity:
                    continue
                na, nb, nc = self.tris[nbr]
                if _incircle_sign(self.pts[na], self.pts[nb], self.pts[nc], p) > 0:
                    cavity.add(nbr)
                    stack.append(nbr)
        # boundary: directed edges of cavity triangles whose mirror is outside
        boundary = []
        for tid in cavity:
            a, b, c = self.tris[tid]
            for u, v in ((a, b), (b, c), (c, a)):
                if self.half.get((v, u)) not in cavity:
                    boundary.append((u, v))
        for tid in cavity:
            self.remove_tri(tid)
        for u, v in boundary:
            self.add_tri(u, v, pi)


def delaunay(cloud: PointCloud) -> Triangulation:
    """Delaunay triangulation of the cloud as a coordinate-bearing graph."""
    n = cloud.n
    if n < 3:
        raise InputError("triangulation needs at least 3 points")
    seen: Dict[Point, int] = {}
    for i, p in enumerate(cloud.points):
        if p in seen:
            raise InputError(f"duplicate points at indices {seen[p]} and {i}")
        seen[p] = i
    # reject fully collinear input
    collinear = True
    for i in range(2, n):
        if orientation(cloud.points[0], cloud.points[1], cloud.points[i]) != 0:
            collinear = False
            break
    if collinear:
        raise InputError("all points are collinear; no triangulation exists")

    s = _SCAFFOLD_SCALE
    pts: List[Point] = list(cloud.points) + [(-s, -s), (3 * s, -s), (-s, 3 * s)]
    state = _TriangulationState(pts)
    state.add_tri(n, n + 1, n + 2)  # counterclockwise scaffold
    for i in range(n):
        state.insert(i)

    triangles = []
    edges = set()
    for tri in state.tris:
        if tri is None:
            continue
        a, b, c = tri
        if a >= n or b >= n or c >= n:
            continue
        triangles.append(tuple(sorted((a, b, c))))
        edges.update(
            (min(u, v), max(u, v)) for u, v in ((a, b), (b, c), (c, a))
        )
    triangles.sort()
    coords = {i: cloud.points[i] for i in range(n)}
    graph = Graph(range(n), edges, coords)
    return Triangulation(graph=graph, triangles=tuple(triangles))


def delaunay_graph(n: int, seed: int) -> Graph:
    """Convenience: triangulation graph of a fresh random cloud."""
    return delaunay(random_point_cloud(n, seed)).graph
