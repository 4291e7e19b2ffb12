"""Canonical undirected graph representation and basic structural statistics.

Vertex ids are opaque but totally ordered (all ints or all strings); every
iteration over vertices or edges uses sorted order so downstream seeded
processes are reproducible.  Graphs are immutable after construction and safe
to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .errors import InputError

VertexId = Hashable
Edge = Tuple[VertexId, VertexId]


def _edge_key(u, v) -> Edge:
    return (u, v) if u <= v else (v, u)


class Graph:
    """Immutable simple undirected graph with optional 2D coordinates.

    Duplicate edges collapse silently (set semantics); self-loops are
    rejected.  ``coords`` maps a vertex id to an (x, y) pair and may cover
    only part of the vertex set; operations that need geometry check for
    full coverage themselves.
    """

    __slots__ = (
        "_vertices", "_edges", "_coords", "_index",
        "_degrees", "_csr", "_hash", "_eset", "_connected",
    )

    def __init__(
        self,
        vertices: Iterable[VertexId],
        edges: Iterable[Sequence[VertexId]] = (),
        coords: Optional[Mapping[VertexId, Tuple[float, float]]] = None,
    ):
        vset = set(vertices)
        try:
            self._vertices = tuple(sorted(vset))
        except TypeError:
            raise InputError(
                "vertex ids must be mutually orderable (all ints or all strings)"
            )
        eset = set()
        for e in edges:
            u, v = e
            if u == v:
                raise InputError(f"self-loop on vertex {u!r}")
            if u not in vset or v not in vset:
                missing = u if u not in vset else v
                raise InputError(f"edge endpoint {missing!r} is not a vertex")
            eset.add(_edge_key(u, v))
        self._edges = tuple(sorted(eset))
        if coords is not None:
            for v in coords:
                if v not in vset:
                    raise InputError(f"coordinate for unknown vertex {v!r}")
            coords = {v: (float(x), float(y)) for v, (x, y) in coords.items()}
        self._coords = coords
        self._index = {v: i for i, v in enumerate(self._vertices)}
        self._degrees = None
        self._csr = None
        self._hash = None
        self._eset = None
        self._connected = None

    # -- basic accessors ---------------------------------------------------

    @property
    def vertices(self) -> Tuple[VertexId, ...]:
        return self._vertices

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    @property
    def coords(self) -> Optional[Mapping[VertexId, Tuple[float, float]]]:
        return self._coords

    @property
    def n(self) -> int:
        return len(self._vertices)

    @property
    def m(self) -> int:
        return len(self._edges)

    def index_of(self, v: VertexId) -> int:
        return self._index[v]

    def has_edge(self, u, v) -> bool:
        if self._eset is None:
            self._eset = frozenset(self._edges)
        return _edge_key(u, v) in self._eset

    def has_full_coords(self) -> bool:
        return self._coords is not None and len(self._coords) == self.n

    def degrees(self) -> np.ndarray:
        """Degree of each vertex, aligned with sorted vertex order."""
        if self._degrees is None:
            deg = np.zeros(self.n, dtype=np.int64)
            for u, v in self._edges:
                deg[self._index[u]] += 1
                deg[self._index[v]] += 1
            self._degrees = deg
        return self._degrees

    def csr(self) -> Tuple[np.ndarray, np.ndarray]:
        """Compressed adjacency (indptr, neighbors), neighbors sorted per row."""
        if self._csr is None:
            n = self.n
            deg = self.degrees()
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(deg, out=indptr[1:])
            nbrs = np.empty(indptr[-1], dtype=np.int64)
            fill = indptr[:-1].copy()
            for u, v in self._edges:
                iu, iv = self._index[u], self._index[v]
                nbrs[fill[iu]] = iv
                fill[iu] += 1
                nbrs[fill[iv]] = iu
                fill[iv] += 1
            for i in range(n):
                nbrs[indptr[i]:indptr[i + 1]].sort()
            self._csr = (indptr, nbrs)
        return self._csr

    def neighbors(self, v: VertexId) -> Tuple[VertexId, ...]:
        indptr, nbrs = self.csr()
        i = self._index[v]
        return tuple(self._vertices[j] for j in nbrs[indptr[i]:indptr[i + 1]])

    def is_connected(self) -> bool:
        """Cached BFS connectivity check (empty graphs count as connected)."""
        if self._connected is None:
            if self.n <= 1:
                self._connected = True
            else:
                from ._kernels import connected_via_bfs

                indptr, nbrs = self.csr()
                queue = np.empty(self.n, dtype=np.int64)
                self._connected = bool(connected_via_bfs(indptr, nbrs, queue))
        return self._connected

    def subgraph(self, keep: Iterable[VertexId]) -> "Graph":
        """Induced subgraph on ``keep``, preserving coordinates."""
        ks = set(keep)
        for v in ks:
            if v not in self._index:
                raise InputError(f"subgraph vertex {v!r} is not in the graph")
        edges = [e for e in self._edges if e[0] in ks and e[1] in ks]
        coords = None
        if self._coords is not None:
            coords = {v: xy for v, xy in self._coords.items() if v in ks}
        return Graph(ks, edges, coords)

    def with_edges(self, edges: Iterable[Sequence[VertexId]]) -> "Graph":
        """Same vertices and coordinates, replaced edge set."""
        return Graph(self._vertices, edges, self._coords)

    # -- equality / hashing -------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._vertices == other._vertices
            and self._edges == other._edges
            and self._coords == other._coords
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._vertices, self._edges))
        return self._hash

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, coords={'yes' if self._coords else 'no'})"


@dataclass(frozen=True)
class DegreeStats:
    average: float
    median: float
    maximum: float


@dataclass(frozen=True)
class ComponentDecomposition:
    """Vertex sets of the connected components, largest first.

    Equal-size components are ordered by their smallest contained id.
    """

    components: Tuple[frozenset, ...]

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(len(c) for c in self.components)

    @property
    def is_connected(self) -> bool:
        return len(self.components) == 1


def degree_stats(g: Graph) -> DegreeStats:
    """Average, median, and maximum vertex degree.

    Median of an even-length degree sequence is the mean of the two central
    values.
    """
    if g.n == 0:
        raise InputError("empty graph")
    deg = g.degrees()
    return DegreeStats(
        average=2.0 * g.m / g.n,
        median=float(np.median(deg)),
        maximum=float(deg.max()),
    )


def connected_components(g: Graph) -> ComponentDecomposition:
    """Connected components, sorted by size descending then smallest id."""
    if g.n == 0:
        return ComponentDecomposition(components=())
    indptr, nbrs = g.csr()
    mat = csr_matrix(
        (np.ones(len(nbrs), dtype=np.int8), nbrs, indptr), shape=(g.n, g.n)
    )
    ncomp, labels = _cc(mat, directed=False)
    buckets = [[] for _ in range(ncomp)]
    for i, lab in enumerate(labels):
        buckets[lab].append(g.vertices[i])
    # vertices were scanned in sorted order, so buckets[i][0] is the min id
    buckets.sort(key=lambda b: (-len(b), b[0]))
    return ComponentDecomposition(components=tuple(frozenset(b) for b in buckets))


def largest_component(g: Graph) -> Graph:
    """Induced subgraph on the largest component (ties: smallest id)."""
    if g.n == 0:
        raise InputError("empty graph")
    decomp = connected_components(g)
    if decomp.is_connected:
        return g
    return g.subgraph(decomp.components[0])
