"""Read and write graphs and experiment result tables.

Two graph formats are supported:

* ``node-link`` — JSON ``{"directed": false, "nodes": [...], "links": [...]}``
  matching the common geo-dual-graph exchange layout, with optional per-node
  ``x``/``y`` coordinates.
* ``edge-list`` — whitespace-separated id pairs, one per line, ``#`` comments
  allowed.  A line with a single token declares an isolated vertex so that
  arbitrary graphs round-trip.

Result tables are plain CSV.  Reals are serialized with ``repr`` so every
value round-trips bit-exactly (well beyond 9 significant digits).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .errors import GraphFormatError, InputError
from .graph import Graph

FORMATS = ("node-link", "edge-list")


def _coerce_ids(raw_ids):
    """Keep integer ids when every id is an int; otherwise stringify all."""
    if all(isinstance(i, int) and not isinstance(i, bool) for i in raw_ids):
        return {i: i for i in raw_ids}
    return {i: str(i) for i in raw_ids}


def load_graph(path, format: str = "node-link") -> Graph:
    """Load a graph file, collapsing duplicate links and validating endpoints."""
    path = Path(path)
    if format not in FORMATS:
        raise InputError(f"unknown graph format {format!r}; expected one of {FORMATS}")
    if not path.exists():
        raise GraphFormatError("file not found", path=path)
    if format == "node-link":
        return _load_node_link(path)
    return _load_edge_list(path)


def _load_node_link(path: Path) -> Graph:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc.msg}", path=path, line=exc.lineno)
    if not isinstance(doc, dict):
        raise GraphFormatError("top-level JSON value must be an object", path=path)
    if doc.get("directed", False):
        raise GraphFormatError("directed graphs are not supported", path=path,
                               field="directed")
    nodes = doc.get("nodes")
    links = doc.get("links")
    if not isinstance(nodes, list):
        raise GraphFormatError("missing or invalid 'nodes' list", path=path,
                               field="nodes")
    if not isinstance(links, list):
        raise GraphFormatError("missing or invalid 'links' list", path=path,
                               field="links")
    raw_ids = []
    seen = set()
    raw_coords = {}
    for i, node in enumerate(nodes):
        if not isinstance(node, dict) or "id" not in node:
            raise GraphFormatError(f"node #{i} has no 'id'", path=path, field="nodes")
        nid = node["id"]
        if nid in seen:
            raise GraphFormatError(f"duplicate node id {nid!r}", path=path, field="id")
        seen.add(nid)
        raw_ids.append(nid)
        if "x" in node and "y" in node:
            raw_coords[nid] = (float(node["x"]), float(node["y"]))
    idmap = _coerce_ids(raw_ids)
    if len(set(idmap.values())) != len(raw_ids):
        raise GraphFormatError("node ids collide after string coercion", path=path,
                               field="id")
    edges = []
    for i, link in enumerate(links):
        if not isinstance(link, dict) or "source" not in link or "target" not in link:
            raise GraphFormatError(f"link #{i} needs 'source' and 'target'",
                                   path=path, field="links")
        s, t = link["source"], link["target"]
        for endpoint in (s, t):
            if endpoint not in idmap:
                raise GraphFormatError(
                    f"link #{i} references unknown id {endpoint!r}", path=path,
                    field="links")
        if s == t:
            raise GraphFormatError(f"link #{i} is a self-link on {s!r}", path=path,
                                   field="links")
        edges.append((idmap[s], idmap[t]))
    coords = {idmap[k]: v for k, v in raw_coords.items()} or None
    return Graph(idmap.values(), edges, coords)


def _load_edge_list(path: Path) -> Graph:
    raw_tokens = []  # (lineno, tokens)
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            tokens = body.split()
            if len(tokens) > 2:
                raise GraphFormatError(
                    f"expected 1 or 2 ids per line, got {len(tokens)}",
                    path=path, line=lineno)
            raw_tokens.append((lineno, tokens))
    all_tokens = [t for _, toks in raw_tokens for t in toks]

    def _as_int(tok):
        try:
            return int(tok)
        except ValueError:
            return None

    if all_tokens and all(_as_int(t) is not None for t in all_tokens):
        conv = int
    else:
        conv = str
    vertices = set()
    edges = []
    for lineno, tokens in raw_tokens:
        ids = [conv(t) for t in tokens]
        vertices.update(ids)
        if len(ids) == 2:
            if ids[0] == ids[1]:
                raise GraphFormatError(f"self-link on {ids[0]!r}", path=path,
                                       line=lineno)
            edges.append(tuple(ids))
    return Graph(vertices, edges)


def save_graph(g: Graph, path, format: str = "node-link") -> None:
    """Write ``g`` so that loading it back reproduces ids, edges, and coords."""
    path = Path(path)
    if format not in FORMATS:
        raise InputError(f"unknown graph format {format!r}; expected one of {FORMATS}")
    try:
        if format == "node-link":
            _save_node_link(g, path)
        else:
            _save_edge_list(g, path)
    except OSError as exc:
        raise GraphFormatError(f"cannot write graph: {exc}", path=path)


def _save_node_link(g: Graph, path: Path) -> None:
    nodes = []
    for v in g.vertices:
        node = {"id": v}
        if g.coords is not None and v in g.coords:
            node["x"], node["y"] = g.coords[v]
        nodes.append(node)
    links = [{"source": u, "target": v} for u, v in g.edges]
    doc = {"directed": False, "nodes": nodes, "links": links}
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def _save_edge_list(g: Graph, path: Path) -> None:
    touched = set()
    lines = []
    for u, v in g.edges:
        lines.append(f"{u} {v}")
        touched.add(u)
        touched.add(v)
    for v in g.vertices:
        if v not in touched:
            lines.append(f"{v}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines))
        if lines:
            f.write("\n")


# -- result tables ----------------------------------------------------------

def format_value(x) -> str:
    """Canonical CSV serialization: exact round-trip for reals."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_rows(
    rows: Sequence[Mapping[str, object]],
    path,
    schema: Optional[Sequence[str]] = None,
) -> None:
    """Write a header plus one comma-separated line per row.

    Fields containing commas (model spec texts) are quoted.  All rows must
    share one schema; a mismatch reports the offending row index.  ``schema``
    is required when ``rows`` is empty and otherwise defaults to the first
    row's key order.
    """
    import csv

    if schema is None:
        if not rows:
            raise InputError("schema is required when writing an empty table")
        schema = list(rows[0].keys())
    schema = list(schema)
    for i, row in enumerate(rows):
        if list(row.keys()) != schema:
            raise InputError(
                f"row {i} schema {list(row.keys())} does not match header {schema}"
            )
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(schema)
        for row in rows:
            writer.writerow([format_value(row[c]) for c in schema])


def read_rows(path) -> list[dict]:
    """Read a CSV written by :func:`write_rows` back into dict rows."""
    import csv

    with open(path, "r", encoding="utf-8", newline="") as f:
        return [dict(r) for r in csv.DictReader(f)]
