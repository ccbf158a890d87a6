"""Finite simple connected base graphs with a distinguished origin vertex.

Vertices carry dense integer labels 0..k-1 so that downstream code can use
bitmasks and array indexing.  Graphs are immutable after construction and
validated eagerly; every invalid input raises GraphError with a stable
error code.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .unionfind import UnionFind


class GraphError(ValueError):
    """Invalid graph input.  The code attribute names the violated rule."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    origin: int = 0

    def __post_init__(self):
        if not isinstance(self.vertex_count, int) or self.vertex_count < 1:
            raise GraphError("vertices-invalid", "vertex count must be a positive integer")
        seen = set()
        canon = []
        for edge in self.edges:
            if len(edge) != 2:
                raise GraphError("edge-invalid", f"edge {edge!r} is not a vertex pair")
            u, v = edge
            if not (isinstance(u, int) and isinstance(v, int)):
                raise GraphError("edge-invalid", f"edge {edge!r} has non-integer endpoints")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise GraphError("edge-invalid", f"edge {edge!r} leaves the vertex range")
            if u == v:
                raise GraphError("self-loop", f"vertex {u} has a self-loop")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError("duplicate-edge", f"edge {key} occurs twice")
            seen.add(key)
            canon.append(key)
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        if not (0 <= self.origin < self.vertex_count):
            raise GraphError("origin-out-of-range", f"origin {self.origin} is not a vertex")
        if not self._connected():
            raise GraphError("disconnected", "graph is not connected")

    def _connected(self) -> bool:
        uf = UnionFind(self.vertex_count)
        for u, v in self.edges:
            uf.union(u, v)
        root = uf.find(0)
        return all(uf.find(v) == root for v in range(self.vertex_count))

    # -- queries -------------------------------------------------------------

    @property
    def vertices(self) -> range:
        return range(self.vertex_count)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    @property
    def max_degree(self) -> int:
        return max(self.degree(v) for v in self.vertices)

    @property
    def bond_count(self) -> int:
        """Bonds per layer of the layered product: horizontal edges plus verticals."""
        return self.edge_count + self.vertex_count

    def describe(self) -> str:
        return f"vertices={self.vertex_count} edges={list(self.edges)} origin={self.origin}"


def cycle(k: int, origin: int = 0) -> Graph:
    """Cycle on k vertices; k = 2 degenerates to a single edge (no multi-edge)."""
    if k < 2:
        raise GraphError("family-size", "cycle needs at least 2 vertices")
    if k == 2:
        return Graph(2, ((0, 1),), origin)
    edges = tuple((i, (i + 1) % k) for i in range(k))
    return Graph(k, edges, origin)


def path(k: int, origin: int = 0) -> Graph:
    """Path on k vertices (a single vertex for k = 1)."""
    if k < 1:
        raise GraphError("family-size", "path needs at least 1 vertex")
    edges = tuple((i, i + 1) for i in range(k - 1))
    return Graph(k, edges, origin)


def make_builtin(descriptor: str, origin: int = 0) -> Graph:
    """Build a named graph from a 'cycle:k' or 'path:k' descriptor."""
    name, sep, arg = descriptor.partition(":")
    if not sep or not arg.isdigit():
        raise GraphError("descriptor-invalid", f"cannot parse graph descriptor {descriptor!r}")
    k = int(arg)
    if name == "cycle":
        return cycle(k, origin)
    if name == "path":
        return path(k, origin)
    raise GraphError("descriptor-invalid", f"unknown graph family {name!r}")


def cartesian_product(g1: Graph, g2: Graph) -> Graph:
    """Cartesian product; vertex (a, b) maps to label a*|V2| + b (row-major)."""
    n2 = g2.vertex_count
    label = lambda a, b: a * n2 + b
    edges = []
    for a in g1.vertices:
        for u, v in g2.edges:
            edges.append((label(a, u), label(a, v)))
    for b in g2.vertices:
        for u, v in g1.edges:
            edges.append((label(u, b), label(v, b)))
    return Graph(g1.vertex_count * n2, tuple(edges), label(g1.origin, g2.origin))


def load_graph(document) -> Graph:
    """Validate a graph-file JSON object {"vertices", "edges", "origin"}."""
    if isinstance(document, str):
        return make_builtin(document)
    if not isinstance(document, dict):
        raise GraphError("document-invalid", "graph document must be an object or descriptor")
    unknown = set(document) - {"vertices", "edges", "origin"}
    if unknown:
        raise GraphError("document-invalid", f"unsupported graph fields {sorted(unknown)}")
    try:
        vertices = document["vertices"]
        edges = [tuple(e) for e in document["edges"]]
    except (KeyError, TypeError) as exc:
        raise GraphError("document-invalid", f"malformed graph document: {exc}") from exc
    origin = document.get("origin", 0)
    if not isinstance(origin, int):
        raise GraphError("origin-out-of-range", "origin must be an integer vertex label")
    return Graph(vertices, tuple(edges), origin)


def canonical_adjacency(graph: Graph) -> tuple:
    """Canonical adjacency-matrix form under vertex relabeling (small graphs only).

    Brute-forces all vertex permutations, so it is limited to at most 8
    vertices; used to compare graphs up to isomorphism (origin ignored).
    """
    k = graph.vertex_count
    if k > 8:
        raise ValueError("canonical form via permutations is limited to 8 vertices")
    adj = [[0] * k for _ in range(k)]
    for u, v in graph.edges:
        adj[u][v] = adj[v][u] = 1
    best = None
    for perm in permutations(range(k)):
        rows = tuple(tuple(adj[perm[i]][perm[j]] for j in range(k)) for i in range(k))
        if best is None or rows < best:
            best = rows
    return best
