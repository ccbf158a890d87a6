"""Single-layer transition kernels of the pattern chain, as exact polynomial matrices.

A layer configuration assigns open/closed to b = |E| + |V| bonds: positions
0..|E|-1 are the horizontal edges (graph edge order) and positions |E|..b-1
the vertical bonds (vertex order).  Kernel entries accumulate the monomials
p^k (1-p)^(b-k) of all configurations mapping a source pattern to a target
pattern, so rows sum to the constant 1 exactly.

Three chains are built: the full chain on all patterns, the connectivity
chain on the uninfected partitions reachable from the all-singletons state,
and the lumped chain on infected states plus one absorbing class.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import ONE, P, Polynomial, poly_sum
from .graphs import Graph
from .patterns import (
    DAGGER,
    Pattern,
    PatternClass,
    STAR,
    all_singletons_pattern,
    attach_infection,
    enumerate_patterns,
    state_from_string,
    state_to_string,
)
from .unionfind import UnionFind


@dataclass(frozen=True)
class BondConfig:
    """One layer's open/closed assignment, packed into a bitmask of width b."""

    bits: int
    width: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.width):
            raise ValueError("bond configuration outside bitmask width")

    @property
    def open_count(self) -> int:
        return self.bits.bit_count()

    @property
    def closed_count(self) -> int:
        return self.width - self.open_count

    def is_open(self, position: int) -> bool:
        return bool(self.bits >> position & 1)

    @staticmethod
    def all_closed(width: int) -> "BondConfig":
        return BondConfig(0, width)

    @staticmethod
    def all_open(width: int) -> "BondConfig":
        return BondConfig((1 << width) - 1, width)


def config_weights(width: int) -> list[Polynomial]:
    """weights[k] = p^k (1-p)^(width-k), the probability of a config with k open bonds."""
    one_minus = Polynomial((1, -1))
    return [P**k * one_minus ** (width - k) for k in range(width + 1)]


def step_pattern(graph: Graph, source: Pattern, config) -> Pattern:
    """Deterministic successor pattern of a source pattern under one layer's bonds.

    Builds a union-find over both layer copies plus the marker: the source
    blocks connect the lower copy, open horizontal bonds connect the upper
    copy, open vertical bonds connect the copies, and the result is the
    induced partition of the upper copy plus the marker.
    """
    bits = config.bits if isinstance(config, BondConfig) else config
    k = graph.vertex_count
    star_node = 2 * k
    uf = UnionFind(2 * k + 1)
    for block in source.blocks:
        anchor = star_node if block[0] == STAR else block[0]
        for element in block[1:]:
            uf.union(anchor, element)
    for index, (u, v) in enumerate(graph.edges):
        if bits >> index & 1:
            uf.union(k + u, k + v)
    offset = graph.edge_count
    for v in range(k):
        if bits >> (offset + v) & 1:
            uf.union(v, k + v)
    groups: dict[int, list[int]] = {}
    for v in range(k):
        groups.setdefault(uf.find(k + v), []).append(v)
    star_root = uf.find(star_node)
    blocks = []
    star_used = False
    for root, members in groups.items():
        if root == star_root:
            blocks.append([STAR] + members)
            star_used = True
        else:
            blocks.append(members)
    if not star_used:
        blocks.append([STAR])
    return Pattern(blocks)


@dataclass(frozen=True)
class PolyMatrix:
    """Square matrix of exact polynomials indexed by chain states."""

    states: tuple
    entries: tuple[tuple[Polynomial, ...], ...]

    def __post_init__(self):
        if len(self.entries) != len(self.states):
            raise ValueError("entry rows do not match states")
        if any(len(row) != len(self.states) for row in self.entries):
            raise ValueError("matrix is not square")

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, state) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise KeyError(f"unknown state {state}") from None

    def entry(self, source, target) -> Polynomial:
        return self.entries[self.index(source)][self.index(target)]

    def row(self, source) -> tuple[Polynomial, ...]:
        return self.entries[self.index(source)]

    def row_sums(self) -> list[Polynomial]:
        return [poly_sum(row) for row in self.entries]

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.states != other.states:
            raise ValueError("state spaces differ")
        cols = list(zip(*other.entries))
        rows = tuple(
            tuple(_dot(row, col) for col in cols) for row in self.entries
        )
        return PolyMatrix(self.states, rows)

    @staticmethod
    def identity(states) -> "PolyMatrix":
        n = len(states)
        return PolyMatrix(
            tuple(states),
            tuple(tuple(ONE if i == j else Polynomial() for j in range(n)) for i in range(n)),
        )

    def evaluate(self, at) -> list[list[Fraction]]:
        at = Fraction(at)
        return [[Fraction(entry(at)) for entry in row] for row in self.entries]

    def max_degree(self) -> int:
        return max(entry.degree for row in self.entries for entry in row)

    def to_dict(self) -> dict:
        return {
            "states": [state_to_string(s) for s in self.states],
            "entries": [[entry.to_strings() for entry in row] for row in self.entries],
        }

    @staticmethod
    def from_dict(data: dict) -> "PolyMatrix":
        states = tuple(state_from_string(s) for s in data["states"])
        entries = tuple(
            tuple(Polynomial.from_strings(cell) for cell in row) for row in data["entries"]
        )
        return PolyMatrix(states, entries)


def _dot(row: Sequence[Polynomial], col: Sequence[Polynomial]) -> Polynomial:
    acc: list = []
    for a, b in zip(row, col):
        ca, cb = a.coeffs, b.coeffs
        if not ca or not cb:
            continue
        need = len(ca) + len(cb) - 1
        if need > len(acc):
            acc.extend([0] * (need - len(acc)))
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    acc[i + j] += x * y
    return Polynomial(acc)


def matrix_power(kernel: PolyMatrix, exponent: int) -> PolyMatrix:
    result = PolyMatrix.identity(kernel.states)
    base = kernel
    e = exponent
    while e:
        if e & 1:
            result = result @ base
        base = base @ base if e > 1 else base
        e >>= 1
    return result


# ---------------------------------------------------------------------------
# Kernel construction.
# ---------------------------------------------------------------------------


def successor_table(graph: Graph, sources: Sequence[Pattern]) -> list[list[Pattern]]:
    """table[i][z] = successor pattern of sources[i] under config bitmask z.

    Collapses the lower layer to block identifiers before running the
    per-config union-find, which matches step_pattern exactly.
    """
    k = graph.vertex_count
    b = graph.bond_count
    edges = graph.edges
    offset = graph.edge_count
    table: list[list[Pattern]] = []
    pattern_cache: dict[tuple, Pattern] = {}
    for source in sources:
        block_id = {}
        for bid, block in enumerate(source.blocks):
            for element in block:
                block_id[element] = bid
        star_bid = block_id[STAR]
        nodes = k + len(source.blocks)
        row = []
        for z in range(1 << b):
            parent = list(range(nodes))

            def find(i):
                while parent[i] != i:
                    parent[i] = parent[parent[i]]
                    i = parent[i]
                return i

            for index, (u, v) in enumerate(edges):
                if z >> index & 1:
                    ru, rv = find(u), find(v)
                    if ru != rv:
                        parent[rv] = ru
            for v in range(k):
                if z >> (offset + v) & 1:
                    ru, rv = find(v), find(k + block_id[v])
                    if ru != rv:
                        parent[rv] = ru
            star_root = find(k + star_bid)
            groups: dict[int, list[int]] = {}
            for v in range(k):
                groups.setdefault(find(v), []).append(v)
            blocks = []
            star_used = False
            for root, members in groups.items():
                if root == star_root:
                    blocks.append((STAR,) + tuple(members))
                    star_used = True
                else:
                    blocks.append(tuple(members))
            if not star_used:
                blocks.append((STAR,))
            key = tuple(sorted(blocks))
            cached = pattern_cache.get(key)
            if cached is None:
                cached = Pattern(blocks)
                pattern_cache[key] = cached
            row.append(cached)
        table.append(row)
    return table


def _rows_from_counts(
    graph: Graph,
    sources: Sequence[Pattern],
    columns: dict,
    collapse_uninfected: bool = False,
) -> list[list[Polynomial]]:
    """Accumulate per-row count vectors over open-bond multiplicity, then weight."""
    b = graph.bond_count
    weights = config_weights(b)
    popcounts = [z.bit_count() for z in range(1 << b)]
    table = successor_table(graph, sources)
    rows = []
    for row_targets in table:
        counts: dict[int, list[int]] = {}
        for z, target in enumerate(row_targets):
            state: PatternClass = target
            if collapse_uninfected and not target.infected:
                state = DAGGER
            col = columns[state]
            per = counts.get(col)
            if per is None:
                per = [0] * (b + 1)
                counts[col] = per
            per[popcounts[z]] += 1
        row = [Polynomial() for _ in range(len(columns))]
        for col, per in counts.items():
            row[col] = poly_sum(
                count * weights[k] for k, count in enumerate(per) if count
            )
        rows.append(row)
    return rows


def build_full_kernel(graph: Graph) -> PolyMatrix:
    """Transition matrix of the pattern chain on all partitions of V plus {*}."""
    states = enumerate_patterns(graph)
    columns = {s: i for i, s in enumerate(states)}
    rows = _rows_from_counts(graph, states, columns)
    return PolyMatrix(tuple(states), tuple(tuple(r) for r in rows))


def _reachable_indices(rows: Sequence[Sequence[Polynomial]], start: int) -> set[int]:
    seen = {start}
    frontier = [start]
    while frontier:
        current = frontier.pop()
        for j, entry in enumerate(rows[current]):
            if j not in seen and not entry.is_zero:
                seen.add(j)
                frontier.append(j)
    return seen


def core_partitions(graph: Graph) -> list[Pattern]:
    """Uninfected partitions reachable from the all-singletons pattern."""
    uninfected = [x for x in enumerate_patterns(graph) if not x.infected]
    columns = {s: i for i, s in enumerate(uninfected)}
    rows = _rows_from_counts(graph, uninfected, columns)
    start = columns[all_singletons_pattern(graph.vertex_count)]
    keep = _reachable_indices(rows, start)
    return [s for i, s in enumerate(uninfected) if i in keep]


def build_reduced_kernel(graph: Graph) -> PolyMatrix:
    """Transition matrix of the connectivity chain on its reachable partitions."""
    core = core_partitions(graph)
    columns = {s: i for i, s in enumerate(core)}
    rows = _rows_from_counts(graph, core, columns)
    return PolyMatrix(tuple(core), tuple(tuple(r) for r in rows))


def lumped_state_list(core: Sequence[Pattern]) -> list[PatternClass]:
    """Absorbing class first, then every infected pattern over the given cores."""
    infected = []
    for partition in core:
        for block in partition.blocks:
            if block == (STAR,):
                continue
            infected.append(attach_infection(partition, block[0]))
    infected.sort()
    return [DAGGER] + infected


def build_lumped_kernel(graph: Graph) -> PolyMatrix:
    """Transition matrix on infected states plus the absorbing class."""
    core = core_partitions(graph)
    states = lumped_state_list(core)
    columns: dict[PatternClass, int] = {s: i for i, s in enumerate(states)}
    infected = states[1:]
    rows = _rows_from_counts(graph, infected, columns, collapse_uninfected=True)
    dagger_row = [ONE] + [Polynomial()] * (len(states) - 1)
    all_rows = [dagger_row] + rows
    return PolyMatrix(tuple(states), tuple(tuple(r) for r in all_rows))


# ---------------------------------------------------------------------------
# Two-layer connectivity used by connection probabilities.
# ---------------------------------------------------------------------------


def bridge_reach(graph: Graph, infected: Pattern, upper: Pattern, vertical_bits: int) -> int:
    """Bitmask of lower-layer vertices linked to the infection through one extra layer.

    The lower layer carries the infected pattern, the upper layer the
    uninfected partition, and vertical_bits the open vertical bonds between
    them; bit v of the result is set iff lower vertex v connects to the
    infected block through this two-layer structure.
    """
    k = graph.vertex_count
    star_node = 2 * k
    uf = UnionFind(2 * k + 1)
    for block in infected.blocks:
        anchor = star_node if block[0] == STAR else block[0]
        for element in block[1:]:
            uf.union(anchor, element)
    for block in upper.blocks:
        members = [e for e in block if e != STAR]
        for a, b in zip(members, members[1:]):
            uf.union(k + a, k + b)
    for v in range(k):
        if vertical_bits >> v & 1:
            uf.union(v, k + v)
    star_root = uf.find(star_node)
    mask = 0
    for v in range(k):
        if uf.find(v) == star_root:
            mask |= 1 << v
    return mask


def bridge_reach_table(
    graph: Graph, infected_states: Sequence[Pattern], core: Sequence[Pattern]
) -> list[list[list[int]]]:
    """reach[x][y][z] = bridge_reach mask for every state pair and vertical config."""
    k = graph.vertex_count
    return [
        [
            [bridge_reach(graph, x, y, z) for z in range(1 << k)]
            for y in core
        ]
        for x in infected_states
    ]
