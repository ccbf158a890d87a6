"""Monotonicity certification: onset search, connection probabilities,
conjecture verification, and the bounded-degree arithmetic checks.

Two layers of onset are computed.  The matrix-level onset is the first
step at which every infected-to-infected entry of the n-step kernel
dominates the (n+1)-step entry on (0,1); once it holds at one step it
holds at every later step, so it also caps the search.  The vector-level
onset refines this along the actual initial distribution and is the
reported onset index.  Connection probabilities are assembled from the
layer distribution, the stationary distribution of the layer above, and
the vertical bonds between them, so that one polynomial per vertex and
step certifies the monotonicity of the connection probability itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import (
    Interval,
    NONNEGATIVE_VERDICTS,
    Polynomial,
    SignCertificate,
    UNIT_OPEN,
    certify_sign,
    poly_dot,
    poly_sum,
)
from .analysis import PolyVector, initial_distribution, stationary_distribution
from .graphs import Graph
from .kernels import (
    PolyMatrix,
    bridge_reach,
    build_lumped_kernel,
    build_reduced_kernel,
    config_weights,
)
from .patterns import Pattern

ZERO = Polynomial()


class OnsetCapExceeded(RuntimeError):
    """The onset search reached its cap without certifying monotonicity."""

    def __init__(self, cap: int):
        super().__init__(f"onset not certified within {cap} steps")
        self.cap = cap


def _infected_indices(kernel: PolyMatrix) -> list[int]:
    return [i for i, s in enumerate(kernel.states) if isinstance(s, Pattern)]


def _certify_task(payload: tuple[tuple, Interval]) -> SignCertificate:
    coeffs, interval = payload
    return certify_sign(Polynomial(coeffs), interval)


class _CertCache:
    """Deduplicates sign certification of identical polynomials.

    With more than one worker, distinct polynomials are certified in a
    process pool; results are keyed by coefficients, so the output does not
    depend on the worker count.
    """

    def __init__(self, interval: Interval, workers: int = 1):
        self.interval = interval
        self.workers = workers
        self.seen: dict[tuple, SignCertificate] = {}

    def certify(self, q: Polynomial) -> SignCertificate:
        cert = self.seen.get(q.coeffs)
        if cert is None:
            cert = certify_sign(q, self.interval)
            self.seen[q.coeffs] = cert
        return cert

    def certify_many(self, polys: Sequence[Polynomial]) -> list[SignCertificate]:
        pending: list[tuple] = []
        queued: set[tuple] = set()
        for q in polys:
            if q.coeffs not in self.seen and q.coeffs not in queued:
                pending.append(q.coeffs)
                queued.add(q.coeffs)
        if self.workers > 1 and len(pending) > 4:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                results = pool.map(
                    _certify_task,
                    [(coeffs, self.interval) for coeffs in pending],
                    chunksize=max(1, len(pending) // (4 * self.workers)),
                )
                for coeffs, cert in zip(pending, results):
                    self.seen[coeffs] = cert
        else:
            for coeffs in pending:
                self.seen[coeffs] = certify_sign(Polynomial(coeffs), self.interval)
        return [self.seen[q.coeffs] for q in polys]


_QUICK_PROBES = (Fraction(1, 2), Fraction(1, 4), Fraction(3, 4), Fraction(1, 10), Fraction(9, 10))


def _quick_negative(q: Polynomial) -> bool:
    return any(q(point) < 0 for point in _QUICK_PROBES)


def matrix_onset(
    kernel: PolyMatrix, cap: int = 64, workers: int = 1
) -> tuple[int, list[list[SignCertificate]]]:
    """Smallest step at which every infected-block kernel entry dominates its successor.

    Returns the step and the grid of certificates for the entry differences
    at that step.  Steps are first screened by exact evaluation at a few
    rationals, which refutes most failing steps cheaply.  Raises
    OnsetCapExceeded if no step up to the cap passes.
    """
    infected = _infected_indices(kernel)
    cache = _CertCache(UNIT_OPEN, workers)
    current = PolyMatrix.identity(kernel.states)
    for step in range(cap + 1):
        following = current @ kernel
        diffs = [
            [current.entries[y][x] - following.entries[y][x] for x in infected]
            for y in infected
        ]
        if not any(_quick_negative(d) for row in diffs for d in row):
            flat = cache.certify_many([d for row in diffs for d in row])
            if all(c.verdict in NONNEGATIVE_VERDICTS for c in flat):
                n = len(infected)
                certs = [flat[i * n : (i + 1) * n] for i in range(n)]
                return step, certs
        current = following
    raise OnsetCapExceeded(cap)


def _vector_times_matrix(vector: Sequence[Polynomial], kernel: PolyMatrix) -> list[Polynomial]:
    columns = list(zip(*kernel.entries))
    return [poly_dot(vector, col) for col in columns]


@dataclass
class OnsetCertificate:
    """Certified onset of pattern-probability monotonicity for one graph.

    The matrix-level step covers every later step; the per-step
    certificates refine the onset below it along the initial distribution.
    Only infected states are checked: the absorbing class gains mass every
    step by construction, so its coordinate is excluded by convention.
    """

    graph: str
    states: list[str]
    matrix_step: int
    onset: int
    step_certificates: list[list[SignCertificate]]
    matrix_certificates: list[list[SignCertificate]]
    coordinate_convention: str = "infected-states-only"

    def validate(self) -> None:
        if not 0 <= self.onset <= self.matrix_step:
            raise ValueError("onset exceeds the matrix-level step")
        if len(self.step_certificates) != self.matrix_step:
            raise ValueError("per-step certificates do not cover every step below the cap")
        for n, row in enumerate(self.step_certificates):
            ok = all(c.verdict in NONNEGATIVE_VERDICTS for c in row)
            if n >= self.onset and not ok:
                raise ValueError(f"certificate at step {n} contradicts the onset")
        if self.onset > 0:
            last = self.step_certificates[self.onset - 1]
            if all(c.verdict in NONNEGATIVE_VERDICTS for c in last):
                raise ValueError("onset is not minimal")
        for row in self.matrix_certificates:
            for cert in row:
                if cert.verdict not in NONNEGATIVE_VERDICTS:
                    raise ValueError("matrix-level certificate failed")

    def to_dict(self) -> dict:
        return {
            "graph": self.graph,
            "states": list(self.states),
            "matrix_step": self.matrix_step,
            "onset": self.onset,
            "step_certificates": [
                [c.to_dict() for c in row] for row in self.step_certificates
            ],
            "matrix_certificates": [
                [c.to_dict() for c in row] for row in self.matrix_certificates
            ],
            "coordinate_convention": self.coordinate_convention,
        }

    @staticmethod
    def from_dict(data: dict) -> "OnsetCertificate":
        return OnsetCertificate(
            graph=data["graph"],
            states=list(data["states"]),
            matrix_step=data["matrix_step"],
            onset=data["onset"],
            step_certificates=[
                [SignCertificate.from_dict(c) for c in row]
                for row in data["step_certificates"]
            ],
            matrix_certificates=[
                [SignCertificate.from_dict(c) for c in row]
                for row in data["matrix_certificates"]
            ],
            coordinate_convention=data["coordinate_convention"],
        )


def vector_onset(
    initial: PolyVector,
    kernel: PolyMatrix,
    matrix_step: int,
    matrix_certificates: Optional[list[list[SignCertificate]]] = None,
    graph_label: str = "",
    workers: int = 1,
) -> OnsetCertificate:
    """Refine the matrix-level onset along the initial distribution.

    Certifies the scaled one-step probability drop of every infected state
    for each step below the matrix-level step; the reported onset is the
    smallest index from which all of those certificates are nonnegative.
    """
    if tuple(initial.states) != tuple(kernel.states):
        raise ValueError("initial distribution and kernel have different state spaces")
    infected = _infected_indices(kernel)
    cache = _CertCache(UNIT_OPEN, workers)
    if matrix_certificates is None:
        power = PolyMatrix.identity(kernel.states)
        for _ in range(matrix_step):
            power = power @ kernel
        following = power @ kernel
        matrix_certificates = [
            [
                cache.certify(power.entries[y][x] - following.entries[y][x])
                for x in infected
            ]
            for y in infected
        ]
    weights = list(initial.entries)
    step_certs: list[list[SignCertificate]] = []
    for _ in range(matrix_step):
        advanced = _vector_times_matrix(weights, kernel)
        certs = cache.certify_many([weights[i] - advanced[i] for i in infected])
        step_certs.append(certs)
        weights = advanced
    onset = 0
    for n in reversed(range(matrix_step)):
        if any(c.verdict not in NONNEGATIVE_VERDICTS for c in step_certs[n]):
            onset = n + 1
            break
    certificate = OnsetCertificate(
        graph=graph_label,
        states=[str(kernel.states[i]) for i in infected],
        matrix_step=matrix_step,
        onset=onset,
        step_certificates=step_certs,
        matrix_certificates=matrix_certificates,
    )
    certificate.validate()
    return certificate


# ---------------------------------------------------------------------------
# Connection probabilities.
# ---------------------------------------------------------------------------


def _bridge_weight_table(
    graph: Graph, infected_states: Sequence[Pattern], stationary: PolyVector
) -> list[list[Polynomial]]:
    """table[v][i]: scaled probability that vertex v links to the infection of
    state i through one stationary layer above and its vertical bonds."""
    k = graph.vertex_count
    vertical_weights = config_weights(k)
    products = [
        [entry * w for w in vertical_weights] for entry in stationary.entries
    ]
    acc: list[list[list[Polynomial]]] = [
        [[] for _ in infected_states] for _ in range(k)
    ]
    for i, state in enumerate(infected_states):
        for yi, upper in enumerate(stationary.states):
            row = products[yi]
            for z in range(1 << k):
                mask = bridge_reach(graph, state, upper, z)
                if mask:
                    weight = row[z.bit_count()]
                    v = 0
                    while mask:
                        if mask & 1:
                            acc[v][i].append(weight)
                        mask >>= 1
                        v += 1
    return [[poly_sum(cell) for cell in row] for row in acc]


class _Engine:
    """Shared pipeline: kernels, distributions, and the bridge weight table."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self.reduced = build_reduced_kernel(graph)
        self.stationary = stationary_distribution(self.reduced)
        self.kernel = build_lumped_kernel(graph)
        self.initial = initial_distribution(self.stationary, graph)
        if tuple(self.initial.states) != tuple(self.kernel.states):
            raise AssertionError("lumped state spaces disagree")
        self.infected_indices = _infected_indices(self.kernel)
        self.infected_states = [self.kernel.states[i] for i in self.infected_indices]
        self.bridge = _bridge_weight_table(graph, self.infected_states, self.stationary)
        self._weights: list[list[Polynomial]] = [list(self.initial.entries)]

    def weights_at(self, n: int) -> list[Polynomial]:
        """Scaled distribution of the layer pattern after n steps."""
        while len(self._weights) <= n:
            self._weights.append(_vector_times_matrix(self._weights[-1], self.kernel))
        return self._weights[n]

    def connection(self, vertex: int, n: int) -> Polynomial:
        weights = self.weights_at(n)
        infected_weights = [weights[i] for i in self.infected_indices]
        return poly_dot(infected_weights, self.bridge[vertex])

    def connection_drop(self, vertex: int, n: int) -> Polynomial:
        now = self.weights_at(n)
        later = self.weights_at(n + 1)
        drop = [now[i] - later[i] for i in self.infected_indices]
        return poly_dot(drop, self.bridge[vertex])


def connection_polynomial(
    graph: Graph,
    vertex: int,
    n: int,
    initial: PolyVector,
    kernel: PolyMatrix,
    stationary: PolyVector,
) -> Polynomial:
    """Connection probability from the origin to (vertex, n), scaled by the
    squared normalizer: the sum over layer state, upper-layer partition and
    vertical bonds of the weight of every triple linking the infection to the
    vertex."""
    if vertex not in graph.vertices:
        raise ValueError(f"vertex {vertex} not in graph")
    if n < 0:
        raise ValueError("layer index must be nonnegative")
    infected = _infected_indices(kernel)
    states = [kernel.states[i] for i in infected]
    bridge = _bridge_weight_table(graph, states, stationary)
    weights = list(initial.entries)
    for _ in range(n):
        weights = _vector_times_matrix(weights, kernel)
    return poly_dot([weights[i] for i in infected], bridge[vertex])


def expected_infected_polynomial(graph: Graph, n: int) -> Polynomial:
    """Expected number of infected vertices at layer n, scaled by the squared
    normalizer; the sum of the connection polynomials over all vertices."""
    engine = _Engine(graph)
    return poly_sum(engine.connection(v, n) for v in graph.vertices)


# ---------------------------------------------------------------------------
# Conjecture certificates.
# ---------------------------------------------------------------------------

PROVEN = "proven"
COUNTEREXAMPLE = "counterexample"
INCONCLUSIVE = "inconclusive"


@dataclass
class ConjectureCertificate:
    """Full monotonicity verdict for one graph: onset plus finite-range checks."""

    graph: str
    verdict: str
    onset_certificate: Optional[OnsetCertificate]
    vertices: list[int] = field(default_factory=list)
    connection_certificates: list[list[SignCertificate]] = field(default_factory=list)
    witness: Optional[dict] = None

    def validate(self) -> None:
        if self.verdict == PROVEN:
            if self.onset_certificate is None:
                raise ValueError("proven verdict requires an onset certificate")
            self.onset_certificate.validate()
            for row in self.connection_certificates:
                for cert in row:
                    if cert.verdict not in NONNEGATIVE_VERDICTS:
                        raise ValueError("proven verdict with failing connection certificate")
            if len(self.connection_certificates) != self.onset_certificate.onset:
                raise ValueError("finite-range certificates do not cover every step below onset")
        elif self.verdict == COUNTEREXAMPLE:
            if self.witness is None:
                raise ValueError("counterexample verdict requires a witness")
        elif self.verdict != INCONCLUSIVE:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    def to_dict(self) -> dict:
        out = {
            "graph": self.graph,
            "verdict": self.verdict,
            "onset_certificate": (
                None if self.onset_certificate is None else self.onset_certificate.to_dict()
            ),
            "vertices": list(self.vertices),
            "connection_certificates": [
                [c.to_dict() for c in row] for row in self.connection_certificates
            ],
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out

    @staticmethod
    def from_dict(data: dict) -> "ConjectureCertificate":
        onset = data.get("onset_certificate")
        return ConjectureCertificate(
            graph=data["graph"],
            verdict=data["verdict"],
            onset_certificate=None if onset is None else OnsetCertificate.from_dict(onset),
            vertices=list(data["vertices"]),
            connection_certificates=[
                [SignCertificate.from_dict(c) for c in row]
                for row in data["connection_certificates"]
            ],
            witness=data.get("witness"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def verify_conjecture(
    graph: Graph, cap: int = 64, label: str = "", workers: int = 1
) -> ConjectureCertificate:
    """Certify connection-probability monotonicity for every layer index.

    Combines the onset certificate (covering all steps from the onset on)
    with direct certification of the connection-probability drop for every
    vertex at each step below the onset.
    """
    label = label or graph.describe()
    engine = _Engine(graph)
    try:
        matrix_step, matrix_certs = matrix_onset(engine.kernel, cap, workers)
    except OnsetCapExceeded:
        return ConjectureCertificate(label, INCONCLUSIVE, None)
    onset_cert = vector_onset(
        engine.initial, engine.kernel, matrix_step, matrix_certs, label, workers
    )
    cache = _CertCache(UNIT_OPEN, workers)
    connection_certs: list[list[SignCertificate]] = []
    witness = None
    for n in range(onset_cert.onset):
        row = []
        for v in graph.vertices:
            cert = cache.certify(engine.connection_drop(v, n))
            row.append(cert)
            if witness is None and cert.verdict not in NONNEGATIVE_VERDICTS:
                witness = {
                    "vertex": v,
                    "n": n,
                    "certificate": cert.to_dict(),
                }
        connection_certs.append(row)
    verdict = PROVEN if witness is None else COUNTEREXAMPLE
    certificate = ConjectureCertificate(
        graph=label,
        verdict=verdict,
        onset_certificate=onset_cert,
        vertices=list(graph.vertices),
        connection_certificates=connection_certs,
        witness=witness,
    )
    certificate.validate()
    return certificate


# ---------------------------------------------------------------------------
# Bounded-degree arithmetic (exact rational checks).
# ---------------------------------------------------------------------------


def _path_count_bound(delta: int, p: Fraction) -> Fraction:
    """Upper bound on the expected upward spread from one vertex at parameter p."""
    first = p * (1 + p) / (1 - (delta - 1) * p)
    correction = first * first * (delta * p * p) / (1 - (delta + 1) * p)
    return first + correction


def degree_bound_report(max_degree: int) -> list[dict]:
    """Exact rational table of the bounded-degree monotonicity criterion.

    For each maximum degree: the parameter threshold 10/(10*degree + 14),
    the spread bound g at the threshold, and its decreasing majorant h,
    with flags for g <= 1 and h <= 1.
    """
    if max_degree < 0:
        raise ValueError("max degree must be nonnegative")
    rows = []
    for delta in range(max_degree + 1):
        threshold = Fraction(10, 10 * delta + 14)
        g = _path_count_bound(delta, threshold)
        h = (1 + Fraction(1, 1) / (delta + Fraction(7, 5))) / Fraction(12, 5) * (
            1 + Fraction(25, 24)
        )
        rows.append(
            {
                "delta": delta,
                "p": threshold,
                "g": g,
                "g_le_1": g <= 1,
                "h": h,
                "h_le_1": h <= 1,
            }
        )
    return rows


def verify_expected_count_monotonicity(
    graph: Graph, n_max: int, delta: Optional[int] = None
) -> list[SignCertificate]:
    """Certify the expected-infected-count drop on (0, 10/(10*delta+14)].

    delta defaults to the maximum degree of the graph; passing it explicitly
    checks the criterion at a different degree threshold.
    """
    if delta is None:
        delta = graph.max_degree
    threshold = Fraction(10, 10 * delta + 14)
    interval = Interval(0, threshold, closed_hi=True)
    engine = _Engine(graph)
    expected = [
        poly_sum(engine.connection(v, n) for v in graph.vertices)
        for n in range(n_max + 2)
    ]
    return [
        certify_sign(expected[n] - expected[n + 1], interval) for n in range(n_max + 1)
    ]
