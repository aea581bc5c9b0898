import logging
import math
import re
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np

from .exceptions import DisconnectedGraphError, GraphError, LengthError

logger = logging.getLogger(__name__)

Edge = tuple[int, int]


def canonical_edge(u, v):
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 1..n with a sorted canonical edge list."""

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.n < 1:
            raise GraphError(f"Graph needs at least one vertex, got n={self.n}")
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"loop edge ({u},{v}) is not allowed")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise GraphError(f"vertex index out of range in edge ({u},{v}) for n={self.n}")
            if u > v:
                raise GraphError(f"edge ({u},{v}) is not canonical; use build_graph")
        if list(self.edges) != sorted(set(self.edges)):
            raise GraphError("edges must be sorted and free of duplicates; use build_graph")

    @property
    def m(self):
        return len(self.edges)

    @property
    def vertices(self):
        return range(1, self.n + 1)

    @cached_property
    def _edge_index(self):
        return {edge: i for i, edge in enumerate(self.edges)}

    @cached_property
    def _adjacency(self):
        adjacency = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        return {v: tuple(sorted(nbrs)) for v, nbrs in adjacency.items()}

    def has_edge(self, u, v):
        return canonical_edge(u, v) in self._edge_index

    def edge_index(self, u, v):
        try:
            return self._edge_index[canonical_edge(u, v)]
        except KeyError:
            raise GraphError(f"edge ({u},{v}) is not in the graph") from None

    def neighbors(self, v):
        self.check_vertex(v)
        return self._adjacency[v]

    def degree(self, v):
        return len(self.neighbors(v))

    def incident_edges(self, v):
        return tuple(canonical_edge(v, w) for w in self.neighbors(v))

    def check_vertex(self, v):
        if not 1 <= v <= self.n:
            raise GraphError(f"vertex {v} out of range 1..{self.n}")

    def to_networkx(self):
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges)
        return graph

    @cached_property
    def is_connected(self):
        return nx.is_connected(self.to_networkx())

    def require_connected(self):
        if not self.is_connected:
            raise DisconnectedGraphError(f"graph with n={self.n}, m={self.m} is not connected")

    @property
    def is_cycle(self):
        return self.n >= 3 and self.m == self.n and self.is_connected and all(
            self.degree(v) == 2 for v in self.vertices
        )


@dataclass(frozen=True)
class LengthFunction:
    """Positive length per canonical edge; edges kept sorted like Graph.edges."""

    edges: tuple[Edge, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.edges) != len(self.values):
            raise LengthError(f"{len(self.edges)} edges but {len(self.values)} lengths")
        if list(self.edges) != sorted(set(self.edges)):
            raise LengthError("length function edges must be sorted canonical pairs without duplicates")
        for edge, value in zip(self.edges, self.values):
            if not (math.isfinite(value) and value > 0):
                raise LengthError(f"length of edge {edge} must be positive and finite, got {value!r}")

    @classmethod
    def for_graph(cls, g, values):
        values = tuple(float(x) for x in values)
        if len(values) != g.m:
            raise LengthError(f"graph has {g.m} edges but {len(values)} lengths were given")
        return cls(g.edges, values)

    @classmethod
    def uniform(cls, g, value=1.0):
        return cls.for_graph(g, [value] * g.m)

    @classmethod
    def from_mapping(cls, lengths):
        canonical = {}
        for (u, v), value in lengths.items():
            edge = canonical_edge(u, v)
            if edge in canonical:
                raise LengthError(f"edge {edge} has more than one length")
            canonical[edge] = float(value)
        edges = tuple(sorted(canonical))
        return cls(edges, tuple(canonical[e] for e in edges))

    def __getitem__(self, edge):
        try:
            return self.values[self.edges.index(canonical_edge(*edge))]
        except ValueError:
            raise LengthError(f"no length for edge {edge}") from None

    def __len__(self):
        return len(self.values)

    @property
    def array(self):
        return np.array(self.values, dtype=float)

    def total(self):
        return math.fsum(self.values)

    def scaled(self, c):
        if not c > 0:
            raise LengthError(f"scale factor must be positive, got {c!r}")
        return LengthFunction(self.edges, tuple(c * x for x in self.values))

    def as_dict(self):
        return dict(zip(self.edges, self.values))

    def check_graph(self, g):
        if self.edges != g.edges:
            missing = sorted(set(g.edges) - set(self.edges))
            extra = sorted(set(self.edges) - set(g.edges))
            if missing:
                raise LengthError(f"missing length for edge {missing[0]}")
            raise LengthError(f"length given for edge {extra[0]} which is not in the graph")


@dataclass(frozen=True)
class FujiwaraWeights:
    m0: tuple[float, ...]
    m1: tuple[float, ...]
    total_m0: float

    @property
    def m0_array(self):
        return np.array(self.m0, dtype=float)

    @property
    def m1_array(self):
        return np.array(self.m1, dtype=float)


def build_graph(n, edges):
    canonical = []
    seen = set()
    for pair in edges:
        u, v = (int(x) for x in pair)
        if u == v:
            raise GraphError(f"loop edge ({u},{v}) is not allowed")
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphError(f"vertex index out of range in edge ({u},{v}) for n={n}")
        edge = canonical_edge(u, v)
        if edge in seen:
            raise GraphError(f"duplicate edge {edge}")
        seen.add(edge)
        canonical.append(edge)
    g = Graph(n, tuple(sorted(canonical)))
    if not g.is_connected:
        logger.warning(f"Built a disconnected graph (n={n}, m={g.m}); spectral operations will reject it")
    return g


def cycle_graph(n):
    if n < 3:
        raise GraphError(f"cycle graph needs n >= 3, got {n}")
    return build_graph(n, [(i, i + 1) for i in range(1, n)] + [(1, n)])


def path_graph(n):
    if n < 2:
        raise GraphError(f"path graph needs n >= 2, got {n}")
    return build_graph(n, [(i, i + 1) for i in range(1, n)])


def fujiwara_weights(g, l):
    l.check_graph(g)
    lengths = l.array
    edges = np.array(g.edges, dtype=int).reshape(-1, 2) - 1
    m0 = np.zeros(g.n)
    np.add.at(m0, edges[:, 0], lengths)
    np.add.at(m0, edges[:, 1], lengths)
    return FujiwaraWeights(
        m0=tuple(m0.tolist()),
        m1=tuple((1.0 / lengths).tolist()),
        total_m0=float(m0.sum()),
    )


def normalize_lengths(l):
    return l.scaled(1.0 / (2.0 * l.total()))


def relabel(g, l, permutation):
    """Rename vertex v to permutation[v]; permutation must be a bijection of 1..n."""
    if sorted(permutation) != list(g.vertices) or sorted(permutation.values()) != list(g.vertices):
        raise GraphError("relabelling must be a permutation of the vertex set")
    lengths = {}
    for (u, v), value in zip(g.edges, l.values):
        lengths[canonical_edge(permutation[u], permutation[v])] = value
    relabelled = build_graph(g.n, lengths.keys())
    return relabelled, LengthFunction.from_mapping(lengths)


def find_cycle(g):
    """Shortest cycle of g, smallest sorted vertex set on ties; None for forests."""
    graph = g.to_networkx()
    best_key = None
    best_path = None
    for u, v in g.edges:
        graph.remove_edge(u, v)
        try:
            if not nx.has_path(graph, u, v):
                continue
            length = nx.shortest_path_length(graph, u, v) + 1
            if best_key is not None and length > best_key[0]:
                continue
            for path in nx.all_shortest_paths(graph, u, v):
                key = (length, sorted(path))
                if best_key is None or key < best_key:
                    best_key, best_path = key, path
        finally:
            graph.add_edge(u, v)
    if best_path is None:
        return None
    return _orient_cycle(best_path)


def _orient_cycle(cycle):
    start = cycle.index(min(cycle))
    rotated = cycle[start:] + cycle[:start]
    if rotated[-1] < rotated[1]:
        rotated = [rotated[0]] + rotated[:0:-1]
    return rotated


def distance_to_cycle(g, cycle):
    for v in cycle:
        if not 1 <= v <= g.n:
            raise GraphError(f"cycle vertex {v} is not in the graph")
    lengths = nx.multi_source_dijkstra_path_length(
        g.to_networkx(), set(cycle), weight=lambda u, v, d: 1
    )
    return {v: int(lengths[v]) for v in sorted(lengths)}


def random_connected_graph(n, edge_probability, rng, max_attempts=1000):
    if n == 1:
        return Graph(1, ())
    for _ in range(max_attempts):
        sample = nx.gnp_random_graph(n, edge_probability, seed=int(rng.integers(2**32)))
        if nx.is_connected(sample):
            return build_graph(n, [(u + 1, v + 1) for u, v in sample.edges()])
    raise GraphError(f"no connected sample with n={n}, p={edge_probability} in {max_attempts} attempts")


def random_lengths(g, rng, low=0.1, high=10.0):
    values = np.exp(rng.uniform(math.log(low), math.log(high), size=g.m))
    return LengthFunction.for_graph(g, values)


NAMED_GRAPH = re.compile(r'^(?P<kind>[a-z-]+?)-(?P<size>\d+)(?P<suffix>-pendant)?$')


def named_graph(name):
    fixed = {
        'paw': (4, [(1, 2), (2, 3), (1, 3), (3, 4)]),
        'bowtie': (5, [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (3, 5)]),
        'diamond': (4, [(1, 2), (2, 3), (1, 3), (2, 4), (3, 4)]),
    }
    if name in fixed:
        return build_graph(*fixed[name])
    match = NAMED_GRAPH.match(name)
    if match is None:
        raise GraphError(f"unknown graph name '{name}'")
    kind, size = match['kind'], int(match['size'])
    if match['suffix']:
        if kind != 'cycle':
            raise GraphError(f"unknown graph name '{name}'")
        base = cycle_graph(size)
        return build_graph(size + 1, list(base.edges) + [(size, size + 1)])
    if kind == 'path':
        return path_graph(size)
    if kind == 'cycle':
        return cycle_graph(size)
    if kind == 'star':
        return build_graph(size, [(1, v) for v in range(2, size + 1)])
    if kind == 'complete':
        return build_graph(size, [(u, v) for u in range(1, size + 1) for v in range(u + 1, size + 1)])
    if kind == 'triangle-tail':
        tail = [(3 + i, 4 + i) for i in range(size)]
        return build_graph(3 + size, [(1, 2), (2, 3), (1, 3)] + tail)
    raise GraphError(f"unknown graph name '{name}'")
