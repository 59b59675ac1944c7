"""
The complete graph K_n, its contraction maps and the free module A_n.

Vertices of K_n are labeled 0 .. n-1 and edges are ordered lexicographically.
Contracting an edge {lo, hi} of K_{n+1} merges hi into lo and shifts every
label above hi down by one.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from shared.core.config import Config, HARD_MAX_GRAPH_N
from shared.core.errors import BoundsError, InvalidEdgeError, RingMismatchError, ValidationError
from shared.core.models import EdgeCoefficient, EdgeVectorDocument, RingSpec
from shared.core.rings import RingElement, RingHandle

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Edge:
    """An unordered pair {lo, hi} of vertices, lo < hi."""
    lo: int
    hi: int

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise InvalidEdgeError(f"Invalid edge {{{self.lo},{self.hi}}}: need 0 <= lo < hi")

    @classmethod
    def of(cls, i: int, j: int) -> "Edge":
        """Edge from endpoints in either order."""
        if i == j:
            raise InvalidEdgeError(f"Loop {{{i},{j}}} is not an edge of a complete graph")
        return cls(min(i, j), max(i, j))

    def bounds(self, v: int) -> bool:
        return v == self.lo or v == self.hi

    def to_list(self) -> List[int]:
        return [self.lo, self.hi]

    def __str__(self) -> str:
        return f"{{{self.lo},{self.hi}}}"


class Collapsed(Enum):
    """Image of the contracted edge under its own contraction map."""
    COLLAPSED = "collapsed"


COLLAPSED = Collapsed.COLLAPSED


@dataclass(frozen=True)
class CompleteGraph:
    """K_n on vertices 0 .. n-1."""
    n: int

    def __post_init__(self):
        max_n = min(Config.MAX_GRAPH_N, HARD_MAX_GRAPH_N)
        if isinstance(self.n, bool) or not isinstance(self.n, int) or not 1 <= self.n <= max_n:
            raise BoundsError(f"Complete graph size must satisfy 1 <= n <= {max_n}, got {self.n!r}")

    @cached_property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(Edge(i, j) for i in range(self.n) for j in range(i + 1, self.n))

    @property
    def edge_count(self) -> int:
        return self.n * (self.n - 1) // 2

    @property
    def vertices(self) -> range:
        return range(self.n)

    def validate_edge(self, e: Edge) -> Edge:
        if not isinstance(e, Edge) or e.hi >= self.n:
            raise InvalidEdgeError(f"Edge {e} is not an edge of K_{self.n}")
        return e

    def edge_index(self, e: Edge) -> int:
        """Position of ``e`` in the lexicographic edge order."""
        self.validate_edge(e)
        i, j = e.lo, e.hi
        return i * self.n - i * (i + 1) // 2 + (j - i - 1)

    def edge_at(self, k: int) -> Edge:
        return self.edges[k]


def edge_index(graph: CompleteGraph, e: Edge) -> int:
    return graph.edge_index(e)


def edge_at(graph: CompleteGraph, k: int) -> Edge:
    return graph.edge_at(k)


def validate_permutation(sigma: Sequence[int], n: int) -> Tuple[int, ...]:
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(n)):
        raise ValidationError(f"{list(sigma)} is not a permutation of 0..{n - 1}")
    return sigma


@dataclass(frozen=True)
class EdgeVector:
    """An element of A_n: one ring coefficient per edge, in lexicographic edge order."""
    graph: CompleteGraph
    ring: RingHandle
    coefficients: Tuple[RingElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if len(self.coefficients) != self.graph.edge_count:
            raise ValidationError(
                f"K_{self.graph.n} has {self.graph.edge_count} edges, got {len(self.coefficients)} coefficients"
            )
        for coefficient in self.coefficients:
            self.ring.check_member(coefficient)

    @property
    def n(self) -> int:
        return self.graph.n

    @classmethod
    def zero(cls, graph: CompleteGraph, ring: RingHandle) -> "EdgeVector":
        return cls(graph, ring, (ring.zero(),) * graph.edge_count)

    @classmethod
    def unit(cls, graph: CompleteGraph, ring: RingHandle, e0: Edge) -> "EdgeVector":
        """The generator 1_{e0} of the factor A.e0."""
        return cls.zero(graph, ring).with_coefficient(e0, ring.one())

    @classmethod
    def from_mapping(cls, graph: CompleteGraph, ring: RingHandle,
                     values: Mapping[Edge, Union[RingElement, int]]) -> "EdgeVector":
        coefficients = [ring.zero()] * graph.edge_count
        for e, value in values.items():
            coefficients[graph.edge_index(e)] = value if isinstance(value, RingElement) else ring.from_int(value)
        return cls(graph, ring, coefficients)

    def coefficient(self, e: Edge) -> RingElement:
        return self.coefficients[self.graph.edge_index(e)]

    def with_coefficient(self, e: Edge, value: RingElement) -> "EdgeVector":
        coefficients = list(self.coefficients)
        coefficients[self.graph.edge_index(e)] = value
        return EdgeVector(self.graph, self.ring, coefficients)

    def items(self) -> Iterable[Tuple[Edge, RingElement]]:
        return zip(self.graph.edges, self.coefficients)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coefficients)

    def _check_compatible(self, other: "EdgeVector") -> None:
        if other.graph != self.graph:
            raise ValidationError(f"Edge vectors on K_{self.n} and K_{other.n} cannot be combined")
        if other.ring != self.ring:
            raise RingMismatchError(f"Ring mismatch: {self.ring.spec} vs {other.ring.spec}")

    def __add__(self, other: "EdgeVector") -> "EdgeVector":
        self._check_compatible(other)
        return EdgeVector(self.graph, self.ring, [x + y for x, y in zip(self.coefficients, other.coefficients)])

    def __neg__(self) -> "EdgeVector":
        return EdgeVector(self.graph, self.ring, [-x for x in self.coefficients])

    def __sub__(self, other: "EdgeVector") -> "EdgeVector":
        return self + (-other)

    def scale(self, r: RingElement) -> "EdgeVector":
        self.ring.check_member(r)
        return EdgeVector(self.graph, self.ring, [r * x for x in self.coefficients])

    def permute_vertices(self, sigma: Sequence[int]) -> "EdgeVector":
        """The vector σ·a whose coefficient on {σ(i), σ(j)} is a_{ij}."""
        sigma = validate_permutation(sigma, self.n)
        values = {Edge.of(sigma[e.lo], sigma[e.hi]): c for e, c in self.items()}
        return EdgeVector.from_mapping(self.graph, self.ring, values)

    # JSON edge-vector format

    def to_document(self) -> EdgeVectorDocument:
        return EdgeVectorDocument(
            n=self.n,
            ring=RingSpec(**self.ring.to_dict()),
            coefficients=[
                EdgeCoefficient(edge=e.to_list(), value=str(c))
                for e, c in self.items() if not c.is_zero()
            ],
        )

    def to_dict(self) -> Dict:
        """Convert to dictionary for JSON serialization."""
        return self.to_document().model_dump(exclude_none=True)

    @classmethod
    def from_document(cls, document: EdgeVectorDocument) -> "EdgeVector":
        ring = RingHandle.from_dict(document.ring.to_dict())
        graph = CompleteGraph(document.n)
        values: Dict[Edge, RingElement] = {}
        for entry in document.coefficients:
            e = graph.validate_edge(Edge.of(*entry.edge))
            if e in values:
                raise ValidationError(f"Edge {e} listed twice")
            values[e] = ring.parse_element(entry.value)
        return cls.from_mapping(graph, ring, values)


def permute_vertices(a: EdgeVector, sigma: Sequence[int]) -> EdgeVector:
    return a.permute_vertices(sigma)


def unit_vector(graph: CompleteGraph, ring: RingHandle, e0: Edge) -> EdgeVector:
    return EdgeVector.unit(graph, ring, graph.validate_edge(e0))


@dataclass(frozen=True)
class ContractionMap:
    """The quotient map c_e : K_{n+1} -> K_n collapsing one edge."""
    source_n: int
    contracted_edge: Edge
    vertex_map: Tuple[int, ...]
    special_vertex: int

    @property
    def source(self) -> CompleteGraph:
        return CompleteGraph(self.source_n)

    @property
    def target(self) -> CompleteGraph:
        return CompleteGraph(self.source_n - 1)

    @cached_property
    def _preimages(self) -> Dict[Edge, Tuple[Edge, ...]]:
        fibers: Dict[Edge, List[Edge]] = {f: [] for f in self.target.edges}
        for e in self.source.edges:
            image = contract_edge_image(self, e)
            if image is not COLLAPSED:
                fibers[image].append(e)
        return {f: tuple(es) for f, es in fibers.items()}

    def preimages(self, f: Edge) -> Tuple[Edge, ...]:
        """The one or two edges of K_{n+1} mapping onto ``f``."""
        self.target.validate_edge(f)
        return self._preimages[f]


def build_contraction(n_plus_1: int, e0: Edge) -> ContractionMap:
    """Contraction of ``e0`` in K_{n+1}: merge into e0.lo, shift labels above e0.hi down."""
    if isinstance(n_plus_1, bool) or not isinstance(n_plus_1, int) or n_plus_1 < 2:
        raise BoundsError(f"Contraction needs a source graph with at least 2 vertices, got {n_plus_1!r}")
    CompleteGraph(n_plus_1).validate_edge(e0)

    vertex_map = []
    for v in range(n_plus_1):
        if v == e0.hi:
            vertex_map.append(e0.lo)
        elif v > e0.hi:
            vertex_map.append(v - 1)
        else:
            vertex_map.append(v)

    logger.debug(f"CONTRACTION: K_{n_plus_1} along {e0} -> vertex map {vertex_map}")
    return ContractionMap(
        source_n=n_plus_1,
        contracted_edge=e0,
        vertex_map=tuple(vertex_map),
        special_vertex=e0.lo,
    )


def contract_edge_image(c: ContractionMap, e: Edge) -> Union[Edge, Collapsed]:
    """Image of an edge of K_{n+1}; COLLAPSED exactly for the contracted edge."""
    CompleteGraph(c.source_n).validate_edge(e)
    if e == c.contracted_edge:
        return COLLAPSED
    return Edge.of(c.vertex_map[e.lo], c.vertex_map[e.hi])


def pushforward(c: ContractionMap, a: EdgeVector) -> EdgeVector:
    """(c_{e0})_* : sum a_e.e -> sum a_e.c(e); the coefficient of e0 is discarded."""
    if a.graph.n != c.source_n:
        raise ValidationError(f"Edge vector lives on K_{a.n}, contraction starts from K_{c.source_n}")

    target = c.target
    ring = a.ring
    coefficients = [ring.zero()] * target.edge_count
    for e, value in a.items():
        image = contract_edge_image(c, e)
        if image is COLLAPSED:
            continue
        k = target.edge_index(image)
        coefficients[k] = coefficients[k] + value
    return EdgeVector(target, ring, coefficients)
