"""
Spanning trees of the complete graph.

Trees are enumerated by decoding every Prüfer sequence in lexicographic order,
so the count is n^(n-2) by construction and the order is reproducible.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, List, Sequence, Tuple

from sympy.combinatorics.prufer import Prufer

from shared.core.config import Config, HARD_MAX_TREE_N
from shared.core.errors import BoundsError, InvariantError, PreconditionError, ValidationError
from shared.services.complete_graph import (
    COLLAPSED,
    CompleteGraph,
    ContractionMap,
    Edge,
    contract_edge_image,
    validate_permutation,
)

logger = logging.getLogger(__name__)

# Index tuples are cached up to this size (8^6 = 262144 trees).
_CACHE_MAX_N = 8


def check_tree_bounds(n: int) -> None:
    max_n = min(Config.MAX_TREE_N, HARD_MAX_TREE_N)
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= max_n:
        raise BoundsError(f"Tree enumeration requires 1 <= n <= {max_n}, got {n!r}")


def decode_pruefer(seq: Sequence[int], n: int) -> Tuple[Edge, ...]:
    """Decode with sympy's ``Prufer.to_tree``; returns the tree's edges sorted."""
    seq = list(seq)
    if n < 2 or len(seq) != n - 2 or any(not 0 <= v < n for v in seq):
        raise ValidationError(f"{seq} is not a Prüfer sequence for n={n}")
    return tuple(sorted(Edge.of(u, v) for u, v in Prufer.to_tree(seq)))


def is_spanning_tree(n: int, edges: Iterable[Edge]) -> bool:
    """Union-find check: n-1 distinct edges inside K_n, no cycle."""
    edges = list(edges)
    if len(edges) != n - 1 or len(set(edges)) != len(edges):
        return False

    parent = list(range(n))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in edges:
        if not isinstance(e, Edge) or e.hi >= n:
            return False
        root_lo, root_hi = find(e.lo), find(e.hi)
        if root_lo == root_hi:
            return False
        parent[root_hi] = root_lo
    # n-1 edges without a cycle always connect n vertices
    return True


@dataclass(frozen=True)
class SpanningTree:
    """A spanning subtree of K_n, edges kept sorted."""
    graph: CompleteGraph
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        edges = tuple(sorted(self.edges))
        object.__setattr__(self, "edges", edges)
        if not is_spanning_tree(self.graph.n, edges):
            raise ValidationError(
                f"Edges {[str(e) for e in edges]} do not form a spanning tree of K_{self.graph.n}"
            )

    @classmethod
    def _trusted(cls, graph: CompleteGraph, edges: Tuple[Edge, ...]) -> "SpanningTree":
        # Decoded trees are valid by construction; skip the union-find pass.
        tree = object.__new__(cls)
        object.__setattr__(tree, "graph", graph)
        object.__setattr__(tree, "edges", edges)
        return tree

    @property
    def n(self) -> int:
        return self.graph.n

    def valence(self, v: int) -> int:
        return valence(self, v)


def count_trees(n: int) -> int:
    """n^(n-2), with the value 1 for n = 1."""
    check_tree_bounds(n)
    return 1 if n == 1 else n ** (n - 2)


def _decode_all(n: int) -> Iterator[Tuple[Edge, ...]]:
    if n == 1:
        yield ()
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        yield decode_pruefer(seq, n)


@lru_cache(maxsize=_CACHE_MAX_N)
def _cached_edge_lists(n: int) -> Tuple[Tuple[Edge, ...], ...]:
    logger.debug(f"TREE ENUMERATION: caching the {count_trees(n)} trees of K_{n}")
    return tuple(_decode_all(n))


def iter_tree_edges(n: int) -> Iterator[Tuple[Edge, ...]]:
    """Edge tuples of every spanning tree of K_n, in Prüfer order."""
    check_tree_bounds(n)
    if n <= _CACHE_MAX_N:
        return iter(_cached_edge_lists(n))
    return _decode_all(n)


@lru_cache(maxsize=_CACHE_MAX_N)
def _cached_index_lists(n: int) -> Tuple[Tuple[int, ...], ...]:
    graph = CompleteGraph(n)
    return tuple(tuple(graph.edge_index(e) for e in edges) for edges in _cached_edge_lists(n))


def iter_tree_edge_indices(n: int) -> Iterator[Tuple[int, ...]]:
    """Lexicographic edge indices of every spanning tree of K_n."""
    check_tree_bounds(n)
    if n <= _CACHE_MAX_N:
        return iter(_cached_index_lists(n))
    graph = CompleteGraph(n)
    return (tuple(graph.edge_index(e) for e in edges) for edges in _decode_all(n))


def enumerate_trees(n: int) -> Iterator[SpanningTree]:
    """Every spanning tree of K_n exactly once, ordered by Prüfer sequence."""
    check_tree_bounds(n)
    graph = CompleteGraph(n)
    logger.debug(f"TREE ENUMERATION: n={n}, expecting {count_trees(n)} trees")
    for edges in iter_tree_edges(n):
        yield SpanningTree._trusted(graph, edges)


def trees_through_edge(n: int, e: Edge) -> Iterator[SpanningTree]:
    """The trees of K_n containing ``e``, in enumeration order."""
    if n < 2:
        raise BoundsError(f"K_{n} has no edges")
    check_tree_bounds(n)
    CompleteGraph(n).validate_edge(e)
    return (t for t in enumerate_trees(n) if e in t.edges)


def valence(t: SpanningTree, v: int) -> int:
    if not 0 <= v < t.n:
        raise ValidationError(f"Vertex {v} is not a vertex of K_{t.n}")
    return sum(1 for e in t.edges if e.bounds(v))


def contract_tree(c: ContractionMap, t: SpanningTree) -> SpanningTree:
    """Image c_e(t) of a tree containing the contracted edge."""
    if t.n != c.source_n:
        raise ValidationError(f"Tree lives on K_{t.n}, contraction starts from K_{c.source_n}")
    if c.contracted_edge not in t.edges:
        raise PreconditionError(f"Tree does not contain the contracted edge {c.contracted_edge}")

    images = [contract_edge_image(c, e) for e in t.edges]
    edges = tuple(sorted(image for image in images if image is not COLLAPSED))
    target = c.target
    if not is_spanning_tree(target.n, edges):
        raise InvariantError(f"Contraction of a spanning tree along {c.contracted_edge} is not a tree")
    return SpanningTree._trusted(target, edges)


def tree_fiber(c: ContractionMap, t: SpanningTree) -> List[SpanningTree]:
    """All trees of K_{n+1} through e0 that contract to ``t``; 2^valence(special vertex) of them."""
    if t.n != c.source_n - 1:
        raise ValidationError(f"Tree lives on K_{t.n}, contraction lands in K_{c.source_n - 1}")

    choices = [c.preimages(f) for f in t.edges]
    source = c.source
    fiber = []
    for picked in itertools.product(*choices):
        fiber.append(SpanningTree(source, tuple(picked) + (c.contracted_edge,)))
    return fiber


def permute_tree(t: SpanningTree, sigma: Sequence[int]) -> SpanningTree:
    """Relabel the vertices of ``t`` by the permutation ``sigma``."""
    sigma = validate_permutation(sigma, t.n)
    return SpanningTree(t.graph, tuple(Edge.of(sigma[e.lo], sigma[e.hi]) for e in t.edges))
