"""
The forested form Φ_n on the free module A_n.

Φ_n(a) is the sum over the spanning trees T of K_n of the product of the
coefficients of ``a`` on the edges of T. Three evaluators are available:

- ``treesum``: the defining sum over enumerated trees
- ``det``: the weighted matrix-tree theorem, a Laplacian minor over the ring
- ``contraction``: deletion-contraction along the first nonzero edge

``treesum`` is the reference the other two are tested against.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, NamedTuple, Optional, Union

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from shared.core.config import Config
from shared.core.errors import BoundsError, ValidationError
from shared.core.rings import RingElement, RingKind
from shared.services.complete_graph import Edge, EdgeVector, build_contraction, pushforward
from shared.services.spanning_trees import SpanningTree, check_tree_bounds, iter_tree_edge_indices

logger = logging.getLogger(__name__)


class Evaluator(str, Enum):
    TREESUM = "treesum"
    DETERMINANT = "det"
    CONTRACTION = "contraction"

    @classmethod
    def resolve(cls, name: Union["Evaluator", str, None]) -> "Evaluator":
        if isinstance(name, cls):
            return name
        name = name or Config.DEFAULT_EVALUATOR
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValidationError(
                f"Unknown evaluator {name!r}; expected one of {', '.join(e.value for e in cls)}"
            )


@dataclass(frozen=True)
class ForestedEvaluation:
    """Value of Φ_n on one edge vector, with the evaluator that produced it."""
    input: EdgeVector
    value: RingElement
    evaluator: Evaluator

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "n": self.input.n,
            "ring": self.input.ring.to_dict(),
            "evaluator": self.evaluator.value,
            "value": str(self.value),
        }


class IdentityCheck(NamedTuple):
    lhs: RingElement
    rhs: RingElement
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"lhs": str(self.lhs), "rhs": str(self.rhs), "holds": self.holds}


def tree_monomial(t: SpanningTree, a: EdgeVector) -> RingElement:
    """T_*(a): product of the coefficients of ``a`` on the edges of ``t``."""
    if t.graph != a.graph:
        raise ValidationError(f"Tree on K_{t.n} applied to an edge vector on K_{a.n}")
    product = a.ring.one()
    for e in t.edges:
        product = product * a.coefficient(e)
    return product


def _treesum(a: EdgeVector) -> RingElement:
    ring = a.ring
    values = [c.value for c in a.coefficients]
    zero = ring.zero().value
    total = zero
    for indices in iter_tree_edge_indices(a.n):
        term = ring.one().value
        for k in indices:
            term = ring._mul(term, values[k])
            if term == zero:
                break
        total = ring._add(total, term)
    return ring.element(total)


def _determinant(a: EdgeVector) -> RingElement:
    n = a.n
    ring = a.ring
    if n == 1:
        return ring.one()

    if ring.kind is RingKind.POLYNOMIALS:
        domain = ring.poly_ring.to_domain()
    else:
        domain = ZZ

    zero = domain.zero
    laplacian = [[zero] * n for _ in range(n)]
    for e, coefficient in a.items():
        value = domain.convert(coefficient.value)
        laplacian[e.lo][e.hi] = laplacian[e.lo][e.hi] - value
        laplacian[e.hi][e.lo] = laplacian[e.hi][e.lo] - value
        laplacian[e.lo][e.lo] = laplacian[e.lo][e.lo] + value
        laplacian[e.hi][e.hi] = laplacian[e.hi][e.hi] + value

    # Reduced Laplacian: drop row and column 0
    minor = [row[1:] for row in laplacian[1:]]
    det = DomainMatrix(minor, (n - 1, n - 1), domain).det()

    if ring.kind is RingKind.POLYNOMIALS:
        return ring.element(ring.poly_ring(det))
    return ring.from_int(int(det))


def _deletion_contraction(a: EdgeVector, memo: Dict[Any, RingElement]) -> RingElement:
    ring = a.ring
    if a.n == 1:
        return ring.one()

    key = (a.n, tuple(c.value for c in a.coefficients))
    if key in memo:
        return memo[key]

    for e, coefficient in a.items():
        if not coefficient.is_zero():
            break
    else:
        memo[key] = ring.zero()
        return memo[key]

    deleted = a.with_coefficient(e, ring.zero())
    contracted = pushforward(build_contraction(a.n, e), deleted)
    value = _deletion_contraction(deleted, memo) + coefficient * _deletion_contraction(contracted, memo)
    memo[key] = value
    return value


def evaluate_forested(a: EdgeVector, evaluator: Union[Evaluator, str, None] = None) -> ForestedEvaluation:
    evaluator = Evaluator.resolve(evaluator)
    if evaluator is Evaluator.DETERMINANT:
        value = _determinant(a)
    elif evaluator is Evaluator.CONTRACTION:
        check_tree_bounds(a.n)
        value = _deletion_contraction(a, {})
    else:
        value = _treesum(a)
    logger.debug(f"FORESTED FORM: n={a.n} over {a.ring.spec} via {evaluator.value} -> {value}")
    return ForestedEvaluation(input=a, value=value, evaluator=evaluator)


def forested_form(a: EdgeVector, evaluator: Union[Evaluator, str, None] = None) -> RingElement:
    """Φ_n(a)."""
    return evaluate_forested(a, evaluator).value


def contraction_identity_check(a: EdgeVector, e0: Edge,
                               evaluator: Union[Evaluator, str, None] = None) -> IdentityCheck:
    """Compare Φ_{n+1}(a + 1_{e0}) - Φ_{n+1}(a) with Φ_n((c_{e0})_* a)."""
    if a.n < 2:
        raise BoundsError(f"The contraction identity needs n+1 >= 2, got K_{a.n}")
    graph = a.graph
    graph.validate_edge(e0)

    shifted = a + EdgeVector.unit(graph, a.ring, e0)
    lhs = forested_form(shifted, evaluator) - forested_form(a, evaluator)
    rhs = forested_form(pushforward(build_contraction(a.n, e0), a), evaluator)
    return IdentityCheck(lhs=lhs, rhs=rhs, holds=(lhs == rhs))


def multiaffine_second_difference(a: EdgeVector, e: Edge,
                                  evaluator: Optional[Union[Evaluator, str]] = None) -> RingElement:
    """Φ(a + 2·1_e) - 2Φ(a + 1_e) + Φ(a); zero because Φ has degree <= 1 in a_e."""
    unit = EdgeVector.unit(a.graph, a.ring, a.graph.validate_edge(e))
    once = a + unit
    twice = once + unit
    return forested_form(twice, evaluator) - forested_form(once, evaluator) * 2 + forested_form(a, evaluator)
