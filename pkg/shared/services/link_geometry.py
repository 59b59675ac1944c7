"""
Polygonal links in 3-space, linking numbers and the self-linking weight.

All geometry is exact over the rationals. The linking number of two closed
polylines is the signed count of crossings where the first passes over the
second in the projection to the xy-plane. When that projection is not
generic (a vertex lands on the other curve, segments overlap, ...) both
curves are rotated by the next exact rotation of a fixed schedule and the
count is retried.

Crossing sign: +1 when (over direction, under direction) is a positively
oriented basis of the plane.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from shared.core.config import Config, HARD_MAX_GRAPH_N
from shared.core.errors import (
    BoundsError,
    DegenerateProjectionError,
    InvariantError,
    LinkIntersectionError,
    ValidationError,
)
from shared.core.models import LinkDocument, MatrixDocument, RingSpec
from shared.core.rings import RingElement, RingHandle
from shared.core.utils import parse_rational
from shared.services.complete_graph import CompleteGraph, EdgeVector, validate_permutation
from shared.services.forested_form import Evaluator, forested_form

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, Fraction, Fraction]
Polyline = Tuple[Point, ...]
Matrix3 = Tuple[Tuple[Fraction, Fraction, Fraction], ...]

# (a, b, c) with a^2 + b^2 = c^2: cos = a/c, sin = b/c is an exact rotation.
PYTHAGOREAN_TRIPLES = [
    (3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25),
    (20, 21, 29), (12, 35, 37), (9, 40, 41), (28, 45, 53),
]

IDENTITY: Matrix3 = tuple(
    tuple(Fraction(1 if i == j else 0) for j in range(3)) for i in range(3)
)


class _DegenerateProjection(Exception):
    pass


# ----------------------------------------------------------------------
# Points and polylines
# ----------------------------------------------------------------------

def make_point(coords: Sequence[Any]) -> Point:
    if len(coords) != 3:
        raise ValidationError(f"A point has three coordinates, got {list(coords)!r}")
    return tuple(parse_rational(c) if not isinstance(c, Fraction) else c for c in coords)


def make_polyline(points: Sequence[Sequence[Any]]) -> Polyline:
    """A closed polyline: at least 3 points, cyclically consecutive points distinct."""
    polyline = tuple(make_point(p) for p in points)
    if len(polyline) < 3:
        raise ValidationError(f"A closed polyline needs at least 3 points, got {len(polyline)}")
    for k, p in enumerate(polyline):
        if p == polyline[(k + 1) % len(polyline)]:
            raise ValidationError(f"Consecutive points {k} and {(k + 1) % len(polyline)} coincide")
    return polyline


def segments(c: Polyline) -> List[Tuple[Point, Point]]:
    return [(c[k], c[(k + 1) % len(c)]) for k in range(len(c))]


def _sub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def _dot(p: Point, q: Point) -> Fraction:
    return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]


def _cross(p: Point, q: Point) -> Point:
    return (
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    )


def segments_intersect_3d(p0: Point, p1: Point, q0: Point, q1: Point) -> bool:
    """Exact test whether the closed segments [p0, p1] and [q0, q1] share a point."""
    d1, d2, r = _sub(p1, p0), _sub(q1, q0), _sub(q0, p0)
    normal = _cross(d1, d2)

    if any(normal):
        if _dot(r, normal) != 0:
            return False
        norm2 = _dot(normal, normal)
        s = _dot(_cross(r, d2), normal) / norm2
        t = _dot(_cross(r, d1), normal) / norm2
        return 0 <= s <= 1 and 0 <= t <= 1

    # parallel
    if any(_cross(r, d1)):
        return False
    len2 = _dot(d1, d1)
    t0 = _dot(r, d1) / len2
    t1 = _dot(_sub(q1, p0), d1) / len2
    return max(min(t0, t1), 0) <= min(max(t0, t1), 1)


def check_embedded(c: Polyline, label: str = "component") -> None:
    """Raise LinkIntersectionError when the closed polyline meets itself."""
    segs = segments(c)
    m = len(segs)
    for i in range(m):
        for j in range(i + 1, m):
            (p0, p1), (q0, q1) = segs[i], segs[j]
            if j == i + 1 or (i == 0 and j == m - 1):
                # adjacent: only a fold back along the shared vertex is a self-intersection
                first, second = (segs[i], segs[j]) if j == i + 1 else (segs[j], segs[i])
                d1, d2 = _sub(first[1], first[0]), _sub(second[1], second[0])
                if not any(_cross(d1, d2)) and _dot(d1, d2) < 0:
                    raise LinkIntersectionError(f"{label} folds back on itself at segments {i} and {j}")
                continue
            if segments_intersect_3d(p0, p1, q0, q1):
                raise LinkIntersectionError(f"{label} intersects itself at segments {i} and {j}")


def check_disjoint(c1: Polyline, c2: Polyline, labels: Tuple[str, str] = ("first curve", "second curve")) -> None:
    for i, (p0, p1) in enumerate(segments(c1)):
        for j, (q0, q1) in enumerate(segments(c2)):
            if segments_intersect_3d(p0, p1, q0, q1):
                raise LinkIntersectionError(f"{labels[0]} segment {i} meets {labels[1]} segment {j}")


# ----------------------------------------------------------------------
# Rigid motions and other transforms
# ----------------------------------------------------------------------

def _matmul(a: Matrix3, b: Matrix3) -> Matrix3:
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)) for i in range(3))


def rotation_matrix(axis: str, triple: Tuple[int, int, int]) -> Matrix3:
    """Exact rotation about ``axis`` with cos = a/c and sin = b/c."""
    a, b, c = triple
    if a * a + b * b != c * c:
        raise ValidationError(f"{triple} is not a Pythagorean triple")
    cos, sin = Fraction(a, c), Fraction(b, c)
    zero, one = Fraction(0), Fraction(1)
    if axis == "x":
        return ((one, zero, zero), (zero, cos, -sin), (zero, sin, cos))
    if axis == "y":
        return ((cos, zero, sin), (zero, one, zero), (-sin, zero, cos))
    if axis == "z":
        return ((cos, -sin, zero), (sin, cos, zero), (zero, zero, one))
    raise ValidationError(f"Unknown rotation axis {axis!r}")


def perturbation_schedule(count: Optional[int] = None) -> List[Matrix3]:
    """Identity first, then rotations about x composed with rotations about y."""
    if count is None:
        count = Config.get_geometry_config()["perturbation_retries"]
    schedule = [IDENTITY]
    k = 0
    while len(schedule) < count:
        tilt_x = rotation_matrix("x", PYTHAGOREAN_TRIPLES[k % len(PYTHAGOREAN_TRIPLES)])
        tilt_y = rotation_matrix("y", PYTHAGOREAN_TRIPLES[(k + 1) % len(PYTHAGOREAN_TRIPLES)])
        schedule.append(_matmul(tilt_x, tilt_y))
        k += 1
    return schedule[:count]


def rotate(c: Polyline, matrix: Matrix3) -> Polyline:
    return tuple(tuple(sum(matrix[i][k] * p[k] for k in range(3)) for i in range(3)) for p in c)


def translate(c: Polyline, offset: Sequence[Any]) -> Polyline:
    v = make_point(offset)
    return tuple((p[0] + v[0], p[1] + v[1], p[2] + v[2]) for p in c)


def subdivide(c: Polyline, index: int, t: Union[Fraction, int, str] = Fraction(1, 2)) -> Polyline:
    """Insert the point at parameter ``t`` of segment ``index``."""
    t = parse_rational(t) if not isinstance(t, Fraction) else t
    if not 0 < t < 1:
        raise ValidationError(f"Subdivision parameter must lie strictly between 0 and 1, got {t}")
    if not 0 <= index < len(c):
        raise ValidationError(f"Segment {index} does not exist on a {len(c)}-gon")
    p0, p1 = c[index], c[(index + 1) % len(c)]
    point = tuple(p0[k] + t * (p1[k] - p0[k]) for k in range(3))
    return c[:index + 1] + (point,) + c[index + 1:]


def concatenate(c1: Polyline, c2: Polyline) -> Polyline:
    """Loop product at the shared basepoint c1[0] == c2[0]."""
    if c1[0] != c2[0]:
        raise ValidationError("Concatenated loops must share their first point")
    return c1 + c2


def reverse(c: Polyline) -> Polyline:
    """Same curve, opposite orientation; keeps the basepoint."""
    return (c[0],) + tuple(reversed(c[1:]))


# ----------------------------------------------------------------------
# Crossings
# ----------------------------------------------------------------------

def _orient(a: Point, b: Point, c: Point) -> Fraction:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _on_segment(a: Point, b: Point, c: Point) -> bool:
    """For collinear projections: whether c lies in the bounding box of [a, b]."""
    return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])


def _signed_crossings(c1: Polyline, c2: Polyline) -> Tuple[int, int]:
    """(c1 over c2, c2 over c1) signed counts in the xy projection."""
    c1_over, c2_over = 0, 0
    for p0, p1 in segments(c1):
        for q0, q1 in segments(c2):
            o1, o2 = _orient(p0, p1, q0), _orient(p0, p1, q1)
            o3, o4 = _orient(q0, q1, p0), _orient(q0, q1, p1)

            if (
                (o1 == 0 and _on_segment(p0, p1, q0))
                or (o2 == 0 and _on_segment(p0, p1, q1))
                or (o3 == 0 and _on_segment(q0, q1, p0))
                or (o4 == 0 and _on_segment(q0, q1, p1))
            ):
                raise _DegenerateProjection()
            if not (o1 * o2 < 0 and o3 * o4 < 0):
                continue

            dp, dq, r = _sub(p1, p0), _sub(q1, q0), _sub(q0, p0)
            denom = dp[0] * dq[1] - dp[1] * dq[0]
            s = (r[0] * dq[1] - r[1] * dq[0]) / denom
            t = (r[0] * dp[1] - r[1] * dp[0]) / denom
            z1 = p0[2] + s * dp[2]
            z2 = q0[2] + t * dq[2]
            if z1 == z2:
                raise LinkIntersectionError("Curves meet in space at a projected crossing")

            # sign of cross(over, under); denom is cross(c1 direction, c2 direction)
            if z1 > z2:
                c1_over += 1 if denom > 0 else -1
            else:
                c2_over += 1 if denom < 0 else -1
    return c1_over, c2_over


def crossing_census(c1: Polyline, c2: Polyline, rotation: Optional[Matrix3] = None) -> Tuple[int, int]:
    """Signed counts (c1 over c2, c2 over c1) in one generic projection.

    With ``rotation`` given only that projection is tried; otherwise the
    perturbation schedule is walked until a generic projection is found.
    """
    check_disjoint(c1, c2)
    schedule = [rotation] if rotation is not None else perturbation_schedule()
    for attempt, matrix in enumerate(schedule):
        try:
            return _signed_crossings(rotate(c1, matrix), rotate(c2, matrix))
        except _DegenerateProjection:
            logger.debug(f"PERTURBATION: projection {attempt} is degenerate, trying the next rotation")
    raise DegenerateProjectionError(
        f"No generic projection found after {len(schedule)} rotation(s)"
    )


def linking_number(c1: Polyline, c2: Polyline, rotation: Optional[Matrix3] = None) -> int:
    """lk_2(c1, c2): signed crossings where c1 passes over c2."""
    c1_over, c2_over = crossing_census(c1, c2, rotation)
    if c1_over != c2_over:
        raise InvariantError(f"Crossing census halves disagree: {c1_over} vs {c2_over}")
    return c1_over


# ----------------------------------------------------------------------
# Links
# ----------------------------------------------------------------------

def _coordinate_out(value: Fraction) -> Union[int, str]:
    return value.numerator if value.denominator == 1 else str(value)


@dataclass(frozen=True)
class PolylineLink:
    """An ordered tuple of pairwise disjoint embedded closed polylines."""
    components: Tuple[Polyline, ...]

    def __post_init__(self):
        components = tuple(make_polyline(c) for c in self.components)
        object.__setattr__(self, "components", components)
        if not components:
            raise ValidationError("A link has at least one component")
        max_n = min(Config.MAX_GRAPH_N, HARD_MAX_GRAPH_N)
        if len(components) > max_n:
            raise BoundsError(f"A link may have at most {max_n} components, got {len(components)}")
        for i, c in enumerate(components):
            check_embedded(c, f"component {i}")
        for i in range(len(components)):
            for j in range(i + 1, len(components)):
                check_disjoint(components[i], components[j], (f"component {i}", f"component {j}"))

    @property
    def n(self) -> int:
        return len(self.components)

    @classmethod
    def from_document(cls, document: LinkDocument) -> "PolylineLink":
        return cls(tuple(make_polyline(points) for points in document.components))

    def to_document(self) -> LinkDocument:
        return LinkDocument(components=[
            [[_coordinate_out(x) for x in p] for p in c] for c in self.components
        ])

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return self.to_document().model_dump()


def hopf_link() -> PolylineLink:
    """The positive Hopf link: linking number +1 under the crossing convention above."""
    vertical = [(0, 0, -1), (0, 0, 1), (2, 0, 1), (2, 0, -1)]
    square = [(-1, -1, 0), (1, -1, 0), (1, 1, 0), (-1, 1, 0)]
    return PolylineLink((make_polyline(vertical), make_polyline(square)))


def chain_link() -> PolylineLink:
    """Three rings in a chain; pairwise numbers lk12 = lk23 = 1, lk13 = 0."""
    first = [(-1, -1, 0), (1, -1, 0), (1, 1, 0), (-1, 1, 0)]
    middle = [(0, 0, -1), (0, 0, 1), (2, 0, 1), (2, 0, -1)]
    last = [("3/2", "-1/2", 0), ("3/2", "1/2", 0), ("5/2", "1/2", 0), ("5/2", "-1/2", 0)]
    return PolylineLink((make_polyline(first), make_polyline(middle), make_polyline(last)))


def split_link(link: PolylineLink, index: int, offset: Sequence[Any]) -> PolylineLink:
    """Move one component by ``offset``; far enough away its matrix row vanishes."""
    components = list(link.components)
    components[index] = translate(components[index], offset)
    return PolylineLink(tuple(components))


# ----------------------------------------------------------------------
# Linking matrices
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LinkingMatrix:
    """Symmetric n x n matrix of ring elements; the diagonal is stored as zero and never read."""
    n: int
    ring: RingHandle
    entries: Tuple[Tuple[RingElement, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.entries)
        if len(rows) != self.n or any(len(row) != self.n for row in rows):
            raise ValidationError(f"Linking matrix must be {self.n} x {self.n}")
        zero = self.ring.zero()
        normalized = []
        for i, row in enumerate(rows):
            out = []
            for j, value in enumerate(row):
                if i == j:
                    out.append(zero)
                    continue
                self.ring.check_member(value)
                if value != rows[j][i]:
                    raise ValidationError(f"Linking matrix is not symmetric at ({i}, {j})")
                out.append(value)
            normalized.append(tuple(out))
        object.__setattr__(self, "entries", tuple(normalized))

    def entry(self, i: int, j: int) -> RingElement:
        return self.entries[i][j]

    def row_is_zero(self, i: int) -> bool:
        return all(self.entries[i][j].is_zero() for j in range(self.n) if j != i)

    def to_edge_vector(self) -> EdgeVector:
        """a_γ: the edge {i, j} carries entries[i][j]."""
        graph = CompleteGraph(self.n)
        return EdgeVector(graph, self.ring, [self.entries[e.lo][e.hi] for e in graph.edges])

    @classmethod
    def from_edge_vector(cls, a: EdgeVector) -> "LinkingMatrix":
        zero = a.ring.zero()
        rows = [[zero] * a.n for _ in range(a.n)]
        for e, value in a.items():
            rows[e.lo][e.hi] = value
            rows[e.hi][e.lo] = value
        return cls(a.n, a.ring, rows)

    def permuted(self, sigma: Sequence[int]) -> "LinkingMatrix":
        """Simultaneous row/column relabeling: entry (σ(i), σ(j)) of the result is entry (i, j)."""
        sigma = validate_permutation(sigma, self.n)
        inverse = [0] * self.n
        for i, s in enumerate(sigma):
            inverse[s] = i
        rows = [[self.entries[inverse[i]][inverse[j]] for j in range(self.n)] for i in range(self.n)]
        return LinkingMatrix(self.n, self.ring, rows)

    @classmethod
    def from_rows(cls, ring: RingHandle, rows: Sequence[Sequence[Any]]) -> "LinkingMatrix":
        """Parse rows of text or integer entries; the diagonal may be anything, including None."""
        n = len(rows)
        parsed = []
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValidationError(f"Linking matrix row {i} has {len(row)} entries, expected {n}")
            parsed.append([ring.zero() if i == j else ring.parse_element(_require_value(value, i, j))
                           for j, value in enumerate(row)])
        return cls(n, ring, parsed)

    def to_rows(self) -> List[List[str]]:
        return [[str(value) for value in row] for row in self.entries]

    @classmethod
    def from_document(cls, document: MatrixDocument) -> "LinkingMatrix":
        ring = RingHandle.from_dict(document.ring.to_dict())
        if len(document.entries) != document.n:
            raise ValidationError(f"Matrix document declares n={document.n} but has {len(document.entries)} rows")
        CompleteGraph(document.n)
        return cls.from_rows(ring, document.entries)

    def to_document(self) -> MatrixDocument:
        return MatrixDocument(n=self.n, ring=RingSpec(**self.ring.to_dict()), entries=self.to_rows())

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return self.to_document().model_dump(exclude_none=True)


def _require_value(value: Any, i: int, j: int) -> Any:
    if value is None:
        raise ValidationError(f"Missing off-diagonal entry ({i}, {j})")
    return value


def linking_matrix(link: PolylineLink, ring: RingHandle) -> LinkingMatrix:
    """Pairwise linking numbers of the components, mapped into ``ring``."""
    n = link.n
    zero = ring.zero()
    rows = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            value = ring.from_int(linking_number(link.components[i], link.components[j]))
            rows[i][j] = value
            rows[j][i] = value
    logger.info(f"LINKING MATRIX: {n} components over {ring.spec}")
    return LinkingMatrix(n, ring, rows)


def self_linking_weight(m: LinkingMatrix, evaluator: Union[Evaluator, str, None] = None) -> RingElement:
    """lk_n = Φ_n(a_γ); 1 for a knot, the linking number for two components."""
    if m.n < 1:
        raise BoundsError("A linking matrix has at least one component")
    return forested_form(m.to_edge_vector(), evaluator)


def link_weight(link: PolylineLink, ring: RingHandle, evaluator: Union[Evaluator, str, None] = None) -> RingElement:
    return self_linking_weight(linking_matrix(link, ring), evaluator)
