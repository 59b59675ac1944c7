#!/usr/bin/env python3
"""
Tests for polygonal links: linking numbers, linking matrices and the
self-linking weight.
"""

import random
import sys
import unittest
from fractions import Fraction
from pathlib import Path

sys.path.append(str(Path(__file__).parent.parent))

from shared.core.errors import (
    BoundsError,
    DegenerateProjectionError,
    LinkIntersectionError,
    ValidationError,
)
from shared.core.rings import RingHandle
from shared.services.forested_form import Evaluator, forested_form
from shared.services.link_geometry import (
    LinkingMatrix,
    PolylineLink,
    chain_link,
    concatenate,
    crossing_census,
    hopf_link,
    link_weight,
    linking_matrix,
    linking_number,
    make_polyline,
    perturbation_schedule,
    reverse,
    rotate,
    rotation_matrix,
    self_linking_weight,
    split_link,
    subdivide,
    translate,
)
from shared.services.spanning_trees import enumerate_trees

INTEGERS = RingHandle.integers()


def random_polyline(rng, points=5, span=3):
    while True:
        raw = [[rng.randint(-span, span) for _ in range(3)] for _ in range(points)]
        try:
            return make_polyline(raw)
        except ValidationError:
            continue


class TestLinkingNumber(unittest.TestCase):
    """Signed crossing counts of pairs of closed polylines."""

    def test_hopf_link(self):
        c1, c2 = hopf_link().components
        self.assertEqual(crossing_census(c1, c2), (1, 1))
        self.assertEqual(linking_number(c1, c2), 1)
        self.assertEqual(linking_number(c2, c1), 1)

    def test_reversal_negates(self):
        c1, c2 = hopf_link().components
        self.assertEqual(linking_number(reverse(c1), c2), -1)
        self.assertEqual(linking_number(c1, reverse(c2)), -1)
        self.assertEqual(linking_number(reverse(c1), reverse(c2)), 1)

    def test_split_pair_is_unlinked(self):
        link = split_link(hopf_link(), 1, (10, 10, 10))
        c1, c2 = link.components
        self.assertEqual(linking_number(c1, c2), 0)

    def test_doubled_loop(self):
        c1, c2 = hopf_link().components
        self.assertEqual(linking_number(concatenate(c1, c1), c2), 2)
        with self.assertRaises(ValidationError):
            concatenate(c1, c2)

    def test_rigid_motions_and_subdivision(self):
        c1, c2 = hopf_link().components
        offset = (Fraction(1, 3), -7, 2)
        self.assertEqual(linking_number(translate(c1, offset), translate(c2, offset)), 1)
        for matrix in perturbation_schedule(6):
            self.assertEqual(linking_number(rotate(c1, matrix), rotate(c2, matrix)), 1)
        for index in range(len(c1)):
            self.assertEqual(linking_number(subdivide(c1, index, "1/3"), c2), 1)
        with self.assertRaises(ValidationError):
            subdivide(c1, 0, 1)

    def test_projection_independence(self):
        c1, c2 = chain_link().components[1:]
        values = set()
        for matrix in perturbation_schedule(8):
            try:
                values.add(linking_number(c1, c2, rotation=matrix))
            except DegenerateProjectionError:
                continue
        self.assertEqual(values, {1})

    def test_degenerate_projection_is_perturbed(self):
        # a vertex of the ring projects onto an edge of the square
        square = make_polyline([(0, -1, 0), (0, 1, 0), (4, 1, 0), (4, -1, 0)])
        ring = make_polyline([(2, 0, -1), (2, 0, 1), (4, 0, 1), (6, 0, -1)])
        with self.assertRaises(DegenerateProjectionError):
            crossing_census(square, ring, rotation=perturbation_schedule(1)[0])
        self.assertEqual(abs(linking_number(square, ring)), 1)

    def test_symmetry_on_random_pairs(self):
        rng = random.Random(12)
        checked = 0
        attempts = 0
        while checked < 200 and attempts < 2000:
            attempts += 1
            c1, c2 = random_polyline(rng), random_polyline(rng)
            try:
                forward = linking_number(c1, c2)
                backward = linking_number(c2, c1)
            except (LinkIntersectionError, DegenerateProjectionError):
                continue
            self.assertEqual(forward, backward)
            self.assertEqual(linking_number(reverse(c1), c2), -forward)
            checked += 1
        self.assertEqual(checked, 200)

    def test_rotation_requires_triple(self):
        with self.assertRaises(ValidationError):
            rotation_matrix("x", (1, 2, 3))
        with self.assertRaises(ValidationError):
            rotation_matrix("w", (3, 4, 5))


class TestPolylineLink(unittest.TestCase):

    def test_intersecting_components_rejected(self):
        square = [(-1, -1, 0), (1, -1, 0), (1, 1, 0), (-1, 1, 0)]
        through = [(1, 0, 0), (1, 0, 2), (3, 0, 2), (3, 0, 0)]
        with self.assertRaises(LinkIntersectionError):
            PolylineLink((make_polyline(square), make_polyline(through)))

    def test_self_intersection_rejected(self):
        bowtie = [(0, 0, 0), (2, 2, 0), (2, 0, 0), (0, 2, 0)]
        with self.assertRaises(LinkIntersectionError):
            PolylineLink((make_polyline(bowtie),))
        folded = [(0, 0, 0), (2, 0, 0), (1, 0, 0), (1, 1, 0)]
        with self.assertRaises(LinkIntersectionError):
            PolylineLink((make_polyline(folded),))

    def test_malformed_polylines(self):
        with self.assertRaises(ValidationError):
            make_polyline([(0, 0, 0), (1, 0, 0)])
        with self.assertRaises(ValidationError):
            make_polyline([(0, 0, 0), (0, 0, 0), (1, 1, 0)])
        with self.assertRaises(ValidationError):
            make_polyline([(0, 0), (1, 0, 0), (1, 1, 0)])
        with self.assertRaises(ValidationError):
            make_polyline([(0.5, 0, 0), (1, 0, 0), (1, 1, 0)])

    def test_document_round_trip(self):
        link = chain_link()
        document = link.to_document()
        self.assertEqual(document.components[2][0], ["3/2", "-1/2", 0])
        self.assertEqual(PolylineLink.from_document(document), link)


class TestLinkingMatrix(unittest.TestCase):

    def test_chain_matrix(self):
        m = linking_matrix(chain_link(), INTEGERS)
        self.assertEqual(m.to_rows(), [["0", "1", "0"], ["1", "0", "1"], ["0", "1", "0"]])
        self.assertEqual(self_linking_weight(m), INTEGERS.one())
        self.assertEqual(link_weight(chain_link(), RingHandle.modular(2)), RingHandle.modular(2).one())

    def test_knot_and_two_components(self):
        knot = PolylineLink((hopf_link().components[0],))
        self.assertEqual(link_weight(knot, INTEGERS), INTEGERS.one())
        m = LinkingMatrix.from_rows(INTEGERS, [[None, 3], [3, None]])
        self.assertEqual(self_linking_weight(m), INTEGERS.from_int(3))
        self.assertEqual(link_weight(hopf_link(), INTEGERS), INTEGERS.one())

    def test_split_component_kills_weight(self):
        link = split_link(chain_link(), 2, (20, 0, 0))
        m = linking_matrix(link, INTEGERS)
        self.assertTrue(m.row_is_zero(2))
        self.assertTrue(self_linking_weight(m).is_zero())

    def test_zero_row_kills_weight(self):
        rng = random.Random(44)
        for ring in (INTEGERS, RingHandle.modular(5)):
            for n in range(2, 8):
                for zero_row in range(n):
                    rows = [[0] * n for _ in range(n)]
                    for i in range(n):
                        for j in range(i + 1, n):
                            if zero_row not in (i, j):
                                rows[i][j] = rows[j][i] = rng.randint(-5, 5)
                    m = LinkingMatrix.from_rows(ring, rows)
                    self.assertTrue(m.row_is_zero(zero_row))
                    self.assertTrue(self_linking_weight(m).is_zero())
                    self.assertTrue(self_linking_weight(m, "det").is_zero())

    def test_weight_is_tree_sum(self):
        rng = random.Random(8)
        ring = RingHandle.polynomials(["x"])
        for n in range(2, 6):
            rows = [[None] * n for _ in range(n)]
            for i in range(n):
                for j in range(i + 1, n):
                    value = ring.random_element(rng)
                    rows[i][j] = rows[j][i] = str(value)
            m = LinkingMatrix.from_rows(ring, rows)
            expected = ring.zero()
            for t in enumerate_trees(n):
                term = ring.one()
                for e in t.edges:
                    term = term * m.entry(e.lo, e.hi)
                expected = expected + term
            self.assertEqual(self_linking_weight(m, Evaluator.DETERMINANT), expected)
            self.assertEqual(forested_form(m.to_edge_vector()), expected)

    def test_permutation_invariance(self):
        rng = random.Random(21)
        for _ in range(20):
            n = rng.randint(2, 6)
            rows = [[0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i + 1, n):
                    rows[i][j] = rows[j][i] = rng.randint(-3, 3)
            m = LinkingMatrix.from_rows(INTEGERS, rows)
            sigma = list(range(n))
            rng.shuffle(sigma)
            permuted = m.permuted(sigma)
            for i in range(n):
                for j in range(n):
                    self.assertEqual(permuted.entry(sigma[i], sigma[j]), m.entry(i, j))
            self.assertEqual(self_linking_weight(permuted), self_linking_weight(m))

    def test_invalid_matrices(self):
        with self.assertRaises(ValidationError):
            LinkingMatrix.from_rows(INTEGERS, [[0, 1], [2, 0]])
        with self.assertRaises(ValidationError):
            LinkingMatrix.from_rows(INTEGERS, [[0, None], [None, 0]])
        with self.assertRaises(ValidationError):
            LinkingMatrix.from_rows(INTEGERS, [[0, 1, 2], [1, 0]])

    def test_edge_vector_correspondence(self):
        m = linking_matrix(chain_link(), INTEGERS)
        self.assertEqual(LinkingMatrix.from_edge_vector(m.to_edge_vector()), m)

    def test_document_round_trip(self):
        m = linking_matrix(chain_link(), RingHandle.modular(5))
        self.assertEqual(LinkingMatrix.from_document(m.to_document()), m)

    def test_too_many_components(self):
        rows = [[0] * 13 for _ in range(13)]
        with self.assertRaises(BoundsError):
            self_linking_weight(LinkingMatrix.from_rows(INTEGERS, rows))


if __name__ == "__main__":
    unittest.main()
