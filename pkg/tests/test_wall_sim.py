#!/usr/bin/env python3
"""
Tests for the wall-crossing simulator: constancy of the weighted count,
event validation and the random scenario generator.
"""

import random
import sys
import unittest
from fractions import Fraction
from pathlib import Path
from unittest.mock import patch

sys.path.append(str(Path(__file__).parent.parent))

from shared.core.config import Config
from shared.core.errors import (
    BoundsError,
    NonConstantTraceError,
    RingMismatchError,
    ValidationError,
    WallEventError,
)
from shared.core.rings import RingHandle
from shared.services.complete_graph import build_contraction, pushforward
from shared.services.link_geometry import LinkingMatrix
from shared.services.wall_sim import (
    Configuration,
    Population,
    WallEvent,
    WallScenario,
    WeightMemo,
    apply_event,
    fuse_configuration,
    fuzz_scenarios,
    generate_random_scenario,
    merge_labels,
    mirror_event,
    permute_configuration,
    run_scenario,
    total_weight,
    weight_by_class,
)

INTEGERS = RingHandle.integers()
HALF = Fraction(1, 2)


def two_component(value=2, sign=1, ring=INTEGERS):
    matrix = LinkingMatrix.from_rows(ring, [[0, value], [value, 0]])
    return Configuration(id="c0", classes=("a", "b"), matrix=matrix, sign=sign)


def birth_event(target, i, j, time=HALF, new_id="f", sign=None):
    fused = fuse_configuration(target.with_jump(i, j, 1), i, j, new_id, sign=sign)
    return WallEvent(time=time, target=target.id, pair=(i, j), delta=1, fused=fused)


class TestFusion(unittest.TestCase):

    def test_merge_labels(self):
        self.assertEqual(merge_labels("b", "a"), "a+b")
        self.assertEqual(merge_labels("a+c", "b"), "a+b+c")

    def test_fuse_two_components(self):
        fused = fuse_configuration(two_component(), 0, 1, "f")
        self.assertEqual(fused.classes, ("a+b",))
        self.assertEqual(fused.n, 1)
        self.assertEqual(fused.sign, -1)
        self.assertEqual(fused.weight(), INTEGERS.from_int(-1))

    def test_fused_matrix_is_pushforward(self):
        rng = random.Random(6)
        for n in range(2, 6):
            rows = [[0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i + 1, n):
                    rows[i][j] = rows[j][i] = rng.randint(-4, 4)
            target = Configuration("t", tuple(f"d{k}" for k in range(n)), LinkingMatrix.from_rows(INTEGERS, rows), 1)
            for e in target.matrix.to_edge_vector().graph.edges:
                fused = fuse_configuration(target, e.lo, e.hi, "f")
                c = build_contraction(n, e)
                self.assertEqual(fused.matrix.to_edge_vector(), pushforward(c, target.matrix.to_edge_vector()))
                self.assertEqual(fused.total_class, target.total_class)

    def test_single_component_cannot_fuse(self):
        knot = Configuration("k", ("a",), LinkingMatrix.from_rows(INTEGERS, [[0]]), 1)
        with self.assertRaises(BoundsError):
            fuse_configuration(knot, 0, 1, "f")

    def test_invalid_configurations(self):
        matrix = LinkingMatrix.from_rows(INTEGERS, [[0, 1], [1, 0]])
        with self.assertRaises(ValidationError):
            Configuration("c", ("a",), matrix, 1)
        with self.assertRaises(ValidationError):
            Configuration("c", ("a", "b"), matrix, 0)
        with self.assertRaises(ValidationError):
            Configuration("", ("a", "b"), matrix, 1)


class TestTotalWeight(unittest.TestCase):

    def test_empty_population_is_zero(self):
        with patch.object(Config, "DEFAULT_RING", "integers"):
            self.assertEqual(total_weight([]), INTEGERS.zero())
        ring = RingHandle.modular(5)
        self.assertEqual(total_weight([], ring=ring), ring.zero())
        self.assertEqual(total_weight(Population(ring)), ring.zero())

    def test_single_knot(self):
        knot = Configuration("k", ("a",), LinkingMatrix.from_rows(INTEGERS, [[0]]), 1)
        self.assertEqual(total_weight([knot]), INTEGERS.one())

    def test_opposite_signs_cancel(self):
        positive = two_component(value=3, sign=1)
        negative = Configuration("c1", ("c", "d"), positive.matrix, -1)
        self.assertEqual(total_weight([positive]), INTEGERS.from_int(3))
        self.assertEqual(total_weight([positive, negative]), INTEGERS.zero())

    def test_memo_evaluates_each_matrix_once(self):
        weigh = WeightMemo("treesum")
        first = two_component(value=3, sign=1)
        second = Configuration("c1", ("c", "d"), first.matrix, -1)
        self.assertEqual(weigh(first), INTEGERS.from_int(3))
        self.assertEqual(weigh(second), INTEGERS.from_int(-3))
        self.assertEqual(weigh(first), INTEGERS.from_int(3))
        self.assertEqual(len(weigh), 1)

    def test_evaluators_give_the_same_trace(self):
        for ring in (INTEGERS, RingHandle.modular(6), RingHandle.polynomials(["x", "y"])):
            for seed in range(6):
                scenario = generate_random_scenario(seed, ring, events=12, components=5)
                expected = run_scenario(scenario, "treesum").to_dict()
                self.assertEqual(run_scenario(scenario, "det").to_dict(), expected)
                self.assertEqual(run_scenario(scenario, "contraction").to_dict(), expected)


class TestScenarios(unittest.TestCase):
    """Hand-built scenarios with known weighted counts."""

    def test_two_component_wall(self):
        target = two_component()
        scenario = WallScenario(INTEGERS, (target,), (birth_event(target, 0, 1),))
        trace = run_scenario(scenario)
        self.assertEqual([str(entry.total) for entry in trace.entries], ["2", "2"])
        self.assertEqual(trace.entries[1].by_class, {"a+b": INTEGERS.from_int(2)})
        self.assertEqual(trace.entries[0].time, Fraction(0))
        self.assertTrue(trace.is_constant)
        trace.assert_constant()

    def test_symbolic_three_components(self):
        ring = RingHandle.polynomials(["x", "y", "z"])
        matrix = LinkingMatrix.from_rows(ring, [[0, "x", "y"], ["x", 0, "z"], ["y", "z", 0]])
        target = Configuration("c0", ("a", "b", "c"), matrix, 1)
        event = birth_event(target, 0, 1)
        self.assertEqual(str(event.fused.matrix.entry(0, 1)), "y + z")
        self.assertEqual(event.fused.classes, ("a+b", "c"))

        trace = run_scenario(WallScenario(ring, (target,), (event,)))
        self.assertEqual([str(entry.total) for entry in trace.entries], ["x*y + x*z + y*z"] * 2)
        self.assertTrue(trace.is_constant)

    def test_mirror_restores_population(self):
        rng = random.Random(3)
        ring = RingHandle.modular(7)
        rows = [[0] * 4 for _ in range(4)]
        for i in range(4):
            for j in range(i + 1, 4):
                rows[i][j] = rows[j][i] = rng.randint(0, 6)
        target = Configuration("c0", ("a", "b", "c", "d"), LinkingMatrix.from_rows(ring, rows), -1)
        population = Population(ring, (target,))

        birth = birth_event(target, 1, 3, time=Fraction(1, 3))
        after = apply_event(population, birth)
        self.assertEqual(len(after), 2)
        self.assertEqual(total_weight(after), total_weight(population))
        restored = apply_event(after, mirror_event(birth, Fraction(2, 3)))
        self.assertEqual(restored, population)

    def test_wrong_sign_breaks_constancy(self):
        target = two_component()
        event = birth_event(target, 0, 1, sign=1)
        trace = run_scenario(WallScenario(INTEGERS, (target,), (event,)))
        self.assertFalse(trace.is_constant)
        self.assertEqual(trace.first_violation().time, HALF)
        self.assertEqual([str(entry.total) for entry in trace.entries], ["2", "4"])
        with self.assertRaises(NonConstantTraceError) as ctx:
            trace.assert_constant()
        self.assertEqual(ctx.exception.time, HALF)
        self.assertFalse(trace.to_dict()["constant"])

    def test_class_weights_are_conserved(self):
        ring = INTEGERS
        first = two_component()
        other = Configuration("c1", ("e", "f", "g"),
                              LinkingMatrix.from_rows(ring, [[0, 1, 2], [1, 0, 3], [2, 3, 0]]), -1)
        population = Population(ring, (first, other))
        after = apply_event(population, birth_event(other, 0, 2, new_id="g1"))
        self.assertEqual(weight_by_class(after), weight_by_class(population))
        self.assertEqual(list(weight_by_class(after)), ["a+b", "e+f+g"])

    def test_permutation_invariance(self):
        rng = random.Random(10)
        for _ in range(20):
            scenario = generate_random_scenario(rng.randint(0, 10 ** 6), INTEGERS, events=0, components=5)
            for config in scenario.initial:
                sigma = list(range(config.n))
                rng.shuffle(sigma)
                self.assertEqual(permute_configuration(config, sigma).weight(), config.weight())


class TestEventValidation(unittest.TestCase):

    def setUp(self):
        self.target = two_component()
        self.population = Population(INTEGERS, (self.target,))

    def assertEventError(self, event, population=None):
        with self.assertRaises(WallEventError) as ctx:
            apply_event(population or self.population, event)
        self.assertEqual(ctx.exception.time, event.time)
        self.assertEqual(ctx.exception.to_dict()["time"], str(event.time))

    def test_missing_target(self):
        event = birth_event(self.target, 0, 1)
        self.assertEventError(WallEvent(HALF, "nope", (0, 1), 1, event.fused))

    def test_pair_out_of_range(self):
        event = birth_event(self.target, 0, 1)
        self.assertEventError(WallEvent(HALF, "c0", (0, 2), 1, event.fused))

    def test_wrong_fused_matrix(self):
        matrix = LinkingMatrix.from_rows(INTEGERS, [[0, 1, 2], [1, 0, 3], [2, 3, 0]])
        target = Configuration("t", ("a", "b", "c"), matrix, 1)
        population = Population(INTEGERS, (target,))
        fused = Configuration("f", ("a+b", "c"), LinkingMatrix.from_rows(INTEGERS, [[0, 6], [6, 0]]), -1)
        self.assertEventError(WallEvent(HALF, "t", (0, 1), 1, fused), population)

    def test_wrong_classes(self):
        fused = fuse_configuration(self.target.with_jump(0, 1, 1), 0, 1, "f")
        relabeled = Configuration(fused.id, ("a",), fused.matrix, fused.sign)
        self.assertEventError(WallEvent(HALF, "c0", (0, 1), 1, relabeled))

    def test_birth_of_existing_id(self):
        event = birth_event(self.target, 0, 1, new_id="c0")
        self.assertEventError(event)

    def test_destroy_missing(self):
        fused = fuse_configuration(self.target.with_jump(0, 1, -1), 0, 1, "f")
        self.assertEventError(WallEvent(HALF, "c0", (0, 1), -1, fused))

    def test_invalid_events(self):
        fused = birth_event(self.target, 0, 1).fused
        with self.assertRaises(ValidationError):
            WallEvent(Fraction(1), "c0", (0, 1), 1, fused)
        with self.assertRaises(ValidationError):
            WallEvent(HALF, "c0", (0, 1), 2, fused)
        self.assertEqual(WallEvent(HALF, "c0", (1, 0), 1, fused).pair, (0, 1))

    def test_scenario_validation(self):
        event = birth_event(self.target, 0, 1)
        with self.assertRaises(ValidationError):
            WallScenario(INTEGERS, (self.target,), (event, mirror_event(event, HALF)))
        with self.assertRaises(ValidationError):
            WallScenario(INTEGERS, (self.target, self.target), ())
        with self.assertRaises(RingMismatchError):
            WallScenario(RingHandle.modular(3), (self.target,), ())
        with patch.object(Config, "SCENARIO_MAX_EVENTS", 1):
            with self.assertRaises(BoundsError):
                WallScenario(INTEGERS, (self.target,), (event, mirror_event(event, Fraction(3, 4))))

    def test_events_are_sorted(self):
        event = birth_event(self.target, 0, 1, time=Fraction(1, 4))
        mirror = mirror_event(event, Fraction(3, 4))
        scenario = WallScenario(INTEGERS, (self.target,), (mirror, event))
        self.assertEqual([e.time for e in scenario.events], [Fraction(1, 4), Fraction(3, 4)])
        self.assertTrue(run_scenario(scenario).is_constant)

    def test_document_round_trip(self):
        event = birth_event(self.target, 0, 1)
        scenario = WallScenario(INTEGERS, (self.target,), (event,))
        self.assertEqual(WallScenario.from_document(scenario.to_document()), scenario)


class TestGenerator(unittest.TestCase):
    """Randomly generated scenarios are valid and keep the weighted count constant."""

    RINGS = [
        RingHandle.integers(),
        RingHandle.modular(2),
        RingHandle.modular(7),
        RingHandle.polynomials(["x", "y"]),
    ]

    def test_deterministic(self):
        for ring in self.RINGS:
            first = generate_random_scenario(42, ring)
            second = generate_random_scenario(42, ring)
            self.assertEqual(first.to_dict(), second.to_dict())
        self.assertNotEqual(
            generate_random_scenario(1, INTEGERS).to_dict(),
            generate_random_scenario(2, INTEGERS).to_dict(),
        )

    def test_event_times(self):
        scenario = generate_random_scenario(7, INTEGERS, events=4)
        self.assertEqual([e.time for e in scenario.events], [Fraction(k, 5) for k in range(1, 5)])

    def assertFuzzConstant(self, ring, count, events, components):
        results = fuzz_scenarios(1000, count, ring, events=events, components=components)
        self.assertEqual(len(results), count)
        for seed, trace in results:
            self.assertTrue(trace.is_constant, msg=f"seed {seed} over {ring.spec}")
            self.assertEqual(len(trace.entries), events + 1)

    def test_fuzz_integers(self):
        self.assertFuzzConstant(INTEGERS, 500, 32, 6)

    def test_fuzz_modular(self):
        self.assertFuzzConstant(RingHandle.modular(2), 500, 32, 6)

    def test_fuzz_modular_seven(self):
        self.assertFuzzConstant(RingHandle.modular(7), 500, 32, 6)

    def test_fuzz_polynomials(self):
        self.assertFuzzConstant(RingHandle.polynomials(["x", "y"]), 500, 32, 6)

    def test_generator_destroys_fused_configurations(self):
        for ring in self.RINGS:
            mirrors = 0
            for seed in range(1000, 1100):
                scenario = generate_random_scenario(seed, ring, events=10, components=5)
                mirrors += sum(1 for e in scenario.events if e.delta < 0)
            self.assertGreater(mirrors, 0, msg=ring.spec)

    def test_bounds(self):
        with self.assertRaises(BoundsError):
            generate_random_scenario(0, INTEGERS, components=7)
        with self.assertRaises(BoundsError):
            generate_random_scenario(0, INTEGERS, events=33)
        with self.assertRaises(BoundsError):
            generate_random_scenario(0, INTEGERS, events=3, components=1)
        with self.assertRaises(BoundsError):
            fuzz_scenarios(0, -1, INTEGERS)

    def test_no_events(self):
        scenario = generate_random_scenario(5, INTEGERS, events=0, components=1)
        trace = run_scenario(scenario)
        self.assertEqual(len(trace.entries), 1)
        self.assertTrue(trace.is_constant)


if __name__ == "__main__":
    unittest.main()
