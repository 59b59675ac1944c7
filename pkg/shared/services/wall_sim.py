"""
Wall-crossing simulator.

A population of signed configurations (each a multiset of class labels with a
linking matrix) evolves through wall events. At a wall the linking number of
two components of a target configuration jumps by ±1, and a fused
configuration, obtained from the target by merging the two components, is
born (delta = +1) or destroyed (delta = -1). The weighted count

    Σ sign(C) · lk_n(C)

is then constant along any valid scenario, in total and for every total class.
"""

import logging
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from shared.core.config import Config, HARD_MAX_COMPONENTS, HARD_MAX_EVENTS
from shared.core.errors import (
    BoundsError,
    NonConstantTraceError,
    RingMismatchError,
    ValidationError,
    WallEventError,
)
from shared.core.models import ConfigurationDocument, RingSpec, ScenarioDocument, WallEventDocument
from shared.core.rings import RingElement, RingHandle, RingKind
from shared.services.complete_graph import Edge, build_contraction, pushforward, validate_permutation
from shared.services.forested_form import Evaluator
from shared.services.link_geometry import LinkingMatrix, self_linking_weight

logger = logging.getLogger(__name__)

LABEL_SEPARATOR = "+"


def merge_labels(first: str, second: str) -> str:
    """Formal sum of two class labels, kept sorted."""
    return LABEL_SEPARATOR.join(sorted(first.split(LABEL_SEPARATOR) + second.split(LABEL_SEPARATOR)))


@dataclass(frozen=True)
class Configuration:
    """One unordered configuration of disc boundaries."""
    id: str
    classes: Tuple[str, ...]
    matrix: LinkingMatrix
    sign: int

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if not self.id:
            raise ValidationError("Configuration id must be nonempty")
        if self.sign not in (1, -1) or isinstance(self.sign, bool):
            raise ValidationError(f"Configuration {self.id}: sign must be +1 or -1, got {self.sign!r}")
        if len(self.classes) != self.matrix.n:
            raise ValidationError(
                f"Configuration {self.id}: {len(self.classes)} classes for a {self.matrix.n}-component matrix"
            )
        if any(not label for label in self.classes):
            raise ValidationError(f"Configuration {self.id}: class labels must be nonempty")

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def ring(self) -> RingHandle:
        return self.matrix.ring

    @property
    def total_class(self) -> str:
        labels = [part for label in self.classes for part in label.split(LABEL_SEPARATOR)]
        return LABEL_SEPARATOR.join(sorted(labels))

    def weight(self, evaluator: Union[Evaluator, str, None] = None) -> RingElement:
        """sign · lk_n(matrix)."""
        value = self_linking_weight(self.matrix, evaluator)
        return value if self.sign > 0 else -value

    def with_jump(self, i: int, j: int, delta: int) -> "Configuration":
        """The same configuration with entry (i, j) shifted by ``delta``."""
        ring = self.ring
        shift = ring.from_int(delta)
        rows = [list(row) for row in self.matrix.entries]
        rows[i][j] = rows[i][j] + shift
        rows[j][i] = rows[j][i] + shift
        return replace(self, matrix=LinkingMatrix(self.n, ring, rows))

    @classmethod
    def from_document(cls, document: ConfigurationDocument, ring: RingHandle) -> "Configuration":
        matrix = LinkingMatrix.from_rows(ring, document.matrix)
        return cls(id=document.id, classes=tuple(document.classes), matrix=matrix, sign=document.sign)

    def to_document(self) -> ConfigurationDocument:
        return ConfigurationDocument(
            id=self.id,
            classes=list(self.classes),
            sign=self.sign,
            matrix=self.matrix.to_rows(),
        )


def fuse_configuration(target: Configuration, i: int, j: int, new_id: str,
                       sign: Optional[int] = None) -> Configuration:
    """Merge components i and j of ``target`` along the contraction of edge {i, j}.

    The fused sign defaults to ``-target.sign``, matching the -Φ_{n-1}∘(c_e)_* term of a wall.
    """
    if target.n < 2:
        raise BoundsError(f"Configuration {target.id} has a single component; nothing to fuse")
    e = Edge.of(i, j)
    c = build_contraction(target.n, e)
    vector = pushforward(c, target.matrix.to_edge_vector())

    classes: List[Optional[str]] = [None] * (target.n - 1)
    for v, label in enumerate(target.classes):
        if v == e.hi:
            continue
        classes[c.vertex_map[v]] = label
    classes[c.special_vertex] = merge_labels(target.classes[e.lo], target.classes[e.hi])

    return Configuration(
        id=new_id,
        classes=tuple(classes),
        matrix=LinkingMatrix.from_edge_vector(vector),
        sign=-target.sign if sign is None else sign,
    )


def permute_configuration(config: Configuration, sigma: Sequence[int]) -> Configuration:
    """Relabel components: component i becomes component σ(i)."""
    sigma = validate_permutation(sigma, config.n)
    classes: List[str] = [""] * config.n
    for i, label in enumerate(config.classes):
        classes[sigma[i]] = label
    return replace(config, classes=tuple(classes), matrix=config.matrix.permuted(sigma))


@dataclass(frozen=True)
class WallEvent:
    time: Fraction
    target: str
    pair: Tuple[int, int]
    delta: int
    fused: Configuration

    def __post_init__(self):
        time = Fraction(self.time)
        object.__setattr__(self, "time", time)
        if not 0 < time < 1:
            raise ValidationError(f"Event time {time} is outside (0, 1)")
        if self.delta not in (1, -1) or isinstance(self.delta, bool):
            raise ValidationError(f"Event at {time}: delta must be +1 or -1, got {self.delta!r}")
        if len(self.pair) != 2:
            raise ValidationError(f"Event at {time}: pair needs two component indices")
        e = Edge.of(*self.pair)
        object.__setattr__(self, "pair", (e.lo, e.hi))

    @classmethod
    def from_document(cls, document: WallEventDocument, ring: RingHandle) -> "WallEvent":
        try:
            time = Fraction(document.time)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"Invalid event time {document.time!r}")
        return cls(
            time=time,
            target=document.target,
            pair=tuple(document.pair),
            delta=document.delta,
            fused=Configuration.from_document(document.fused, ring),
        )

    def to_document(self) -> WallEventDocument:
        return WallEventDocument(
            time=str(self.time),
            target=self.target,
            pair=list(self.pair),
            delta=self.delta,
            fused=self.fused.to_document(),
        )


def mirror_event(event: WallEvent, time: Fraction) -> WallEvent:
    """The opposite crossing of the same wall, at ``time``."""
    return WallEvent(time=time, target=event.target, pair=event.pair, delta=-event.delta, fused=event.fused)


@dataclass(frozen=True)
class Population:
    """Insertion-ordered configurations over one ring, unique by id."""
    ring: RingHandle
    configurations: Tuple[Configuration, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "configurations", tuple(self.configurations))
        seen = set()
        for config in self.configurations:
            if config.id in seen:
                raise ValidationError(f"Duplicate configuration id {config.id!r}")
            seen.add(config.id)
            if config.ring != self.ring:
                raise RingMismatchError(
                    f"Configuration {config.id} is over {config.ring.spec}, population over {self.ring.spec}"
                )

    def __iter__(self) -> Iterator[Configuration]:
        return iter(self.configurations)

    def __len__(self) -> int:
        return len(self.configurations)

    def get(self, config_id: str) -> Optional[Configuration]:
        for config in self.configurations:
            if config.id == config_id:
                return config
        return None

    def replaced(self, config: Configuration) -> "Population":
        return Population(self.ring, tuple(config if c.id == config.id else c for c in self.configurations))

    def added(self, config: Configuration) -> "Population":
        return Population(self.ring, self.configurations + (config,))

    def removed(self, config_id: str) -> "Population":
        return Population(self.ring, tuple(c for c in self.configurations if c.id != config_id))


class WeightMemo:
    """sign · lk_n of configurations, evaluating lk_n once per distinct matrix."""

    def __init__(self, evaluator: Union[Evaluator, str, None] = None):
        self.evaluator = Evaluator.resolve(evaluator)
        self._lk: Dict[LinkingMatrix, RingElement] = {}
        # keyed by id(); the stored configuration keeps the id from being reused
        self._seen: Dict[int, Tuple[Configuration, RingElement]] = {}

    def __call__(self, config: Configuration) -> RingElement:
        hit = self._seen.get(id(config))
        if hit is not None and hit[0] is config:
            return hit[1]

        value = self._lk.get(config.matrix)
        if value is None:
            value = self_linking_weight(config.matrix, self.evaluator)
            self._lk[config.matrix] = value
        weight = value if config.sign > 0 else -value
        self._seen[id(config)] = (config, weight)
        return weight

    def __len__(self) -> int:
        return len(self._lk)


def total_weight(population: Union[Population, Sequence[Configuration]],
                 ring: Optional[RingHandle] = None,
                 evaluator: Union[Evaluator, str, None] = None) -> RingElement:
    """Σ sign · lk_n over the population; each unordered configuration counts once.

    An empty sequence with no ``ring`` sums to zero in the default ring.
    """
    if not isinstance(population, Population):
        configurations = tuple(population)
        if ring is None:
            ring = configurations[0].ring if configurations else RingHandle.parse(Config.DEFAULT_RING)
        population = Population(ring, configurations)
    elif ring is not None and ring != population.ring:
        raise RingMismatchError(f"Population is over {population.ring.spec}, expected {ring.spec}")

    weigh = WeightMemo(evaluator)
    total = population.ring.zero()
    for config in population:
        total = total + weigh(config)
    return total


def _class_weights(population: Population, weigh: Callable[[Configuration], RingElement]) -> Dict[str, RingElement]:
    weights: Dict[str, RingElement] = {}
    for config in population:
        key = config.total_class
        weights[key] = weights.get(key, population.ring.zero()) + weigh(config)
    return dict(sorted(weights.items()))


def weight_by_class(population: Population,
                    evaluator: Union[Evaluator, str, None] = None) -> Dict[str, RingElement]:
    """Weighted count split by total class, keys sorted."""
    return _class_weights(population, WeightMemo(evaluator))


def apply_event(population: Population, event: WallEvent) -> Population:
    """Cross one wall: jump the target's linking number and birth or destroy the fused configuration."""
    target = population.get(event.target)
    if target is None:
        raise WallEventError(f"Target configuration {event.target!r} does not exist", event.time)

    i, j = event.pair
    if j >= target.n:
        raise WallEventError(f"Pair {list(event.pair)} is out of range for {target.n} components", event.time)

    jumped = target.with_jump(i, j, event.delta)
    expected = fuse_configuration(jumped, i, j, event.fused.id, sign=event.fused.sign)
    fused = event.fused
    if fused.n != expected.n:
        raise WallEventError(f"Fused configuration has {fused.n} components, expected {expected.n}", event.time)
    if fused.classes != expected.classes:
        raise WallEventError(
            f"Fused classes {list(fused.classes)} do not merge the target's, expected {list(expected.classes)}",
            event.time,
        )
    if fused.matrix != expected.matrix:
        raise WallEventError("Fused matrix does not match the contraction of the target's matrix", event.time)

    existing = population.get(fused.id)
    if event.delta > 0:
        if existing is not None:
            raise WallEventError(f"Configuration {fused.id!r} already exists", event.time)
        result = population.replaced(jumped).added(fused)
    else:
        if existing is None:
            raise WallEventError(f"Configuration {fused.id!r} to destroy does not exist", event.time)
        if existing != fused:
            raise WallEventError(f"Configuration {fused.id!r} differs from the fused configuration", event.time)
        result = population.replaced(jumped).removed(fused.id)

    logger.debug(
        f"WALL EVENT: t={event.time} target={target.id} pair={list(event.pair)} delta={event.delta:+d} "
        f"fused={fused.id}"
    )
    return result


@dataclass(frozen=True)
class WallScenario:
    ring: RingHandle
    initial: Tuple[Configuration, ...]
    events: Tuple[WallEvent, ...]

    def __post_init__(self):
        object.__setattr__(self, "initial", tuple(self.initial))
        events = tuple(sorted(self.events, key=lambda e: e.time))
        object.__setattr__(self, "events", events)

        limits = Config.get_scenario_config()
        if len(events) > limits["max_events"]:
            raise BoundsError(f"Scenario has {len(events)} events, at most {limits['max_events']} allowed")
        times = [e.time for e in events]
        if len(set(times)) != len(times):
            raise ValidationError("Event times must be distinct")
        for config in self.initial + tuple(e.fused for e in events):
            if config.n > limits["max_components"]:
                raise BoundsError(
                    f"Configuration {config.id} has {config.n} components, at most {limits['max_components']} allowed"
                )
        # duplicate ids and ring mismatches
        Population(self.ring, self.initial)
        for event in events:
            if event.fused.ring != self.ring:
                raise RingMismatchError(f"Event at {event.time} is over {event.fused.ring.spec}")

    @classmethod
    def from_document(cls, document: ScenarioDocument) -> "WallScenario":
        ring = RingHandle.from_dict(document.ring.to_dict())
        return cls(
            ring=ring,
            initial=tuple(Configuration.from_document(c, ring) for c in document.initial),
            events=tuple(WallEvent.from_document(e, ring) for e in document.events),
        )

    def to_document(self) -> ScenarioDocument:
        return ScenarioDocument(
            ring=RingSpec(**self.ring.to_dict()),
            initial=[c.to_document() for c in self.initial],
            events=[e.to_document() for e in self.events],
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return self.to_document().model_dump(exclude_none=True)


@dataclass(frozen=True)
class TraceEntry:
    time: Fraction
    total: RingElement
    by_class: Dict[str, RingElement] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "time": str(self.time),
            "total": str(self.total),
            "by_class": {key: str(value) for key, value in self.by_class.items()},
        }


@dataclass(frozen=True)
class ScenarioTrace:
    """Weighted counts after the initial state (time 0) and after every event."""
    ring: RingHandle
    entries: Tuple[TraceEntry, ...]

    def first_violation(self) -> Optional[TraceEntry]:
        if not self.entries:
            return None
        reference = self.entries[0]
        zero = self.ring.zero()
        for entry in self.entries[1:]:
            if entry.total != reference.total:
                return entry
            keys = set(reference.by_class) | set(entry.by_class)
            if any(reference.by_class.get(k, zero) != entry.by_class.get(k, zero) for k in keys):
                return entry
        return None

    @property
    def is_constant(self) -> bool:
        return self.first_violation() is None

    def assert_constant(self) -> None:
        violation = self.first_violation()
        if violation is not None:
            raise NonConstantTraceError(
                f"Weighted count changed from {self.entries[0].total} to {violation.total} at time {violation.time}",
                violation.time,
            )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "ring": self.ring.to_dict(),
            "constant": self.is_constant,
            "trace": [entry.to_dict() for entry in self.entries],
        }


def _record(population: Population, time: Fraction, weigh: WeightMemo) -> TraceEntry:
    by_class = _class_weights(population, weigh)
    total = population.ring.zero()
    for value in by_class.values():
        total = total + value
    return TraceEntry(time=time, total=total, by_class=by_class)


def run_scenario(s: WallScenario, evaluator: Union[Evaluator, str, None] = None) -> ScenarioTrace:
    """Replay the events in time order, recording the weighted count after each."""
    weigh = WeightMemo(evaluator)
    population = Population(s.ring, s.initial)
    entries = [_record(population, Fraction(0), weigh)]
    for event in s.events:
        population = apply_event(population, event)
        entries.append(_record(population, event.time, weigh))
    trace = ScenarioTrace(ring=s.ring, entries=tuple(entries))
    logger.info(f"SCENARIO: {len(s.events)} events over {s.ring.spec}, constant={trace.is_constant}")
    return trace


def _random_entry(rng: random.Random, ring: RingHandle) -> RingElement:
    # affine in one variable over polynomial rings: small integer plus a symbolic offset
    if ring.kind is RingKind.POLYNOMIALS:
        return ring.from_int(rng.randint(-2, 2)) + ring.variable(rng.choice(ring.variables)) * rng.randint(-2, 2)
    return ring.random_element(rng)


def _random_matrix(rng: random.Random, ring: RingHandle, n: int) -> LinkingMatrix:
    zero = ring.zero()
    rows = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            value = _random_entry(rng, ring)
            rows[i][j] = value
            rows[j][i] = value
    return LinkingMatrix(n, ring, rows)


def generate_random_scenario(seed: int, ring: RingHandle, events: int = 10,
                             components: int = HARD_MAX_COMPONENTS) -> WallScenario:
    """A reproducible scenario whose events all satisfy the contraction recipe."""
    limits = Config.get_scenario_config()
    if not 1 <= components <= limits["max_components"]:
        raise BoundsError(f"components must lie in 1..{limits['max_components']}, got {components}")
    if not 0 <= events <= limits["max_events"]:
        raise BoundsError(f"events must lie in 0..{limits['max_events']}, got {events}")
    if events and components < 2:
        raise BoundsError("Wall events need a configuration with at least 2 components")

    rng = random.Random(seed)
    label_counter = 0

    def fresh_labels(count: int) -> Tuple[str, ...]:
        nonlocal label_counter
        labels = tuple(f"d{label_counter + k}" for k in range(count))
        label_counter += count
        return labels

    initial = []
    for k in range(rng.randint(1, 3)):
        if k == 0 and components >= 2:
            n = rng.randint(2, components)
        else:
            n = rng.randint(1, components)
        initial.append(Configuration(
            id=f"c{k}",
            classes=fresh_labels(n),
            matrix=_random_matrix(rng, ring, n),
            sign=rng.choice((1, -1)),
        ))

    population = Population(ring, initial)
    births: List[WallEvent] = []
    generated: List[WallEvent] = []
    for k in range(1, events + 1):
        time = Fraction(k, events + 1)
        event = None

        if births and rng.random() < 1 / 3:
            birth = births[rng.randrange(len(births))]
            target = population.get(birth.target)
            i, j = birth.pair
            candidate = None
            if target is not None:
                candidate = fuse_configuration(target.with_jump(i, j, -1), i, j, birth.fused.id, sign=-target.sign)
            if candidate is not None and population.get(birth.fused.id) == candidate:
                event = WallEvent(time=time, target=target.id, pair=birth.pair, delta=-1, fused=candidate)
                births.remove(birth)

        if event is None:
            targets = [c for c in population if c.n >= 2]
            target = targets[rng.randrange(len(targets))]
            i, j = sorted(rng.sample(range(target.n), 2))
            fused = fuse_configuration(target.with_jump(i, j, 1), i, j, f"f{k}")
            event = WallEvent(time=time, target=target.id, pair=(i, j), delta=1, fused=fused)
            births.append(event)

        population = apply_event(population, event)
        generated.append(event)

    logger.debug(f"SCENARIO GENERATOR: seed={seed} ring={ring.spec} events={events} components<={components}")
    return WallScenario(ring=ring, initial=tuple(initial), events=tuple(generated))


def fuzz_scenarios(seed: int, count: int, ring: RingHandle, events: int = 10,
                   components: int = HARD_MAX_COMPONENTS,
                   evaluator: Union[Evaluator, str, None] = Evaluator.DETERMINANT) -> List[Tuple[int, ScenarioTrace]]:
    """Generate and run ``count`` scenarios from consecutive seeds."""
    if count < 0:
        raise BoundsError(f"count must be non-negative, got {count}")
    results = []
    for offset in range(count):
        scenario = generate_random_scenario(seed + offset, ring, events=events, components=components)
        results.append((seed + offset, run_scenario(scenario, evaluator)))
    return results
