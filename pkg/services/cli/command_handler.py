"""
Command handler for the forestlinks CLI.

Routes a parsed command line to the service layer and wraps the outcome in a
CommandResult. Errors raised by the services are converted here, so callers
always get a result with the matching exit code.
"""

import argparse
import logging
import traceback
from pathlib import Path
from typing import Any, Dict, Optional

from shared.core.config import Config
from shared.core.errors import (
    ForestLinksError,
    InvariantError,
    NonConstantTraceError,
    UnknownCommandError,
    UsageError,
)
from shared.core.models import (
    CommandResult,
    EdgeVectorDocument,
    LinkDocument,
    MatrixDocument,
    ScenarioDocument,
)
from shared.core.rings import RingHandle, ring_constants
from shared.core.utils import load_model, parse_pair
from shared.services.complete_graph import CompleteGraph, Edge, EdgeVector
from shared.services.forested_form import Evaluator, contraction_identity_check, evaluate_forested
from shared.services.link_geometry import (
    LinkingMatrix,
    PolylineLink,
    linking_matrix,
    self_linking_weight,
)
from shared.services.spanning_trees import count_trees, enumerate_trees, iter_tree_edges, trees_through_edge
from shared.services.wall_sim import WallScenario, fuzz_scenarios, generate_random_scenario, run_scenario

logger = logging.getLogger(__name__)


class CommandHandler:
    """Executes one parsed forestlinks command."""

    def handle_command(self, args: argparse.Namespace) -> CommandResult:
        """Route command to appropriate handler."""
        command = getattr(args, "command", None)
        action = getattr(args, "action", None)

        logger.info(f"COMMAND: {command} {action}")

        try:
            if command == "ring":
                result = self._handle_ring(args)
            elif command == "trees":
                result = self._handle_trees(args)
            elif command == "forested":
                result = self._handle_forested(args)
            elif command == "lk":
                result = self._handle_lk(args)
            elif command == "wallcross":
                result = self._handle_wallcross(args)
            else:
                raise UnknownCommandError(f"Unknown command: {command}")

            logger.info(f"COMMAND: {command} {action} finished with status {result.status}")
            return result

        except ForestLinksError as e:
            logger.error(f"COMMAND ERROR: {type(e).__name__}: {e}")
            return CommandResult.failure(e.to_dict(), e.exit_code)
        except Exception as e:
            logger.error(f"COMMAND ERROR: {type(e).__name__}: {e}")
            logger.debug(traceback.format_exc())
            return CommandResult.failure(
                {"code": "internal_error", "message": str(e)},
                InvariantError.exit_code,
                diagnostics=[f"{type(e).__name__} raised while running {command} {action}"],
            )

    # ------------------------------------------------------------------
    # ring
    # ------------------------------------------------------------------

    def _handle_ring(self, args: argparse.Namespace) -> CommandResult:
        ring = _ring(args)
        if args.action == "constants":
            zero, one = ring_constants(ring)
            return CommandResult.ok({"ring": ring.to_dict(), "zero": str(zero), "one": str(one)})
        elif args.action == "parse":
            value = ring.parse_element(args.value)
            return CommandResult.ok({"ring": ring.to_dict(), "value": str(value)})
        raise UnknownCommandError(f"Unknown ring action: {args.action}")

    # ------------------------------------------------------------------
    # trees
    # ------------------------------------------------------------------

    def _handle_trees(self, args: argparse.Namespace) -> CommandResult:
        n = args.n
        if args.action == "count":
            count = sum(1 for _ in iter_tree_edges(n))
            if count != count_trees(n):
                raise InvariantError(f"Enumerated {count} trees of K_{n}, expected {count_trees(n)}")
            return CommandResult.ok({"count": count})

        elif args.action == "list":
            if args.through:
                e = CompleteGraph(n).validate_edge(Edge.of(*parse_pair(args.through)))
                trees = list(trees_through_edge(n, e))
            else:
                trees = list(enumerate_trees(n))
            return CommandResult.ok({
                "n": n,
                "count": len(trees),
                "trees": [[edge.to_list() for edge in t.edges] for t in trees],
            })
        raise UnknownCommandError(f"Unknown trees action: {args.action}")

    # ------------------------------------------------------------------
    # forested
    # ------------------------------------------------------------------

    def _handle_forested(self, args: argparse.Namespace) -> CommandResult:
        a = EdgeVector.from_document(load_model(EdgeVectorDocument, Path(args.input)))
        evaluator = Evaluator.resolve(args.evaluator)

        if args.action == "eval":
            evaluation = evaluate_forested(a, evaluator)
            return CommandResult.ok(
                {"value": str(evaluation.value)},
                [f"n={a.n} ring={a.ring.spec} evaluator={evaluator.value}"],
            )

        elif args.action == "check-identity":
            e0 = a.graph.validate_edge(Edge.of(*parse_pair(args.edge)))
            check = contraction_identity_check(a, e0, evaluator)
            if not check.holds:
                raise InvariantError(
                    f"Contraction identity fails along {e0}: lhs={check.lhs} rhs={check.rhs}"
                )
            return CommandResult.ok(check.to_dict())
        raise UnknownCommandError(f"Unknown forested action: {args.action}")

    # ------------------------------------------------------------------
    # lk
    # ------------------------------------------------------------------

    def _handle_lk(self, args: argparse.Namespace) -> CommandResult:
        if args.action == "matrix":
            link = PolylineLink.from_document(load_model(LinkDocument, Path(args.link)))
            return CommandResult.ok(linking_matrix(link, _ring(args)).to_dict())

        elif args.action == "weight":
            if args.matrix:
                matrix = LinkingMatrix.from_document(load_model(MatrixDocument, Path(args.matrix)))
            elif args.link:
                link = PolylineLink.from_document(load_model(LinkDocument, Path(args.link)))
                matrix = linking_matrix(link, _ring(args))
            else:
                raise UsageError("lk weight needs --matrix or --link")
            value = self_linking_weight(matrix)
            return CommandResult.ok({"value": str(value)}, [f"n={matrix.n} ring={matrix.ring.spec}"])
        raise UnknownCommandError(f"Unknown lk action: {args.action}")

    # ------------------------------------------------------------------
    # wallcross
    # ------------------------------------------------------------------

    def _handle_wallcross(self, args: argparse.Namespace) -> CommandResult:
        if args.action == "run":
            scenario = WallScenario.from_document(load_model(ScenarioDocument, Path(args.scenario)))
            trace = run_scenario(scenario)
            try:
                trace.assert_constant()
            except NonConstantTraceError as e:
                logger.error(f"WALLCROSS: {e}")
                result = CommandResult.failure(e.to_dict(), e.exit_code)
                result.payload["trace"] = trace.to_dict()
                return result
            return CommandResult.ok(trace.to_dict())

        components = args.components
        if components is None:
            components = Config.get_scenario_config()["max_components"]

        if args.action == "generate":
            scenario = generate_random_scenario(args.seed, _ring(args), events=args.events, components=components)
            return CommandResult.ok(scenario.to_dict())

        elif args.action == "fuzz":
            count = args.count if args.count is not None else Config.FUZZ_DEFAULT_COUNT
            ring = _ring(args)
            results = fuzz_scenarios(args.seed, count, ring, events=args.events, components=components)
            failures = [seed for seed, trace in results if not trace.is_constant]
            payload: Dict[str, Any] = {"ring": ring.to_dict(), "count": len(results), "failures": failures}
            if failures:
                error = NonConstantTraceError(f"{len(failures)} of {len(results)} scenarios had a non-constant trace")
                result = CommandResult.failure(error.to_dict(), error.exit_code)
                result.payload.update(payload)
                return result
            return CommandResult.ok(payload)
        raise UnknownCommandError(f"Unknown wallcross action: {args.action}")


def _ring(args: argparse.Namespace) -> RingHandle:
    spec: Optional[str] = getattr(args, "ring", None)
    return RingHandle.parse(spec or Config.DEFAULT_RING)
