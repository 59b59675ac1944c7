"""
forestlinks command-line entry point.

Every invocation prints exactly one JSON CommandResult on stdout; logs go to
stderr. Exit codes: 0 ok, 2 usage, 3 invalid input, 4 violated precondition,
5 invariant breach.
"""

import argparse
import logging
import sys
from typing import List, Optional

from shared.core.config import Config
from shared.core.errors import UnknownCommandError, UsageError
from shared.core.models import CommandResult
from shared.core.utils import dump_json
from shared.services.forested_form import Evaluator
from services.cli.command_handler import CommandHandler

logger = logging.getLogger(__name__)

RING_HELP = "coefficient ring: integers | mod:<q> | poly:<v1,v2,...>"


class HelpRequested(Exception):
    def __init__(self, text: str):
        super().__init__(text)
        self.text = text


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of printing and exiting."""

    def error(self, message: str):
        if "invalid choice" in message:
            raise UnknownCommandError(f"{self.prog}: {message}")
        raise UsageError(f"{self.prog}: {message}")

    def print_help(self, file=None):
        raise HelpRequested(self.format_help())


def build_parser() -> CommandParser:
    parser = CommandParser(prog="forestlinks", description="Forested forms, linking numbers and wall-crossing checks.")
    parser.add_argument("--log-level", default=None, help="override FORESTLINKS_LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    # ring
    ring = commands.add_parser("ring", help="coefficient ring utilities")
    ring_actions = ring.add_subparsers(dest="action", required=True, metavar="action")
    constants = ring_actions.add_parser("constants", help="zero and one of a ring")
    constants.add_argument("--ring", default=None, help=RING_HELP)
    parse = ring_actions.add_parser("parse", help="canonical form of a ring element")
    parse.add_argument("--ring", default=None, help=RING_HELP)
    parse.add_argument("--value", required=True)

    # trees
    trees = commands.add_parser("trees", help="spanning trees of K_n")
    tree_actions = trees.add_subparsers(dest="action", required=True, metavar="action")
    count = tree_actions.add_parser("count", help="enumerate and count the spanning trees")
    count.add_argument("--n", type=int, required=True)
    listing = tree_actions.add_parser("list", help="list the spanning trees in Prüfer order")
    listing.add_argument("--n", type=int, required=True)
    listing.add_argument("--through", default=None, help="only trees through edge i,j")

    # forested
    forested = commands.add_parser("forested", help="the forested form")
    forested_actions = forested.add_subparsers(dest="action", required=True, metavar="action")
    evaluate = forested_actions.add_parser("eval", help="evaluate the forested form")
    evaluate.add_argument("--input", required=True, help="edge-vector JSON/YAML")
    evaluate.add_argument("--evaluator", choices=[e.value for e in Evaluator], default=None)
    identity = forested_actions.add_parser("check-identity", help="check the contraction identity")
    identity.add_argument("--input", required=True, help="edge-vector JSON/YAML")
    identity.add_argument("--edge", required=True, help="contracted edge i,j")
    identity.add_argument("--evaluator", choices=[e.value for e in Evaluator], default=None)

    # lk
    lk = commands.add_parser("lk", help="linking numbers and self-linking weights")
    lk_actions = lk.add_subparsers(dest="action", required=True, metavar="action")
    matrix = lk_actions.add_parser("matrix", help="linking matrix of a polygonal link")
    matrix.add_argument("--link", required=True, help="link JSON/YAML")
    matrix.add_argument("--ring", default=None, help=RING_HELP)
    weight = lk_actions.add_parser("weight", help="self-linking weight")
    source = weight.add_mutually_exclusive_group(required=True)
    source.add_argument("--matrix", default=None, help="linking-matrix JSON/YAML")
    source.add_argument("--link", default=None, help="link JSON/YAML")
    weight.add_argument("--ring", default=None, help=RING_HELP + " (with --link)")

    # wallcross
    wallcross = commands.add_parser("wallcross", help="wall-crossing scenarios")
    wall_actions = wallcross.add_subparsers(dest="action", required=True, metavar="action")
    run = wall_actions.add_parser("run", help="replay a scenario and check the weighted count")
    run.add_argument("--scenario", required=True, help="scenario JSON/YAML")
    generate = wall_actions.add_parser("generate", help="generate a random scenario")
    fuzz = wall_actions.add_parser("fuzz", help="generate and run scenarios from consecutive seeds")
    for sub in (generate, fuzz):
        sub.add_argument("--seed", type=int, required=True)
        sub.add_argument("--ring", default=None, help=RING_HELP)
        sub.add_argument("--events", type=int, default=10)
        sub.add_argument("--components", type=int, default=None, help="largest configuration (FORESTLINKS_SCENARIO_MAX_COMPONENTS)")
    fuzz.add_argument("--count", type=int, default=None, help="number of scenarios (FORESTLINKS_FUZZ_DEFAULT_COUNT)")

    return parser


def configure_logging(level: Optional[str] = None) -> None:
    logging.basicConfig(
        level=getattr(logging, (level or Config.LOG_LEVEL).upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def dispatch(argv: Optional[List[str]] = None) -> CommandResult:
    """Parse ``argv`` and run the command it names."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except HelpRequested as e:
        return CommandResult.ok({"help": e.text})
    except UsageError as e:
        return CommandResult.failure(e.to_dict(), e.exit_code)

    configure_logging(args.log_level)
    try:
        Config.validate()
    except ValueError as e:
        error = UsageError(str(e))
        return CommandResult.failure(error.to_dict(), error.exit_code)

    return CommandHandler().handle_command(args)


def main(argv: Optional[List[str]] = None) -> int:
    result = dispatch(argv)
    sys.stdout.write(dump_json(result.to_dict()) + "\n")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
