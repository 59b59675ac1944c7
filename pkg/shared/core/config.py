"""
Configuration management for Forested Links.
"""

import os
from pathlib import Path
from typing import Dict, Any, Union
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv(override=True)


# Hard ceilings; the environment may tighten these, never loosen them.
HARD_MAX_GRAPH_N = 12
HARD_MAX_TREE_N = 9
HARD_MAX_COMPONENTS = 6
HARD_MAX_EVENTS = 32


def env_int(name: str, default: int) -> Union[int, str]:
    """Integer setting from the environment; unparsable text is kept for validate() to report."""
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return raw


class Config:
    """Configuration class for managing environment variables and settings."""

    # Project paths
    PROJECT_ROOT = Path(__file__).parent.parent.parent
    FIXTURES_DIR = PROJECT_ROOT / "tests" / "fixtures"

    # Logging
    LOG_LEVEL = os.getenv("FORESTLINKS_LOG_LEVEL", "WARNING").upper()

    # Algebra defaults
    DEFAULT_RING = os.getenv("FORESTLINKS_DEFAULT_RING", "integers")
    DEFAULT_EVALUATOR = os.getenv("FORESTLINKS_DEFAULT_EVALUATOR", "treesum").lower()

    # Enumeration bounds
    MAX_GRAPH_N = env_int("FORESTLINKS_MAX_GRAPH_N", HARD_MAX_GRAPH_N)
    MAX_TREE_N = env_int("FORESTLINKS_MAX_TREE_N", HARD_MAX_TREE_N)

    # Geometry
    PERTURBATION_RETRIES = env_int("FORESTLINKS_PERTURBATION_RETRIES", 8)

    # Wall-crossing scenarios
    SCENARIO_MAX_COMPONENTS = env_int("FORESTLINKS_SCENARIO_MAX_COMPONENTS", HARD_MAX_COMPONENTS)
    SCENARIO_MAX_EVENTS = env_int("FORESTLINKS_SCENARIO_MAX_EVENTS", HARD_MAX_EVENTS)
    FUZZ_DEFAULT_COUNT = env_int("FORESTLINKS_FUZZ_DEFAULT_COUNT", 100)

    @classmethod
    def validate(cls) -> None:
        """Validate that configured bounds are integers within their hard ceilings."""
        bounds = {
            "FORESTLINKS_MAX_GRAPH_N": (cls.MAX_GRAPH_N, 1, HARD_MAX_GRAPH_N),
            "FORESTLINKS_MAX_TREE_N": (cls.MAX_TREE_N, 1, HARD_MAX_TREE_N),
            "FORESTLINKS_PERTURBATION_RETRIES": (cls.PERTURBATION_RETRIES, 1, 64),
            "FORESTLINKS_SCENARIO_MAX_COMPONENTS": (cls.SCENARIO_MAX_COMPONENTS, 1, HARD_MAX_COMPONENTS),
            "FORESTLINKS_SCENARIO_MAX_EVENTS": (cls.SCENARIO_MAX_EVENTS, 0, HARD_MAX_EVENTS),
        }

        invalid_vars = [
            f"{var}={value} (allowed {low}..{high})"
            for var, (value, low, high) in bounds.items()
            if not isinstance(value, int) or not low <= value <= high
        ]
        if not isinstance(cls.FUZZ_DEFAULT_COUNT, int) or cls.FUZZ_DEFAULT_COUNT < 0:
            invalid_vars.append(f"FORESTLINKS_FUZZ_DEFAULT_COUNT={cls.FUZZ_DEFAULT_COUNT}")
        if cls.DEFAULT_EVALUATOR not in ("treesum", "det", "contraction"):
            invalid_vars.append(f"FORESTLINKS_DEFAULT_EVALUATOR={cls.DEFAULT_EVALUATOR}")

        if invalid_vars:
            raise ValueError(
                f"Invalid configuration values: {', '.join(invalid_vars)}"
            )

    @classmethod
    def get_geometry_config(cls) -> Dict[str, Any]:
        """Get linking-number computation settings."""
        return {
            "perturbation_retries": max(1, cls.PERTURBATION_RETRIES),
        }

    @classmethod
    def get_scenario_config(cls) -> Dict[str, Any]:
        """Get wall-crossing scenario bounds."""
        return {
            "max_components": min(cls.SCENARIO_MAX_COMPONENTS, HARD_MAX_COMPONENTS),
            "max_events": min(cls.SCENARIO_MAX_EVENTS, HARD_MAX_EVENTS),
            "fuzz_default_count": cls.FUZZ_DEFAULT_COUNT,
        }
