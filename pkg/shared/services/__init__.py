"""
Forested Links Services Package
Contains the complete graph, spanning trees, forested forms, link geometry and the wall-crossing simulator.
"""

from .complete_graph import CompleteGraph, ContractionMap, Edge, EdgeVector
from .spanning_trees import SpanningTree, enumerate_trees
from .forested_form import Evaluator, forested_form
from .link_geometry import LinkingMatrix, PolylineLink, linking_number, self_linking_weight
from .wall_sim import Configuration, Population, WallEvent, WallScenario, run_scenario

__version__ = "0.1.0"
__all__ = [
    "CompleteGraph",
    "ContractionMap",
    "Edge",
    "EdgeVector",
    "SpanningTree",
    "enumerate_trees",
    "Evaluator",
    "forested_form",
    "LinkingMatrix",
    "PolylineLink",
    "linking_number",
    "self_linking_weight",
    "Configuration",
    "Population",
    "WallEvent",
    "WallScenario",
    "run_scenario",
]
