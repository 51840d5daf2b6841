"""Tools for flexible list colouring: reducible configurations, resolutions, sampling, discharging."""

from .coloring import Request, epsilon_bound, is_proper_coloring, make_lists, max_satisfaction
from .family import ForbiddenFamily, builtin_family
from .graph import Graph, RotationSystem, degeneracy, faces
from .reducibility import Configuration, check_reducible

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "ForbiddenFamily",
    "Graph",
    "Request",
    "RotationSystem",
    "builtin_family",
    "check_reducible",
    "degeneracy",
    "epsilon_bound",
    "faces",
    "is_proper_coloring",
    "make_lists",
    "max_satisfaction",
]
