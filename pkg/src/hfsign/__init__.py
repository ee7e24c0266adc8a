"""Sign assignments on formal flows and integral grid homology."""

from __future__ import annotations

from .diagram import GridDiagram, b_stabilize, load_diagram
from .formal import FormalBigon, FormalGenerator, FormalRectangle
from .homology import HomologyResult, smith_normal_form
from .signs import SignEvaluator, build_evaluator, solve_global, solve_profile1, verify

__all__ = [
    "FormalBigon", "FormalGenerator", "FormalRectangle", "GridDiagram", "HomologyResult",
    "SignEvaluator", "b_stabilize", "build_evaluator", "load_diagram",
    "smith_normal_form", "solve_global", "solve_profile1", "verify",
]
