"""Twisted odd Khovanov complexes of marked link diagrams."""

from .cube import TwistedComplex, build_complex
from .diagram import DiagramError, MarkedDiagram, load_diagram, parse_diagram
from .homology import HomologyResult, homology_q, homology_z
from .spantree import Evaluation, build_tree_complex

__version__ = "0.1.0"

__all__ = [
    "DiagramError",
    "Evaluation",
    "HomologyResult",
    "MarkedDiagram",
    "TwistedComplex",
    "build_complex",
    "build_tree_complex",
    "homology_q",
    "homology_z",
    "load_diagram",
    "parse_diagram",
]
