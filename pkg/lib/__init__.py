#!/usr/bin/env python3
"""
arr2kirby Component Library

Kirby diagrams of complexified real line arrangements: normalization and
chambers, divides with cusps, the lift to a PL link in the 3-sphere, planar
diagrams and their invariants, plus the pipeline, CLI and rendering that
tie them together.
"""

# Re-export observability components for convenience
from observability import get_metrics, initialize_metrics

from .arrangement import Arrangement, Line, enumerate_chambers, fiber_chambers, normalize_arrangement
from .cache import CacheEntry, ResultCache
from .diagram import Crossing, Diagram, project_link
from .divide import DivideWithCusps, GeometricCurve, StripCurve
from .errors import Arr2KirbyError, ErrorHandler
from .invariants import InvariantReport, invariant_report, kirby_homology
from .lift import PLLink, PLLoop, geometrize_and_lift
from .pipeline import KirbyPipeline
from .settings import Settings

__version__ = "0.1.0"
__all__ = [
    # Core components
    "Settings",
    "KirbyPipeline",
    "ResultCache",
    "CacheEntry",
    # Arrangements
    "Arrangement",
    "Line",
    "normalize_arrangement",
    "enumerate_chambers",
    "fiber_chambers",
    # Divides and links
    "DivideWithCusps",
    "GeometricCurve",
    "StripCurve",
    "PLLink",
    "PLLoop",
    "geometrize_and_lift",
    # Diagrams and invariants
    "Crossing",
    "Diagram",
    "project_link",
    "InvariantReport",
    "invariant_report",
    "kirby_homology",
    # Error handling
    "Arr2KirbyError",
    "ErrorHandler",
    # Metrics (re-exported from observability)
    "get_metrics",
    "initialize_metrics",
]
