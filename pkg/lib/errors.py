#!/usr/bin/env python3
"""
Error Handling and Exception Classes

Domain exceptions raised by the arrangement-to-Kirby pipeline, plus a
categorizing handler that turns them into the standard error payload used
by the command line and the server tools.
"""

import logging
from typing import Any, Dict, Optional, Tuple

logger = logging.getLogger(__name__)


class Arr2KirbyError(Exception):
    """Base exception for every failure raised by the pipeline."""

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.error_code = error_code or self.__class__.__name__
        self.details = details or {}


# Input errors
class ArrangementError(Arr2KirbyError):
    """Exception raised when an arrangement document is rejected."""


class MalformedRational(ArrangementError):
    """Exception raised for a coefficient that is not a rational literal."""

    def __init__(self, value: Any, position: Optional[Tuple[int, int]] = None):
        super().__init__(
            f"Malformed rational {value!r}" + (f" at {position}" if position else ""),
            details={"value": str(value), "position": position},
        )
        self.value = value
        self.position = position


class DegenerateLine(ArrangementError):
    """Exception raised when a line has (a, b) = (0, 0)."""

    def __init__(self, index: int):
        super().__init__(
            f"Line {index} has a = b = 0", details={"index": index}
        )
        self.index = index


class DuplicateLine(ArrangementError):
    """Exception raised when two lines define the same projective triple."""

    def __init__(self, first: int, second: int):
        super().__init__(
            f"DuplicateLine({first},{second})",
            details={"indices": [first, second]},
        )
        self.indices = (first, second)


class EmptyArrangement(ArrangementError):
    """Exception raised for an arrangement without lines."""

    def __init__(self):
        super().__init__("Arrangement has no lines")


# Construction and verification errors
class InvariantViolation(Arr2KirbyError):
    """Exception raised when an internal structural invariant fails."""


class ValidationFailure(Arr2KirbyError):
    """Exception raised when a divide with cusps fails validation."""

    def __init__(self, report: Any):
        violations = getattr(report, "violations", [])
        first = violations[0] if violations else {}
        super().__init__(
            f"Divide validation failed: {first.get('condition', 'unknown')}"
            f" ({len(violations)} violation(s))",
            details={"violations": violations[:20]},
        )
        self.report = report


class PatternMismatch(Arr2KirbyError):
    """Exception raised when a move does not match the local pattern."""


class DomainViolation(Arr2KirbyError):
    """Exception raised when a point lies outside the retraction domain."""


class HeightOutOfRange(Arr2KirbyError):
    """Exception raised for FS parameters outside the sphere model."""


class ResolutionTooCoarse(Arr2KirbyError):
    """Exception raised when the lifted link fails the embeddedness certificate."""


class OverlapDetected(Arr2KirbyError):
    """Exception raised when a pushoff would meet its source or a neighbour."""


class NoGenericProjection(Arr2KirbyError):
    """Exception raised after every projection candidate was degenerate."""

    def __init__(self, diagnostics: list):
        super().__init__(
            f"No generic projection among {len(diagnostics)} candidates",
            details={"diagnostics": diagnostics[:50]},
        )
        self.diagnostics = diagnostics


class MissingCompanion(Arr2KirbyError):
    """Exception raised when a framing is requested without a pushoff."""


class TooManyCrossings(Arr2KirbyError):
    """Exception raised when a diagram exceeds the bracket crossing cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(
            f"Diagram has {count} crossings, bracket cap is {cap}",
            details={"crossings": count, "cap": cap},
        )
        self.count = count
        self.cap = cap


class ErrorHandler:
    """Categorizes pipeline errors and builds standard error responses."""

    # exception class -> (type string, exit status)
    CATEGORIES = [
        (ArrangementError, "input_error", 2),
        (ValidationFailure, "validation_error", 1),
        (PatternMismatch, "pattern_mismatch", 1),
        (DomainViolation, "domain_error", 1),
        (HeightOutOfRange, "domain_error", 1),
        (ResolutionTooCoarse, "geometry_error", 1),
        (OverlapDetected, "geometry_error", 1),
        (NoGenericProjection, "projection_error", 1),
        (MissingCompanion, "diagram_error", 1),
        (TooManyCrossings, "capacity_error", 1),
        (InvariantViolation, "invariant_violation", 1),
        (Arr2KirbyError, "pipeline_error", 1),
    ]

    def __init__(self, metrics: Any = None):
        self.metrics = metrics

    def categorize_error(self, error: Exception, operation: str) -> Dict[str, Any]:
        """Categorize error and extract relevant information."""
        error_type = "unknown_error"
        exit_status = 1

        for error_class, category, status in self.CATEGORIES:
            if isinstance(error, error_class):
                error_type = category
                exit_status = status
                break
        else:
            if isinstance(error, (ValueError, KeyError, TypeError)):
                # Bad JSON documents and bad flag values
                error_type = "input_error"
                exit_status = 2
            elif isinstance(error, OSError):
                error_type = "io_error"
                exit_status = 2

        return {
            "type": error_type,
            "message": str(error),
            "exit_status": exit_status,
            "operation": operation,
        }

    def exit_status(self, error: Exception) -> int:
        """Process exit status for an error."""
        return self.categorize_error(error, "")["exit_status"]

    def create_error_response(
        self, error: Exception, operation: str
    ) -> Dict[str, Any]:
        """Create standardized error response."""
        error_info = self.categorize_error(error, operation)

        # Record error metrics if available
        if hasattr(self.metrics, "record_error"):
            self.metrics.record_error(error_info["type"], operation)

        logger.debug(f"{operation} failed with {error_info['type']}: {error}")

        return {
            "error": True,
            "type": error_info["type"],
            "message": error_info["message"][:500],  # Truncate long messages
            "operation": operation,
            "error_code": getattr(error, "error_code", type(error).__name__),
            "details": getattr(error, "details", {}),
        }
