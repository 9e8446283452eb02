#!/usr/bin/env python3
"""
Local Moves on Strip Divides

The three local rewrites of a divide with cusps that preserve the isotopy
type of its link, acting on the combinatorics of strip-built attaching
curves:

- cuspBigon: a cap cusp passes through the neighbouring dotted segment,
  removing (forward) or creating (backward) two double points.
- cuspSlide: a cap cusp passes through the neighbouring dotted segment and
  cancels against the upward cusp beyond it, leaving a round cap (forward),
  or the pair is recreated from a round cap (backward).
- cuspCancel: a zigzag of two opposite cusps on the lower strand becomes a
  straight piece (forward), or is inserted into one (backward).
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Union

from .divide import (
    Between,
    Cap,
    DivideWithCusps,
    StripCurve,
    realize_strip,
    validate_divide,
)
from .errors import PatternMismatch, ValidationFailure

logger = logging.getLogger(__name__)

MOVE_IDS = ("cuspBigon", "cuspSlide", "cuspCancel")
ZIGZAGS = {"up_down": Between.ZIGZAG_UP_DOWN, "down_up": Between.ZIGZAG_DOWN_UP}


@dataclass(frozen=True)
class MoveSpec:
    """
    Where and how to apply a move.

    site is "left" or "right" for the cap moves, or the 1-based index of
    the line left of the gap for cuspCancel. variant picks the zigzag
    orientation when one is inserted.
    """

    move_id: str
    curve: str
    site: Union[str, int]
    direction: str = "forward"
    variant: str = "up_down"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "moveId": self.move_id,
            "curve": self.curve,
            "site": self.site,
            "direction": self.direction,
            "variant": self.variant,
        }


def _mismatch(spec: MoveSpec, reason: str) -> PatternMismatch:
    return PatternMismatch(
        f"{spec.move_id} {spec.direction} at {spec.site} on {spec.curve}: {reason}",
        details=spec.to_dict(),
    )


def _cusp_bigon(strip: StripCurve, spec: MoveSpec, n: int) -> StripCurve:
    m1, m2 = strip.window
    if spec.site == "left":
        if strip.left_cap is not Cap.CUSP:
            raise _mismatch(spec, "left cap is not a cusp")
        if spec.direction == "forward":
            if not strip.betweens or strip.betweens[0] is not Between.STRAIGHT:
                raise _mismatch(spec, "no straight gap right of the cap")
            return replace(strip, window=(m1 + 1, m2), betweens=strip.betweens[1:])
        if m1 <= 1:
            raise _mismatch(spec, "no dotted segment left of the cap")
        return replace(strip, window=(m1 - 1, m2), betweens=(Between.STRAIGHT,) + strip.betweens)

    if strip.right_cap is not Cap.CUSP:
        raise _mismatch(spec, "right cap is not a cusp")
    if spec.direction == "forward":
        if not strip.betweens or strip.betweens[-1] is not Between.STRAIGHT:
            raise _mismatch(spec, "no straight gap left of the cap")
        return replace(strip, window=(m1, m2 - 1), betweens=strip.betweens[:-1])
    if m2 >= n:
        raise _mismatch(spec, "no dotted segment right of the cap")
    return replace(strip, window=(m1, m2 + 1), betweens=strip.betweens + (Between.STRAIGHT,))


def _cusp_slide(strip: StripCurve, spec: MoveSpec, n: int) -> StripCurve:
    m1, m2 = strip.window
    if spec.site == "left":
        if spec.direction == "forward":
            if strip.left_cap is not Cap.CUSP or not strip.betweens or strip.betweens[0] is not Between.CUSP_UP:
                raise _mismatch(spec, "needs a cusp cap next to an upward cusp")
            return replace(strip, window=(m1 + 1, m2), left_cap=Cap.ROUND, betweens=strip.betweens[1:])
        if strip.left_cap is not Cap.ROUND or m1 <= 1:
            raise _mismatch(spec, "needs a round cap with a dotted segment on its left")
        return replace(
            strip, window=(m1 - 1, m2), left_cap=Cap.CUSP, betweens=(Between.CUSP_UP,) + strip.betweens
        )

    if spec.direction == "forward":
        if strip.right_cap is not Cap.CUSP or not strip.betweens or strip.betweens[-1] is not Between.CUSP_UP:
            raise _mismatch(spec, "needs a cusp cap next to an upward cusp")
        return replace(strip, window=(m1, m2 - 1), right_cap=Cap.ROUND, betweens=strip.betweens[:-1])
    if strip.right_cap is not Cap.ROUND or m2 >= n:
        raise _mismatch(spec, "needs a round cap with a dotted segment on its right")
    return replace(
        strip, window=(m1, m2 + 1), right_cap=Cap.CUSP, betweens=strip.betweens + (Between.CUSP_UP,)
    )


def _cusp_cancel(strip: StripCurve, spec: MoveSpec) -> StripCurve:
    m1, m2 = strip.window
    if not isinstance(spec.site, int) or not (m1 <= spec.site < m2):
        raise _mismatch(spec, f"gap must lie in [{m1}, {m2})")
    j = spec.site - m1
    current = strip.betweens[j]
    if spec.direction == "forward":
        if current not in ZIGZAGS.values():
            raise _mismatch(spec, "no zigzag in the gap")
        new = Between.STRAIGHT
    else:
        if current is not Between.STRAIGHT:
            raise _mismatch(spec, "gap is not straight")
        if spec.variant not in ZIGZAGS:
            raise _mismatch(spec, f"unknown zigzag variant {spec.variant}")
        new = ZIGZAGS[spec.variant]
    betweens = strip.betweens[:j] + (new,) + strip.betweens[j + 1:]
    return replace(strip, betweens=betweens)


def rewrite_strip(strip: StripCurve, spec: MoveSpec, n: int) -> StripCurve:
    """Apply a move to the combinatorics of one strip curve."""
    if spec.move_id not in MOVE_IDS:
        raise _mismatch(spec, "unknown move")
    if spec.direction not in ("forward", "backward"):
        raise _mismatch(spec, "direction must be forward or backward")
    if spec.move_id == "cuspCancel":
        return _cusp_cancel(strip, spec)
    if spec.site not in ("left", "right"):
        raise _mismatch(spec, "site must be left or right")
    if spec.move_id == "cuspBigon":
        return _cusp_bigon(strip, spec, n)
    return _cusp_slide(strip, spec, n)


def apply_move(d: DivideWithCusps, spec: MoveSpec, validate: bool = True) -> DivideWithCusps:
    """Locally rewrite one attaching curve of a divide."""
    try:
        index = d.labels().index(spec.curve)
    except ValueError:
        raise _mismatch(spec, "no such curve")
    curve = d.curves[index]
    if curve.strip is None or d.arrangement is None:
        raise _mismatch(spec, "curve is not a strip curve")

    strip = rewrite_strip(curve.strip, spec, d.arrangement.n)
    new_curve = realize_strip(d.arrangement, strip, role=curve.role)
    curves = d.curves[:index] + (new_curve,) + d.curves[index + 1:]
    moved = replace(d, curves=curves)

    if validate:
        report = validate_divide(moved)
        if not report.valid:
            raise ValidationFailure(report)
    logger.debug(f"Applied {spec.move_id} {spec.direction} at {spec.site} on {spec.curve}")
    return moved


def reduction_moves(strip: StripCurve, target: StripCurve, n: int) -> List[MoveSpec]:
    """Moves taking a strip curve to the target window (cuspBigon then cuspSlide)."""
    moves: List[MoveSpec] = []
    current = strip
    label = strip.label
    while current.window != target.window:
        m1, m2 = current.window
        spec: Optional[MoveSpec] = None
        if m1 < target.window[0]:
            move_id = "cuspBigon" if current.betweens[0] is Between.STRAIGHT else "cuspSlide"
            spec = MoveSpec(move_id, label, "left")
        elif m2 > target.window[1]:
            move_id = "cuspBigon" if current.betweens[-1] is Between.STRAIGHT else "cuspSlide"
            spec = MoveSpec(move_id, label, "right")
        else:
            raise PatternMismatch(f"Target window {target.window} is not inside {current.window}")
        current = rewrite_strip(current, spec, n)
        moves.append(spec)
    if current != target:
        raise PatternMismatch(f"Moves on {label} did not reach the reduced curve")
    return moves


def reduce_by_moves(d: DivideWithCusps, targets: Dict[str, StripCurve]) -> DivideWithCusps:
    """Rewrite each named curve into its target by a sequence of moves."""
    for label, target in targets.items():
        strip = d.curve(label).strip
        for spec in reduction_moves(strip, target, d.arrangement.n):
            d = apply_move(d, spec, validate=False)
    report = validate_divide(d)
    if not report.valid:
        raise ValidationFailure(report)
    return d
