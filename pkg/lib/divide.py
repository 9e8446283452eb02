#!/usr/bin/env python3
"""
Divides with Cusps

Data model and builders for divides with cusps: the dotted interval divides
cut out of the arrangement lines, the attaching strip curves built from the
sign vectors of the chambers disjoint from F, their reduced forms, exact
geometric realization and validation.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from .arrangement import Arrangement, FiberChamber, format_point, format_rational, parse_rational
from .errors import InvariantViolation, ValidationFailure

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, Fraction]

# sin^2 of one degree, below which a regular vertex counts as a reversal
REVERSAL_SIN2 = Fraction(1, 3283)


class Cap(Enum):
    """End of a strip curve."""

    CUSP = "cusp"
    ROUND = "round"


class Between(Enum):
    """Lower-strand feature drawn in the gap between two window lines."""

    CUSP_UP = "cuspUp"
    CUSP_DOWN = "cuspDown"
    STRAIGHT = "straight"
    ZIGZAG_UP_DOWN = "zigzagUpDown"
    ZIGZAG_DOWN_UP = "zigzagDownUp"

    @property
    def cusps(self) -> int:
        if self in (Between.CUSP_UP, Between.CUSP_DOWN):
            return 1
        if self is Between.STRAIGHT:
            return 0
        return 2


@dataclass(frozen=True)
class StripCurve:
    """
    Combinatorial attaching curve living in the strip of height h_prime.

    The window (m1, m2) lists the 1-based lines the curve crosses; betweens
    holds one feature per gap between consecutive window lines.
    """

    s: int
    h_prime: Fraction
    eps: Fraction
    window: Tuple[int, int]
    left_cap: Cap
    betweens: Tuple[Between, ...]
    right_cap: Cap
    delta: Tuple[int, ...]
    label: str = ""
    chamber_ref: Optional[FiberChamber] = field(default=None, compare=False)

    @property
    def cusp_count(self) -> int:
        return (
            (self.left_cap is Cap.CUSP)
            + (self.right_cap is Cap.CUSP)
            + sum(b.cusps for b in self.betweens)
        )

    @property
    def width(self) -> int:
        return self.window[1] - self.window[0] + 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s": self.s,
            "label": self.label,
            "hPrime": format_rational(self.h_prime),
            "eps": format_rational(self.eps),
            "window": list(self.window),
            "leftCap": self.left_cap.value,
            "betweens": [b.value for b in self.betweens],
            "rightCap": self.right_cap.value,
            "delta": list(self.delta),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StripCurve":
        return cls(
            s=data["s"],
            h_prime=parse_rational(data["hPrime"]),
            eps=parse_rational(data["eps"]),
            window=tuple(data["window"]),
            left_cap=Cap(data["leftCap"]),
            betweens=tuple(Between(b) for b in data["betweens"]),
            right_cap=Cap(data["rightCap"]),
            delta=tuple(data["delta"]),
            label=data.get("label", ""),
        )


@dataclass(frozen=True)
class GeometricCurve:
    """
    A PL curve with cusp-marked vertices.

    Closed curves list each vertex once (the last joins the first);
    interval curves start and end on the domain boundary.
    """

    kind: str
    vertices: Tuple[Point, ...]
    cusps: FrozenSet[int]
    role: str
    label: str
    index: Optional[int] = None
    strip: Optional[StripCurve] = None

    @property
    def closed(self) -> bool:
        return self.kind == "closed"

    def segments(self) -> List[Tuple[Point, Point]]:
        pts = list(self.vertices)
        pairs = list(zip(pts, pts[1:]))
        if self.closed:
            pairs.append((pts[-1], pts[0]))
        return pairs

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "kind": self.kind,
            "role": self.role,
            "label": self.label,
            "index": self.index,
            "vertices": [format_point(v) for v in self.vertices],
            "cusps": sorted(self.cusps),
        }
        if self.strip is not None:
            data["strip"] = self.strip.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GeometricCurve":
        return cls(
            kind=data["kind"],
            vertices=tuple(
                (parse_rational(x), parse_rational(y)) for x, y in data["vertices"]
            ),
            cusps=frozenset(data.get("cusps", [])),
            role=data["role"],
            label=data.get("label", ""),
            index=data.get("index"),
            strip=StripCurve.from_dict(data["strip"]) if data.get("strip") else None,
        )


@dataclass(frozen=True)
class Domain:
    """Either the rectangle [-R, R] x [-1, 1] or the closed unit disk."""

    kind: str
    R: Optional[Fraction] = None

    def inside(self, p: Point) -> bool:
        if self.kind == "rect":
            return abs(p[0]) < self.R and abs(p[1]) < 1
        return p[0] * p[0] + p[1] * p[1] < 1

    def on_boundary(self, p: Point) -> bool:
        if self.kind == "rect":
            return (abs(p[0]) == self.R and abs(p[1]) <= 1) or (
                abs(p[1]) == 1 and abs(p[0]) <= self.R
            )
        return p[0] * p[0] + p[1] * p[1] == 1

    def transversal(self, p: Point, d: Point) -> bool:
        """Whether direction d at boundary point p is transverse to the boundary."""
        if self.kind == "rect":
            if abs(p[0]) == self.R and abs(p[1]) == 1:
                return False
            return d[1] != 0 if abs(p[1]) == 1 else d[0] != 0
        return p[0] * d[0] + p[1] * d[1] != 0

    def to_dict(self) -> Dict[str, Any]:
        return {"rect": format_rational(self.R)} if self.kind == "rect" else "disk"

    @classmethod
    def from_dict(cls, data: Any) -> "Domain":
        if data == "disk":
            return cls("disk")
        return cls("rect", parse_rational(data["rect"]))


@dataclass(frozen=True)
class DivideWithCusps:
    domain: Domain
    curves: Tuple[GeometricCurve, ...]
    arrangement: Optional[Arrangement] = field(default=None, compare=False)

    def labels(self) -> List[str]:
        return [c.label for c in self.curves]

    def curve(self, label: str) -> GeometricCurve:
        for c in self.curves:
            if c.label == label:
                return c
        raise KeyError(label)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "domain": self.domain.to_dict(),
            "curves": [c.to_dict() for c in self.curves],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DivideWithCusps":
        return cls(
            domain=Domain.from_dict(data["domain"]),
            curves=tuple(GeometricCurve.from_dict(c) for c in data["curves"]),
        )


@dataclass
class ValidationReport:
    valid: bool
    violations: List[Dict[str, Any]]
    double_points: List[Dict[str, Any]]

    def pair_counts(self) -> Dict[Tuple[str, str], int]:
        """Number of double points between each unordered pair of curve labels."""
        counts: Dict[Tuple[str, str], int] = {}
        for dp in self.double_points:
            key = tuple(sorted(dp["curves"]))
            counts[key] = counts.get(key, 0) + 1
        return counts

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valid": self.valid,
            "violations": self.violations,
            "doublePoints": [
                {"point": format_point(dp["point"]), "curves": list(dp["curves"])}
                for dp in self.double_points
            ],
        }


# Builders


def dotted_divides(arr: Arrangement) -> List[GeometricCurve]:
    """The segments H_i meet [-R, R] x [-1, 1], one interval curve per line."""
    curves = []
    for i, line in enumerate(arr.lines, start=1):
        bottom = (line.x_at(Fraction(-1)), Fraction(-1))
        top = (line.x_at(Fraction(1)), Fraction(1))
        curves.append(
            GeometricCurve(
                kind="interval",
                vertices=(bottom, top),
                cusps=frozenset(),
                role="dotted",
                label=f"dotted:{i}",
                index=i,
            )
        )
    return curves


def strip_for_window(
    delta: Sequence[int],
    window: Tuple[int, int],
    s: int,
    h_prime: Fraction,
    eps: Fraction,
    chamber_ref: Optional[FiberChamber] = None,
) -> StripCurve:
    """Caps and betweens forced by the sign vector over a window."""
    m1, m2 = window
    betweens = []
    for i in range(m1, m2):
        pair = (delta[i - 1], delta[i])
        if pair == (1, -1):
            betweens.append(Between.CUSP_UP)
        elif pair == (-1, 1):
            betweens.append(Between.CUSP_DOWN)
        else:
            betweens.append(Between.STRAIGHT)
    return StripCurve(
        s=s,
        h_prime=h_prime,
        eps=eps,
        window=(m1, m2),
        left_cap=Cap.CUSP if delta[m1 - 1] == 1 else Cap.ROUND,
        betweens=tuple(betweens),
        right_cap=Cap.CUSP if delta[m2 - 1] == -1 else Cap.ROUND,
        delta=tuple(delta),
        label=f"attach:{s}",
        chamber_ref=chamber_ref,
    )


def gamma_curve(arr: Arrangement, fc: FiberChamber) -> StripCurve:
    """The full attaching curve over every line."""
    curve = strip_for_window(fc.delta, (1, arr.n), fc.s, fc.h_prime, fc.eps, fc)
    if curve.cusp_count % 2 != 1:
        raise InvariantViolation(f"Curve {fc.s} has an even number of cusps")
    return curve


def reduce_gamma(curve: StripCurve) -> StripCurve:
    """Shrink the window to (min{delta=-1}, max{delta=+1})."""
    minus = [i for i, d in enumerate(curve.delta, start=1) if d == -1]
    plus = [i for i, d in enumerate(curve.delta, start=1) if d == 1]
    if not minus or not plus or minus[0] > plus[-1]:
        raise InvariantViolation(
            f"Sign vector {curve.delta} is a staircase; its chamber meets F"
        )
    window = (minus[0], plus[-1])
    if window == curve.window:
        return curve
    return strip_for_window(
        curve.delta, window, curve.s, curve.h_prime, curve.eps, curve.chamber_ref
    )


class GapFrame:
    """
    Affine chart of the gap right of line `gap` at strip heights.

    u in [-1, 1] spans the gap; features stay in u in [-1/2, 1/2] so they
    never touch the bounding lines. Gaps 0 and n are virtual and one unit
    wide.
    """

    def __init__(self, arr: Arrangement, gap: int, y_lo: Fraction, y_hi: Fraction):
        lines = arr.lines
        if gap == 0:
            self.left: Callable[[Fraction], Fraction] = lambda y: lines[0].x_at(y) - 1
            self.width = Fraction(1)
        elif gap == arr.n:
            self.left = lines[-1].x_at
            self.width = Fraction(1)
        else:
            left_line, right_line = lines[gap - 1], lines[gap]
            self.left = left_line.x_at
            self.width = min(right_line.x_at(y) - left_line.x_at(y) for y in (y_lo, y_hi))
        if self.width <= 0:
            raise InvariantViolation(f"Gap {gap} is empty inside the strip")

    def __call__(self, u: Fraction, y: Fraction) -> Point:
        return (self.left(y) + (u + 1) / 2 * self.width, y)


def _left_cap(cap: Cap, frame: GapFrame, hp: Fraction, eps: Fraction) -> List[Tuple[Point, bool]]:
    """Left cap from the lower strand up to the upper strand."""
    y_l, y_u = hp - eps / 2, hp + eps / 2
    if cap is Cap.ROUND:
        rx, ry, k = Fraction(1, 4), eps / 2, Fraction(7, 10)
        uv = [(0, -ry), (-k * rx, -k * ry), (-rx, 0), (-k * rx, k * ry), (0, ry)]
        return [(frame(Fraction(u), hp + dy), False) for u, dy in uv]
    wc = Fraction(1, 8)
    sc = min(eps / 16, frame.width / 64)
    tip = Fraction(-1, 4)
    return [
        (frame(Fraction(0), y_l), False),
        (frame(tip + wc, hp - sc), False),
        (frame(tip, hp), True),
        (frame(tip + wc, hp + sc), False),
        (frame(Fraction(0), y_u), False),
    ]


def _right_cap(cap: Cap, frame: GapFrame, hp: Fraction, eps: Fraction) -> List[Tuple[Point, bool]]:
    """Right cap from the upper strand down to the lower strand."""
    y_l, y_u = hp - eps / 2, hp + eps / 2
    if cap is Cap.ROUND:
        rx, ry, k = Fraction(1, 4), eps / 2, Fraction(7, 10)
        uv = [(0, ry), (k * rx, k * ry), (rx, 0), (k * rx, -k * ry), (0, -ry)]
        return [(frame(Fraction(u), hp + dy), False) for u, dy in uv]
    wc = Fraction(1, 8)
    sc = min(eps / 16, frame.width / 64)
    tip = Fraction(1, 4)
    return [
        (frame(Fraction(0), y_u), False),
        (frame(tip - wc, hp + sc), False),
        (frame(tip, hp), True),
        (frame(tip - wc, hp - sc), False),
        (frame(Fraction(0), y_l), False),
    ]


def _feature(between: Between, frame: GapFrame, hp: Fraction, eps: Fraction) -> List[Tuple[Point, bool]]:
    """Lower-strand feature, listed in traversal order (right to left)."""
    y_l = hp - eps / 2
    half = Fraction(1, 2)
    if between is Between.STRAIGHT:
        return []
    if between in (Between.CUSP_UP, Between.CUSP_DOWN):
        r = 3 * eps / 4 if between is Between.CUSP_UP else -eps / 4
        w = min(abs(r) / (4 * frame.width), Fraction(1, 16))
        return [
            (frame(half, y_l), False),
            (frame(w, y_l + r / 2), False),
            (frame(Fraction(0), y_l + r), True),
            (frame(-w, y_l + r / 2), False),
            (frame(-half, y_l), False),
        ]
    z = eps / 8 if between is Between.ZIGZAG_UP_DOWN else -eps / 8
    return [
        (frame(half, y_l), False),
        (frame(Fraction(-1, 4), y_l + z), True),
        (frame(Fraction(1, 4), y_l - z), True),
        (frame(-half, y_l), False),
    ]


def realize_strip(arr: Arrangement, strip: StripCurve, role: str = "attaching") -> GeometricCurve:
    """
    Closed PL curve of a strip curve.

    Upper strand at h'+eps/2 runs left to right; the lower strand at
    h'-eps/2 carries the between-features and runs right to left.
    """
    m1, m2 = strip.window
    hp, eps = strip.h_prime, strip.eps
    y_lo, y_hi = hp - eps, hp + eps

    def frame(gap: int) -> GapFrame:
        return GapFrame(arr, gap, y_lo, y_hi)

    path = _left_cap(strip.left_cap, frame(m1 - 1), hp, eps)
    path += _right_cap(strip.right_cap, frame(m2), hp, eps)
    for gap in range(m2 - 1, m1 - 1, -1):
        path += _feature(strip.betweens[gap - m1], frame(gap), hp, eps)

    vertices = tuple(p for p, _ in path)
    cusps = frozenset(i for i, (_, is_cusp) in enumerate(path) if is_cusp)
    return GeometricCurve(
        kind="closed",
        vertices=vertices,
        cusps=cusps,
        role=role,
        label=strip.label or f"attach:{strip.s}",
        index=strip.s,
        strip=strip,
    )


def kirby_strips(arr: Arrangement, fibers: Sequence[FiberChamber], reduced: bool = True) -> List[StripCurve]:
    strips = [gamma_curve(arr, fc) for fc in fibers]
    if reduced:
        strips = [reduce_gamma(st) for st in strips]
    return strips


def assemble_kirby_divide(
    arr: Arrangement,
    strips: Sequence[StripCurve],
    companions: Sequence[StripCurve] = (),
    validate: bool = True,
) -> DivideWithCusps:
    """Dotted segments plus realized attaching curves (and pushoff companions)."""
    curves = dotted_divides(arr)
    curves += [realize_strip(arr, st) for st in strips]
    curves += [realize_strip(arr, st, role="companion") for st in companions]
    divide = DivideWithCusps(domain=Domain("rect", arr.R), curves=tuple(curves), arrangement=arr)

    if validate:
        report = validate_divide(divide)
        if not report.valid:
            raise ValidationFailure(report)
        _check_window_crossings(divide, report)
    logger.info(
        f"Assembled divide: {arr.n} dotted, {len(strips)} attaching, {len(companions)} companions"
    )
    return divide


def _check_window_crossings(divide: DivideWithCusps, report: ValidationReport):
    counts = report.pair_counts()
    for curve in divide.curves:
        if curve.strip is None:
            continue
        m1, m2 = curve.strip.window
        for dotted in (c for c in divide.curves if c.role == "dotted"):
            expected = 2 if m1 <= dotted.index <= m2 else 0
            found = counts.get(tuple(sorted((curve.label, dotted.label))), 0)
            if found != expected:
                raise InvariantViolation(
                    f"{curve.label} meets {dotted.label} {found} times, expected {expected}"
                )


# Validation


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def _dot(a: Point, b: Point) -> Fraction:
    return a[0] * b[0] + a[1] * b[1]


def _on_segment(p: Point, a: Point, b: Point) -> bool:
    return (
        _cross(a, b, p) == 0
        and min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def _check_vertices(ci: int, curve: GeometricCurve, domain: Domain, violations: List[Dict[str, Any]]):
    pts = curve.vertices
    m = len(pts)
    if m < (3 if curve.closed else 2):
        violations.append({"condition": "too_few_vertices", "curve": curve.label})
        return
    for a, b in curve.segments():
        if a == b:
            violations.append({"condition": "repeated_vertex", "curve": curve.label, "at": format_point(a)})
            return

    interior = range(m) if curve.closed else range(1, m - 1)
    for k in interior:
        d_in = _sub(pts[k], pts[k - 1])
        d_out = _sub(pts[(k + 1) % m], pts[k])
        dot = _dot(d_in, d_out)
        cross = d_in[0] * d_out[1] - d_in[1] * d_out[0]
        if k in curve.cusps:
            if dot >= 0:
                violations.append({"condition": "cusp_not_reversing", "curve": curve.label, "vertex": k})
        elif dot < 0 and cross * cross <= REVERSAL_SIN2 * _dot(d_in, d_in) * _dot(d_out, d_out):
            violations.append({"condition": "unmarked_reversal", "curve": curve.label, "vertex": k})

    if not curve.closed:
        if curve.cusps & {0, m - 1}:
            violations.append({"condition": "cusp_at_endpoint", "curve": curve.label})
        for k, nbr in ((0, 1), (m - 1, m - 2)):
            if not domain.on_boundary(pts[k]):
                violations.append({"condition": "endpoint_not_on_boundary", "curve": curve.label, "vertex": k})
            elif not domain.transversal(pts[k], _sub(pts[nbr], pts[k])):
                violations.append({"condition": "boundary_tangency", "curve": curve.label, "vertex": k})
    for k in interior:
        if not domain.inside(pts[k]):
            violations.append({"condition": "vertex_outside_interior", "curve": curve.label, "vertex": k})


def validate_divide(d: DivideWithCusps) -> ValidationReport:
    """
    Check the divide-with-cusps conditions exactly.

    Boundary contact only at interval endpoints (distinct, transversal);
    otherwise only transversal double points and cusps, with no cusp on a
    double point, no triple points and no tangencies.
    """
    violations: List[Dict[str, Any]] = []
    for ci, curve in enumerate(d.curves):
        _check_vertices(ci, curve, d.domain, violations)

    endpoints: Dict[Point, str] = {}
    for curve in d.curves:
        if not curve.closed:
            for p in (curve.vertices[0], curve.vertices[-1]):
                if p in endpoints:
                    violations.append({"condition": "shared_boundary_point", "curves": [endpoints[p], curve.label]})
                endpoints[p] = curve.label

    # (x_min, x_max, curve index, segment index, a, b)
    segments = []
    for ci, curve in enumerate(d.curves):
        for si, (a, b) in enumerate(curve.segments()):
            segments.append((min(a[0], b[0]), max(a[0], b[0]), ci, si, a, b))
    segments.sort(key=lambda s: (s[0], s[2], s[3]))

    crossings: List[Dict[str, Any]] = []
    contacts: Dict[Tuple[int, int, int, int], Point] = {}

    def adjacent(ci: int, si: int, cj: int, sj: int) -> bool:
        if ci != cj:
            return False
        curve = d.curves[ci]
        count = len(curve.vertices) if curve.closed else len(curve.vertices) - 1
        if abs(si - sj) == 1:
            return True
        return curve.closed and abs(si - sj) == count - 1

    for idx, (xmin, xmax, ci, si, a, b) in enumerate(segments):
        for other in segments[idx + 1:]:
            if other[0] > xmax:
                break
            _, _, cj, sj, c, e = other
            if max(min(a[1], b[1]), min(c[1], e[1])) > min(max(a[1], b[1]), max(c[1], e[1])):
                continue
            d1, d2 = _cross(c, e, a), _cross(c, e, b)
            d3, d4 = _cross(a, b, c), _cross(a, b, e)
            if d1 == d2 == d3 == d4 == 0:
                # collinear: overlap beyond a shared endpoint is fatal
                overlap = [p for p in (a, b) if _on_segment(p, c, e)] + [
                    p for p in (c, e) if _on_segment(p, a, b)
                ]
                if len(set(overlap)) > 1:
                    violations.append({
                        "condition": "overlapping_segments",
                        "curves": [d.curves[ci].label, d.curves[cj].label],
                        "at": format_point(overlap[0]),
                    })
                    continue
            if adjacent(ci, si, cj, sj):
                shared = {a, b} & {c, e}
                stray = [p for p in (a, b) if p not in shared and _on_segment(p, c, e)] + [
                    p for p in (c, e) if p not in shared and _on_segment(p, a, b)
                ]
                if stray:
                    violations.append({"condition": "folded_segments", "curve": d.curves[ci].label})
                continue
            if d1 * d2 < 0 and d3 * d4 < 0:
                t = d1 / (d1 - d2)
                point = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
                crossings.append({"point": point, "branches": ((ci, "s", si), (cj, "s", sj))})
                continue
            # touching at a vertex
            for p, owner, owner_seg, host, host_seg, (h0, h1) in (
                (a, ci, si, cj, sj, (c, e)),
                (b, ci, si, cj, sj, (c, e)),
                (c, cj, sj, ci, si, (a, b)),
                (e, cj, sj, ci, si, (a, b)),
            ):
                if _on_segment(p, h0, h1):
                    vertex = _vertex_index(d.curves[owner], owner_seg, p)
                    if vertex is not None:
                        contacts[(owner, vertex, host, host_seg)] = p

    # Resolve vertex contacts: one record per (vertex, host segment pair)
    seen_vertices = set()
    for (owner, vertex, host, host_seg), p in sorted(contacts.items(), key=lambda kv: kv[0]):
        curve = d.curves[owner]
        host_curve = d.curves[host]
        host_vertex = _vertex_index(host_curve, host_seg, p)
        key = (owner, vertex, host, host_vertex if host_vertex is not None else ("s", host_seg))
        if key in seen_vertices:
            continue
        seen_vertices.add(key)
        if host_vertex is not None:
            if (host, host_vertex, owner, vertex) not in seen_vertices:
                violations.append({
                    "condition": "vertex_on_vertex",
                    "curves": [curve.label, host_curve.label],
                    "at": format_point(p),
                })
            continue
        if vertex in curve.cusps:
            violations.append({"condition": "cusp_on_double_point", "curve": curve.label, "at": format_point(p)})
            continue
        if not curve.closed and vertex in (0, len(curve.vertices) - 1):
            violations.append({"condition": "endpoint_on_curve", "curve": curve.label, "at": format_point(p)})
            continue
        n_v = len(curve.vertices)
        prev_p = curve.vertices[vertex - 1]
        next_p = curve.vertices[(vertex + 1) % n_v]
        h0, h1 = host_curve.segments()[host_seg]
        side_prev, side_next = _cross(h0, h1, prev_p), _cross(h0, h1, next_p)
        if side_prev * side_next < 0:
            crossings.append({"point": p, "branches": ((owner, "v", vertex), (host, "s", host_seg))})
        else:
            violations.append({
                "condition": "tangency",
                "curves": [curve.label, host_curve.label],
                "at": format_point(p),
            })

    by_point: Dict[Point, set] = {}
    for crossing in crossings:
        by_point.setdefault(crossing["point"], set()).update(crossing["branches"])
    for point, branches in by_point.items():
        if len(branches) > 2:
            violations.append({"condition": "triple_point", "at": format_point(point)})

    double_points = [
        {"point": c["point"], "curves": (d.curves[c["branches"][0][0]].label, d.curves[c["branches"][1][0]].label)}
        for c in crossings
    ]
    double_points.sort(key=lambda dp: (dp["point"][1], dp["point"][0]))
    return ValidationReport(valid=not violations, violations=violations, double_points=double_points)


def _vertex_index(curve: GeometricCurve, seg: int, p: Point) -> Optional[int]:
    a, b = curve.segments()[seg]
    if p == a:
        return seg
    if p == b:
        return (seg + 1) % len(curve.vertices)
    return None


# Calibration curves


def _rational_parameters(samples: int) -> List[Optional[Fraction]]:
    """tan(t/2) for t = 2*pi*k/samples as rationals; None stands for t = pi."""
    params = []
    for k in range(samples):
        if 2 * k == samples:
            params.append(None)
        else:
            params.append(Fraction(math.tan(math.pi * k / samples)).limit_denominator(1000))
    return params


def calibration_curves(samples: int = 64) -> Dict[str, GeometricCurve]:
    """
    The three calibration curves in the unit disk.

    A smooth circle, a teardrop with one outward cusp and a cardioid with
    one inward cusp. Points come from the rational parametrization of the
    circle, so every vertex is exact.
    """
    half = Fraction(1, 2)
    circle, teardrop, cardioid = [], [], []
    for u in _rational_parameters(samples):
        if u is None:
            circle.append((-half, Fraction(0)))
            teardrop.append((-half, Fraction(0)))
            cardioid.append((Fraction(-7, 20), Fraction(0)))
            continue
        q = 1 + u * u
        cos, sin = (1 - u * u) / q, 2 * u / q
        circle.append((half * cos, half * sin))
        teardrop.append((half * cos, u ** 3 / (q * q)))
        r = Fraction(3, 10) * (1 - cos)
        cardioid.append((r * cos + Fraction(1, 4), r * sin))

    def build(name: str, label: str, pts: List[Point], cusps: FrozenSet[int]) -> GeometricCurve:
        return GeometricCurve(kind="closed", vertices=tuple(pts), cusps=cusps, role="plain", label=label)

    return {
        "circle": build("circle", "plain:circle", circle, frozenset()),
        "outward_cusp": build("outward_cusp", "plain:outward_cusp", teardrop, frozenset({0})),
        "inward_cusp": build("inward_cusp", "plain:inward_cusp", cardioid, frozenset({0})),
    }


def calibration_divide(name: str, samples: int = 64) -> DivideWithCusps:
    return DivideWithCusps(domain=Domain("disk"), curves=(calibration_curves(samples)[name],))


def predict_component_count(curve: GeometricCurve) -> int:
    """Components of the lifted link: intervals and odd-cusp curves give one."""
    if not curve.closed:
        return 1
    return 2 if len(curve.cusps) % 2 == 0 else 1
