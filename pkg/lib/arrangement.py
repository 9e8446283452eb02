#!/usr/bin/env python3
"""
Real Line Arrangements

Exact rational geometry of real line arrangements: parsing, normalization to
the standard position used by the Kirby construction, intersection points,
chamber enumeration and the chambers disjoint from the frame line
F = {x2 = 0} together with their strip data.

All arithmetic is done with fractions.Fraction; nothing here touches floats.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, count
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import (
    DegenerateLine,
    DuplicateLine,
    EmptyArrangement,
    InvariantViolation,
    MalformedRational,
)

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, Fraction]

RATIONAL_PATTERN = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(value: Any, position: Optional[Tuple[int, int]] = None) -> Fraction:
    """Parse an integer or "p/q" literal into a reduced Fraction."""
    if isinstance(value, bool):
        raise MalformedRational(value, position)
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str) or not RATIONAL_PATTERN.match(value.strip()):
        raise MalformedRational(value, position)
    try:
        return Fraction(value.strip())
    except ZeroDivisionError:
        raise MalformedRational(value, position)


def format_rational(value: Fraction) -> str:
    """Canonical string form, "p/q" or "p"."""
    return str(Fraction(value))


def format_point(point: Sequence[Fraction]) -> List[str]:
    return [format_rational(v) for v in point]


@dataclass(frozen=True)
class Line:
    """The line a*x1 + b*x2 + c = 0."""

    a: Fraction
    b: Fraction
    c: Fraction
    source: Optional[int] = field(default=None, compare=False)

    def value(self, x1: Fraction, x2: Fraction) -> Fraction:
        """The defining form alpha(x1, x2)."""
        return self.a * x1 + self.b * x2 + self.c

    def sign(self, point: Sequence[Fraction]) -> int:
        v = self.value(point[0], point[1])
        return (v > 0) - (v < 0)

    def x_at(self, x2: Fraction) -> Fraction:
        """Abscissa of the line at height x2 (requires a != 0)."""
        return -(self.b * x2 + self.c) / self.a

    def projective_key(self) -> Tuple[Fraction, Fraction, Fraction]:
        """Triple scaled so the first nonzero of (a, b) is 1."""
        pivot = self.a if self.a != 0 else self.b
        return (self.a / pivot, self.b / pivot, self.c / pivot)

    def to_list(self) -> List[str]:
        return [format_rational(self.a), format_rational(self.b), format_rational(self.c)]


@dataclass(frozen=True)
class AffineTransform:
    """Point map x -> M x + t on the real plane."""

    matrix: Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]] = (
        (Fraction(1), Fraction(0)),
        (Fraction(0), Fraction(1)),
    )
    translation: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))

    def apply_point(self, point: Sequence[Fraction]) -> Point:
        (m11, m12), (m21, m22) = self.matrix
        return (
            m11 * point[0] + m12 * point[1] + self.translation[0],
            m21 * point[0] + m22 * point[1] + self.translation[1],
        )

    def apply_line(self, line: Line) -> Line:
        """Image of a line: n' = M^{-T} n, c' = c - n'.t."""
        (m11, m12), (m21, m22) = self.matrix
        det = m11 * m22 - m12 * m21
        # rows of M^{-T}
        a = (m22 * line.a - m21 * line.b) / det
        b = (-m12 * line.a + m11 * line.b) / det
        c = line.c - a * self.translation[0] - b * self.translation[1]
        return Line(a, b, c, source=line.source)

    def then(self, other: "AffineTransform") -> "AffineTransform":
        """The composite map: apply self first, then other."""
        (a11, a12), (a21, a22) = other.matrix
        (b11, b12), (b21, b22) = self.matrix
        matrix = (
            (a11 * b11 + a12 * b21, a11 * b12 + a12 * b22),
            (a21 * b11 + a22 * b21, a21 * b12 + a22 * b22),
        )
        translation = other.apply_point(self.translation)
        return AffineTransform(matrix, translation)

    def is_identity(self) -> bool:
        return self == AffineTransform()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "matrix": [format_point(row) for row in self.matrix],
            "translation": format_point(self.translation),
        }

    @classmethod
    def rotation(cls, t: Fraction) -> "AffineTransform":
        """Rotation with tan(theta/2) = t, exact over the rationals."""
        cos = (1 - t * t) / (1 + t * t)
        sin = 2 * t / (1 + t * t)
        return cls(((cos, -sin), (sin, cos)))


@dataclass(frozen=True)
class Arrangement:
    """A normalized arrangement with its frame constants."""

    lines: Tuple[Line, ...]
    a_f: Tuple[Fraction, ...]
    R0: Fraction
    R: Fraction
    transform: AffineTransform
    order: Tuple[int, ...]
    name: Optional[str] = None

    @property
    def n(self) -> int:
        return len(self.lines)

    def sign_vector(self, point: Sequence[Fraction]) -> Tuple[int, ...]:
        return tuple(line.sign(point) for line in self.lines)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "lines": [line.to_list() for line in self.lines],
            "aF": [format_rational(a) for a in self.a_f],
            "R0": format_rational(self.R0),
            "R": format_rational(self.R),
            "transform": self.transform.to_dict(),
            "order": list(self.order),
        }


@dataclass(frozen=True)
class IntersectionPoint:
    point: Point
    multiplicity: int
    lines: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": format_point(self.point),
            "multiplicity": self.multiplicity,
            "lines": list(self.lines),
        }


@dataclass(frozen=True)
class Chamber:
    """A connected component of the complement of the lines."""

    sign_vector: Tuple[int, ...]
    witness: Point
    meets_f: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "signVector": list(self.sign_vector),
            "witness": format_point(self.witness),
            "meetsF": self.meets_f,
        }


@dataclass(frozen=True)
class FiberChamber:
    """A chamber disjoint from F with its base point and strip."""

    chamber: Chamber
    s: int
    point: Point
    rho: Fraction
    h_prime: Fraction
    eps: Fraction
    delta: Tuple[int, ...]
    a1: Point
    a2: Point

    def to_dict(self) -> Dict[str, Any]:
        return {
            "s": self.s,
            "signVector": list(self.delta),
            "P": format_point(self.point),
            "rho": format_rational(self.rho),
            "hPrime": format_rational(self.h_prime),
            "eps": format_rational(self.eps),
            "a1": format_point(self.a1),
            "a2": format_point(self.a2),
        }


def parse_arrangement(document: Union[str, bytes, Dict[str, Any]]) -> List[Line]:
    """Parse an arrangement document {"name"?, "lines": [[a, b, c], ...]}."""
    if isinstance(document, (str, bytes)):
        document = json.loads(document)
    if not isinstance(document, dict) or not isinstance(document.get("lines"), list):
        raise ValueError('Arrangement document needs a "lines" list')

    lines: List[Line] = []
    seen: Dict[Tuple[Fraction, Fraction, Fraction], int] = {}
    for index, triple in enumerate(document["lines"]):
        if not isinstance(triple, list) or len(triple) != 3:
            raise MalformedRational(triple, (index, 0))
        a, b, c = (parse_rational(v, (index, j)) for j, v in enumerate(triple))
        if a == 0 and b == 0:
            raise DegenerateLine(index)
        line = Line(a, b, c, source=index)
        key = line.projective_key()
        if key in seen:
            raise DuplicateLine(seen[key], index)
        seen[key] = index
        lines.append(line)

    if not lines:
        raise EmptyArrangement()
    return lines


def intersect(first: Line, second: Line) -> Optional[Point]:
    """Intersection point of two lines, None when parallel."""
    det = first.a * second.b - second.a * first.b
    if det == 0:
        return None
    x1 = (-first.c * second.b + second.c * first.b) / det
    x2 = (-first.a * second.c + second.a * first.c) / det
    return (x1, x2)


def _intersection_points(lines: Sequence[Line]) -> List[Point]:
    points = []
    for first, second in combinations(lines, 2):
        p = intersect(first, second)
        if p is not None:
            points.append(p)
    return points


def _rotation_candidates() -> Iterator[Fraction]:
    yield Fraction(0)
    for k in count(7):
        yield Fraction(1, k)
        yield Fraction(-1, k)


def normalize_arrangement(raw: Sequence[Line], name: Optional[str] = None) -> Arrangement:
    """
    Bring an arrangement to standard position.

    The composite transform is a rational rotation making no line
    horizontal, an x2-translation putting every intersection above x2 = 1,
    and an x1-shrink forcing |a| >= |b|. Lines are then scaled to a = 1
    and re-indexed by their abscissae on F.
    """
    if not raw:
        raise EmptyArrangement()

    transform = AffineTransform()
    for t in _rotation_candidates():
        candidate = AffineTransform.rotation(t)
        if all(candidate.apply_line(line).a != 0 for line in raw):
            transform = candidate
            break
    lines = [transform.apply_line(line) for line in raw]

    points = _intersection_points(lines)
    if points:
        lowest = min(p[1] for p in points)
        if lowest <= 1:
            shift = AffineTransform(translation=(Fraction(0), 2 - lowest))
            transform = transform.then(shift)
            lines = [shift.apply_line(line) for line in lines]

    ratios = [abs(line.a) / abs(line.b) for line in lines if line.b != 0]
    shrink_factor = min([Fraction(1)] + ratios)
    if shrink_factor != 1:
        shrink = AffineTransform(((shrink_factor, Fraction(0)), (Fraction(0), Fraction(1))))
        transform = transform.then(shrink)
        lines = [shrink.apply_line(line) for line in lines]

    lines = [Line(Fraction(1), line.b / line.a, line.c / line.a, source=line.source) for line in lines]
    lines.sort(key=lambda line: -line.c)

    points = _intersection_points(lines)
    R0 = max(p[1] for p in points) + 1 if points else Fraction(2)
    R_min = max(
        max(abs(line.x_at(R0)) + R0, abs(line.x_at(Fraction(1))), abs(line.x_at(Fraction(-1))))
        for line in lines
    )
    R = 2 * (R_min + 1)

    arr = Arrangement(
        lines=tuple(lines),
        a_f=tuple(-line.c for line in lines),
        R0=R0,
        R=R,
        transform=transform,
        order=tuple(line.source if line.source is not None else i for i, line in enumerate(lines)),
        name=name,
    )
    _check_normalized(arr)
    logger.info(f"Normalized {arr.n} lines: R0={R0}, R={R}, identity={transform.is_identity()}")
    return arr


def _check_normalized(arr: Arrangement):
    issues = []
    for p in _intersection_points(arr.lines):
        if not (1 < p[1] < arr.R0):
            issues.append(f"intersection {format_point(p)} outside (1, R0)")
    if any(x >= y for x, y in zip(arr.a_f, arr.a_f[1:])):
        issues.append("abscissae on F are not strictly increasing")
    for line in arr.lines:
        if line.a <= 0 or abs(line.a) < abs(line.b):
            issues.append(f"line {line.to_list()} is not steep")
        if abs(line.x_at(arr.R0)) >= arr.R - arr.R0:
            issues.append(f"line {line.to_list()} leaves the frame at x2=R0")
    if issues:
        raise InvariantViolation(f"Normalization failed: {'; '.join(issues)}")


def intersection_summary(arr: Arrangement) -> List[IntersectionPoint]:
    """Each coincidence point once, with its multiplicity and incident lines."""
    incidences: Dict[Point, set] = {}
    for (i, first), (j, second) in combinations(enumerate(arr.lines), 2):
        p = intersect(first, second)
        if p is not None:
            incidences.setdefault(p, set()).update((i, j))
    return [
        IntersectionPoint(point=p, multiplicity=len(idx), lines=tuple(sorted(idx)))
        for p, idx in sorted(incidences.items(), key=lambda item: (item[0][1], item[0][0]))
    ]


def is_staircase(sign_vector: Sequence[int]) -> bool:
    """True for (+1, ..., +1, -1, ..., -1), the chambers met by F."""
    return all(not (x == -1 and y == 1) for x, y in zip(sign_vector, sign_vector[1:]))


def _vertex_heights(arr: Arrangement) -> List[Fraction]:
    return sorted({p.point[1] for p in intersection_summary(arr)})


def _sample_heights(arr: Arrangement) -> List[Fraction]:
    heights = _vertex_heights(arr)
    if not heights:
        return [Fraction(3, 2)]
    samples = [(1 + heights[0]) / 2]
    samples += [(lo + hi) / 2 for lo, hi in zip(heights, heights[1:])]
    samples.append((heights[-1] + arr.R0) / 2)
    return samples


def _witnesses_at(arr: Arrangement, height: Fraction) -> List[Fraction]:
    xs = sorted(line.x_at(height) for line in arr.lines)
    return [xs[0] - 1] + [(lo + hi) / 2 for lo, hi in zip(xs, xs[1:])] + [xs[-1] + 1]


def enumerate_chambers(arr: Arrangement) -> List[Chamber]:
    """
    One chamber per connected component of the complement.

    Lines are graphs over x2, so the plane is cut into horizontal slabs at
    the vertex heights; one sample height per slab and one witness between
    each pair of consecutive lines reach every chamber.
    """
    chambers: Dict[Tuple[int, ...], Chamber] = {}
    for height in _sample_heights(arr):
        for x1 in _witnesses_at(arr, height):
            sv = arr.sign_vector((x1, height))
            if sv not in chambers:
                chambers[sv] = Chamber(sign_vector=sv, witness=(x1, height), meets_f=is_staircase(sv))

    expected = 1 + arr.n + sum(p.multiplicity - 1 for p in intersection_summary(arr))
    if len(chambers) != expected:
        raise InvariantViolation(f"Found {len(chambers)} chambers, expected {expected}")
    logger.debug(f"Enumerated {len(chambers)} chambers")
    return list(chambers.values())


def _neighbour_midpoint(arr: Arrangement, base: Point, height: Fraction) -> Fraction:
    """Abscissa between the lines bounding the witness, taken at a new height."""
    left = [line for line in arr.lines if line.x_at(base[1]) < base[0]]
    right = [line for line in arr.lines if line.x_at(base[1]) > base[0]]
    if not left:
        return min(line.x_at(height) for line in right) - 1
    if not right:
        return max(line.x_at(height) for line in left) + 1
    left_x = max(line.x_at(height) for line in left)
    right_x = min(line.x_at(height) for line in right)
    return (left_x + right_x) / 2


def fiber_chambers(arr: Arrangement, chambers: Optional[List[Chamber]] = None) -> List[FiberChamber]:
    """Chambers disjoint from F, ordered by height, with base points and strips."""
    if chambers is None:
        chambers = enumerate_chambers(arr)
    candidates = sorted(
        (c for c in chambers if not c.meets_f), key=lambda c: (c.witness[1], c.witness[0])
    )
    b = len(candidates)
    if b == 0:
        return []

    boundaries = [Fraction(1)] + _vertex_heights(arr) + [arr.R0]
    slab = min(hi - lo for lo, hi in zip(boundaries, boundaries[1:]))
    eta = slab / (4 * (b + 1))
    eps = Fraction(1, 4 * (b + 1))

    result = []
    for s, chamber in enumerate(candidates, start=1):
        h = chamber.witness[1] + (s - 1) * eta
        k = _neighbour_midpoint(arr, chamber.witness, h)
        if arr.sign_vector((k, h)) != chamber.sign_vector:
            raise InvariantViolation(f"Base point of chamber {s} left its chamber")
        rho = (h - 1) / (arr.R0 - 1)
        result.append(
            FiberChamber(
                chamber=chamber,
                s=s,
                point=(k, h),
                rho=rho,
                h_prime=1 - Fraction(s, b + 1),
                eps=eps,
                delta=chamber.sign_vector,
                a1=(k - h + 1 - rho, 1 - rho),
                a2=(k + h - 1 + rho, 1 - rho),
            )
        )
    logger.info(f"Found {b} chambers disjoint from F")
    return result


def betti_numbers(arr: Arrangement, fibers: Optional[List[FiberChamber]] = None) -> Tuple[int, int, int]:
    """(b0, b1, b2) of the complexified complement."""
    b2 = sum(p.multiplicity - 1 for p in intersection_summary(arr))
    if fibers is None:
        fibers = fiber_chambers(arr)
    if len(fibers) != b2:
        raise InvariantViolation(f"b2={b2} but {len(fibers)} chambers avoid F")
    return (1, arr.n, b2)


def euler_characteristic(arr: Arrangement) -> int:
    """chi = 1 - b1 + b2."""
    b0, b1, b2 = betti_numbers(arr)
    return b0 - b1 + b2
