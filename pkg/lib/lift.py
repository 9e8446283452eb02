#!/usr/bin/env python3
"""
Tangent Lift and Sphere Models

Geometric realizations inside the two models of the 3-sphere: the
piecewise-linear sphere Sph(R, 1) = {||y||_inf = delta(x)} over the
rectangle and the round sphere |x|^2 + |y|^2 = 1. Covers membership in the
complexified complement, the retraction sigma, the FS attaching circles,
the dotted circles, pushoffs and the lift of a divide with cusps to its
link of unit tangent vectors.
"""

import hashlib
import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .arrangement import Arrangement, Line, format_rational
from .divide import Domain, DivideWithCusps, GeometricCurve, StripCurve, predict_component_count
from .errors import (
    DomainViolation,
    HeightOutOfRange,
    InvariantViolation,
    OverlapDetected,
    ResolutionTooCoarse,
)

logger = logging.getLogger(__name__)

# Fibre turns with chord * resolution below this are taken in one step;
# longer turns are sampled at most every 2 / resolution along the chord.
TURN_TOLERANCE = 0.25

Point = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class TangentPoint:
    """A tangent vector y at the point x of the real plane."""

    x: Point
    y: Point

    def as_tuple(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.x[0], self.x[1], self.y[0], self.y[1])


@dataclass
class PLLoop:
    """Closed PL loop; points is an (m, 4) array of (x1, x2, y1, y2)."""

    label: str
    points: np.ndarray
    model: str = "round"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "points": [[round(float(v), 12) for v in row] for row in self.points],
        }


@dataclass
class PLLink:
    loops: List[PLLoop]
    provenance: str
    model: str = "round"
    meta: Dict[str, Any] = field(default_factory=dict)

    def labels(self) -> List[str]:
        return [loop.label for loop in self.loops]

    def fingerprint(self) -> str:
        """Digest of the labels and coordinates of every loop."""
        digest = hashlib.md5(self.model.encode())
        for loop in self.loops:
            digest.update(loop.label.encode())
            digest.update(np.ascontiguousarray(loop.points, dtype=float).tobytes())
        return digest.hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "provenance": self.provenance,
            "meta": self.meta,
            "loops": [loop.to_dict() for loop in self.loops],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PLLink":
        loops = [
            PLLoop(label=loop["label"], points=np.asarray(loop["points"], dtype=float), model=data.get("model", "round"))
            for loop in data["loops"]
        ]
        return cls(loops=loops, provenance=data.get("provenance", "unknown"), model=data.get("model", "round"),
                   meta=data.get("meta", {}))


# Complement and retraction


def complement_membership(arr: Arrangement, p: TangentPoint) -> bool:
    """Whether (x, y) avoids the complexified lines: y is not tangent to a line through x."""
    for line in arr.lines:
        if line.value(p.x[0], p.x[1]) == 0 and line.a * p.y[0] + line.b * p.y[1] == 0:
            return False
    return True


def _sup_norm(y: Point) -> Fraction:
    return max(abs(y[0]), abs(y[1]))


def in_sigma_domain(p: TangentPoint, R: Fraction) -> bool:
    x1, x2 = p.x
    if _sup_norm(p.y) > 1:
        return False
    if x2 >= 1 and not (x2 <= x1 + R and x2 <= -x1 + R):
        return False
    return True


def sigma(p: TangentPoint, R: Fraction) -> TangentPoint:
    """
    Retraction onto {x2 <= 1 - ||y||_inf} along y.

    Above the level the point slides along y (or its dominant coordinate)
    down to x2 = 1 - ||y||_inf; below it nothing moves.
    """
    if not in_sigma_domain(p, R):
        raise DomainViolation(f"Point {p.as_tuple()} is outside the retraction domain")
    x1, x2 = p.x
    y1, y2 = p.y
    m = _sup_norm(p.y)
    level = 1 - m
    if x2 <= level:
        return p
    if m == 0:
        raise DomainViolation("Retraction needs a nonzero imaginary part above x2 = 1")
    if abs(y1) <= abs(y2):
        shift = (y1 / y2) * (x2 - level)
    else:
        shift = (y2 / y1) * (x2 - level)
    return TangentPoint(x=(x1 - shift, level), y=p.y)


def sigma_retract(p: TangentPoint, t: Fraction, R: Fraction) -> TangentPoint:
    """sigma_t = (1 - t) p + t sigma(p)."""
    if not (0 <= t <= 1):
        raise DomainViolation(f"Homotopy parameter {t} outside [0, 1]")
    target = sigma(p, R)
    return TangentPoint(
        x=((1 - t) * p.x[0] + t * target.x[0], (1 - t) * p.x[1] + t * target.x[1]),
        y=p.y,
    )


# Rect sphere model


def rect_gauge(x: Sequence[Fraction], R: Fraction) -> Fraction:
    """delta(x): sup-norm distance from x to the boundary of Rect(R, 1)."""
    return min(x[0] + R, R - x[0], x[1] + 1, 1 - x[1])


def on_rect_sphere(point: Sequence[Fraction], R: Fraction) -> bool:
    x, y = point[:2], point[2:]
    return max(abs(y[0]), abs(y[1])) == rect_gauge(x, R)


@dataclass(frozen=True)
class FSSpec:
    """Base point P = (k, h) of an FS attaching circle."""

    k: Fraction
    h: Fraction
    R0: Fraction
    R: Fraction

    @property
    def rho(self) -> Fraction:
        return (self.h - 1) / (self.R0 - 1)

    @property
    def a1(self) -> Point:
        return (self.k - self.h + 1 - self.rho, 1 - self.rho)

    @property
    def a2(self) -> Point:
        return (self.k + self.h - 1 + self.rho, 1 - self.rho)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": format_rational(self.k),
            "h": format_rational(self.h),
            "R0": format_rational(self.R0),
            "R": format_rational(self.R),
        }


def fs_point(a1: Point, a2: Point, v: Point) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """The FS map at v on the boundary of the unit square."""
    alpha1, alpha2, b = a1[0], a2[0], a1[1]
    mid = (alpha1 + alpha2) / 2
    v1, v2 = v
    if v2 == -1:
        x1 = (alpha2 - alpha1) / 2 * v1 + mid
    elif v1 == 1:
        x1 = (alpha1 - alpha2) / 2 * v2 + mid
    elif v2 == 1:
        x1 = (alpha1 - alpha2) / 2 * v1 + mid
    elif v1 == -1:
        x1 = (alpha2 - alpha1) / 2 * v2 + mid
    else:
        raise DomainViolation(f"{v} is not on the boundary of the unit square")
    return (x1, b, (1 - b) * v1, (1 - b) * v2)


def _square_boundary(density: int) -> List[Point]:
    """Counterclockwise samples of the boundary of [-1, 1]^2 starting at (-1, -1)."""
    steps = [Fraction(2 * j, density) - 1 for j in range(density)]
    pts = [(s, Fraction(-1)) for s in steps]
    pts += [(Fraction(1), s) for s in steps]
    pts += [(-s, Fraction(1)) for s in steps]
    pts += [(Fraction(-1), -s) for s in steps]
    return pts


def fs_circle(
    a1: Point, a2: Point, R: Fraction, density: int = 8, label: str = "fs"
) -> Tuple[List[Tuple[Fraction, ...]], PLLoop]:
    """
    FS(a1, a2): exact loop on Sph(R, 1) and its round image.

    Returns the rect-model points (exact rationals) and a round-model
    PLLoop obtained by radial projection.
    """
    alpha1, alpha2, b = a1[0], a2[0], a1[1]
    if a2[1] != b or alpha1 > alpha2:
        raise HeightOutOfRange(f"FS endpoints {a1}, {a2} must share a height with a1 left of a2")
    if not (0 <= b < 1):
        raise HeightOutOfRange(f"FS height {b} outside [0, 1)")
    if max(abs(alpha1), abs(alpha2)) + (1 - b) > R:
        raise HeightOutOfRange(f"FS circle at {a1}, {a2} does not fit in Rect({R}, 1)")

    rect_points = [fs_point(a1, a2, v) for v in _square_boundary(density)]
    return rect_points, PLLoop(label=label, points=to_round(rect_points, closed=True))


def rect_dotted_loop(line: Line, R: Fraction, density: int = 8) -> List[Tuple[Fraction, ...]]:
    """
    Lift of the segment H_i in the rect model: y = +/- delta(x) (-b, 1).

    The gauge is piecewise linear with a break at x2 = 0, which is sampled.
    """
    direction = (-line.b / line.a, Fraction(1))
    scale = max(abs(direction[0]), abs(direction[1]))
    direction = (direction[0] / scale, direction[1] / scale)
    heights = [Fraction(j, density) - 1 for j in range(2 * density + 1)]
    plus = []
    for x2 in heights:
        x = (line.x_at(x2), x2)
        g = rect_gauge(x, R)
        plus.append((x[0], x[1], g * direction[0], g * direction[1]))
    minus = [(p[0], p[1], -p[2], -p[3]) for p in reversed(plus[1:-1])]
    return plus + minus


def to_round(rect_points: Sequence[Sequence[Fraction]], closed: bool = True, refine: int = 4) -> np.ndarray:
    """Radial projection p / |p| of a rect-model loop, refining each edge."""
    pts = np.asarray([[float(v) for v in p] for p in rect_points], dtype=float)
    if refine > 1:
        nxt = np.roll(pts, -1, axis=0) if closed else pts[1:]
        base = pts if closed else pts[:-1]
        ts = np.arange(refine, dtype=float) / refine
        pts = (base[:, None, :] + ts[None, :, None] * (nxt - base)[:, None, :]).reshape(-1, 4)
        if not closed:
            pts = np.vstack([pts, np.asarray([[float(v) for v in rect_points[-1]]])])
    norms = np.linalg.norm(pts, axis=1)
    return pts / norms[:, None]


# Divide lift


def _disk_scale(margin: float) -> Fraction:
    return Fraction((1 - margin) / math.sqrt(2)).limit_denominator(1000)


def _rational_circle_point(angle: float) -> Point:
    t = Fraction(math.tan(angle / 2)).limit_denominator(10 ** 6)
    q = 1 + t * t
    return ((1 - t * t) / q, 2 * t / q)


def rect_to_disk(d: DivideWithCusps, margin: float = 0.1) -> DivideWithCusps:
    """
    Rescale a rect divide into the unit disk by (x1/R, x2) times a constant.

    Interval ends are continued almost vertically to rational points of the
    unit circle.
    """
    if d.domain.kind == "disk":
        return d
    R = d.domain.R
    s = _disk_scale(margin)

    def scale(p: Point) -> Point:
        return (p[0] / R * s, p[1] * s)

    curves = []
    for curve in d.curves:
        pts = [scale(p) for p in curve.vertices]
        if not curve.closed:
            first, last = pts[0], pts[-1]
            start = _rational_circle_point(math.atan2(-math.sqrt(1 - float(first[0]) ** 2), float(first[0])))
            end = _rational_circle_point(math.atan2(math.sqrt(1 - float(last[0]) ** 2), float(last[0])))
            pts = [start] + pts + [end]
            cusps = frozenset(i + 1 for i in curve.cusps)
        else:
            cusps = curve.cusps
        curves.append(replace(curve, vertices=tuple(pts), cusps=cusps))
    return DivideWithCusps(domain=Domain("disk"), curves=tuple(curves), arrangement=d.arrangement)


def _rotate(v: np.ndarray, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def _signed_angle(a: np.ndarray, b: np.ndarray) -> float:
    return math.atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])


def _lam(x: np.ndarray) -> float:
    return math.sqrt(max(0.0, 1.0 - float(x[0] ** 2 + x[1] ** 2)))


def _lift_pass(pts: np.ndarray, cusps: set, closed: bool, resolution: int) -> List[np.ndarray]:
    """
    One traversal with the + sign at the start.

    The unit tangent keeps its sign along the curve and flips at cusp
    vertices, so the tangent line stays continuous there. At each vertex
    the fibre vector turns from the incoming to the outgoing direction.
    """
    m = len(pts)
    edge_count = m if closed else m - 1
    dirs = []
    for i in range(edge_count):
        d = pts[(i + 1) % m] - pts[i]
        dirs.append(d / np.linalg.norm(d))
    signs = [1.0]
    for i in range(1, edge_count):
        signs.append(-signs[-1] if i in cusps else signs[-1])

    out: List[np.ndarray] = []

    def emit(x: np.ndarray, v: np.ndarray):
        lam = _lam(x)
        out.append(np.array([x[0], x[1], lam * v[0], lam * v[1]]))

    for i in range(edge_count):
        x = pts[i]
        current = signs[i] * dirs[i]
        if closed or i > 0:
            previous = signs[i - 1] * dirs[i - 1] if i > 0 else signs[0] * dirs[-1]
            theta = _signed_angle(previous, current)
            chord = _lam(x) * abs(theta)
            steps = max(1, min(math.ceil(abs(theta) * resolution / 8), math.ceil(chord * resolution / 2)))
            if chord * resolution < TURN_TOLERANCE:
                emit(x, current)
            else:
                for j in range(steps + 1):
                    emit(x, _rotate(previous, theta * j / steps))
        else:
            emit(x, current)
        nxt = pts[(i + 1) % m]
        k = max(1, math.ceil(float(np.linalg.norm(nxt - x)) * resolution / 2))
        for j in range(1, k):
            emit(x + (nxt - x) * (j / k), current)
    if not closed:
        emit(pts[-1], signs[-1] * dirs[-1])
    return out


def lift_curve(curve: GeometricCurve, resolution: int) -> List[PLLoop]:
    """Loops of unit tangent vectors over one curve in the unit disk."""
    pts = np.asarray([[float(p[0]), float(p[1])] for p in curve.vertices], dtype=float)
    cusps = set(curve.cusps)

    if not curve.closed:
        strand = _lift_pass(pts, cusps, closed=False, resolution=resolution)
        inner = strand[1:-1]
        back = [np.array([p[0], p[1], -p[2], -p[3]]) for p in reversed(inner)]
        loops = [PLLoop(label=curve.label, points=np.vstack(strand + back))]
    else:
        # start at a regular vertex so sign bookkeeping closes up
        start = next(i for i in range(len(pts)) if i not in cusps)
        pts = np.roll(pts, -start, axis=0)
        cusps = {(c - start) % len(pts) for c in cusps}
        strand = np.vstack(_lift_pass(pts, cusps, closed=True, resolution=resolution))
        mirrored = strand * np.array([1.0, 1.0, -1.0, -1.0])
        if len(cusps) % 2 == 1:
            loops = [PLLoop(label=curve.label, points=np.vstack([strand, mirrored]))]
        else:
            loops = [
                PLLoop(label=f"{curve.label}:+", points=strand),
                PLLoop(label=f"{curve.label}:-", points=mirrored),
            ]

    if len(loops) != predict_component_count(curve):
        raise InvariantViolation(f"Lift of {curve.label} has {len(loops)} loops")
    return loops


def _segments(link: PLLink) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    starts, ends, loop_ids, seg_ids, sizes = [], [], [], [], []
    for li, loop in enumerate(link.loops):
        pts = loop.points
        starts.append(pts)
        ends.append(np.roll(pts, -1, axis=0))
        loop_ids.append(np.full(len(pts), li))
        seg_ids.append(np.arange(len(pts)))
        sizes.append(np.full(len(pts), len(pts)))
    return (
        np.vstack(starts),
        np.vstack(ends),
        np.concatenate(loop_ids),
        np.concatenate(seg_ids),
        np.concatenate(sizes),
    )


def segment_distances(p1: np.ndarray, q1: np.ndarray, p2: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Vectorized minimum distance between segment pairs in any dimension."""
    d1, d2, r = q1 - p1, q2 - p2, p1 - p2
    a = np.einsum("ij,ij->i", d1, d1)
    e = np.einsum("ij,ij->i", d2, d2)
    f = np.einsum("ij,ij->i", d2, r)
    c = np.einsum("ij,ij->i", d1, r)
    b = np.einsum("ij,ij->i", d1, d2)
    denom = a * e - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 1e-300, np.clip((b * f - c * e) / denom, 0.0, 1.0), 0.0)
        t = (b * s + f) / e
        s = np.where(t < 0, np.clip(-c / a, 0.0, 1.0), np.where(t > 1, np.clip((b - c) / a, 0.0, 1.0), s))
    t = np.clip(t, 0.0, 1.0)
    gap = p1 + d1 * s[:, None] - (p2 + d2 * t[:, None])
    return np.linalg.norm(gap, axis=1)


def embeddedness_certificate(link: PLLink, tolerance: float = 1e-6, chunk: int = 512) -> Dict[str, Any]:
    """
    Minimum distance between non-adjacent segments of the link.

    Candidate pairs come from a bounding-box prefilter inflated by the
    threshold tau = tolerance * diameter.
    """
    starts, ends, loop_ids, seg_ids, sizes = _segments(link)
    all_pts = np.vstack([loop.points for loop in link.loops])
    diameter = float(np.max(np.ptp(all_pts, axis=0))) or 1.0
    tau = tolerance * diameter
    lo = np.minimum(starts, ends) - tau
    hi = np.maximum(starts, ends) + tau
    count = len(starts)

    best = math.inf
    best_pair: Optional[Tuple[str, str]] = None
    for first in range(0, count, chunk):
        rows = np.arange(first, min(first + chunk, count))
        overlap = np.all(
            (lo[rows, None, :] <= hi[None, :, :]) & (lo[None, :, :] <= hi[rows, None, :]), axis=2
        )
        i_idx, j_idx = np.nonzero(overlap)
        i_idx = rows[i_idx]
        keep = j_idx > i_idx
        i_idx, j_idx = i_idx[keep], j_idx[keep]
        same = loop_ids[i_idx] == loop_ids[j_idx]
        diff = np.abs(seg_ids[i_idx] - seg_ids[j_idx])
        adjacent = same & ((diff == 1) | (diff == sizes[i_idx] - 1))
        i_idx, j_idx = i_idx[~adjacent], j_idx[~adjacent]
        if len(i_idx) == 0:
            continue
        dist = segment_distances(starts[i_idx], ends[i_idx], starts[j_idx], ends[j_idx])
        k = int(np.argmin(dist))
        if dist[k] < best:
            best = float(dist[k])
            best_pair = (link.loops[loop_ids[i_idx[k]]].label, link.loops[loop_ids[j_idx[k]]].label)

    return {
        "min_distance": best if math.isfinite(best) else None,
        "threshold": tau,
        "embedded": best > tau,
        "closest": list(best_pair) if best_pair else None,
        "segments": count,
    }


def geometrize_and_lift(
    d: DivideWithCusps,
    resolution: int = 64,
    margin: float = 0.1,
    tolerance: float = 1e-6,
    max_doublings: int = 4,
) -> PLLink:
    """
    Lift of a divide to the round 3-sphere.

    Rect divides are first rescaled into the unit disk. The resolution
    doubles automatically while the embeddedness certificate fails.
    """
    if resolution < 16:
        raise ValueError(f"Resolution {resolution} is below 16")
    disk = rect_to_disk(d, margin)
    current = resolution
    for attempt in range(max_doublings + 1):
        loops: List[PLLoop] = []
        for curve in disk.curves:
            loops.extend(lift_curve(curve, current))
        link = PLLink(loops=loops, provenance="divideLift", meta={"resolution": current})
        certificate = embeddedness_certificate(link, tolerance)
        if certificate["embedded"]:
            link.meta["certificate"] = certificate
            logger.info(
                f"Lifted {len(disk.curves)} curves to {len(loops)} loops at resolution {current}"
            )
            return link
        logger.debug(f"Certificate failed at resolution {current}: {certificate}")
        current *= 2
    raise ResolutionTooCoarse(
        f"Lift is not embedded at resolution {current // 2}",
        details=certificate,
    )


# Pushoffs


def pushoff_curve(source: Union[StripCurve, FSSpec], eps: Optional[Fraction] = None) -> Union[StripCurve, FSSpec]:
    """
    Parallel companion of an attaching curve.

    A strip curve moves up by eps (default twice its strip half-width),
    which must keep it clear of its own strip and the one above. An FS
    base point moves to P + (0, eps).
    """
    if isinstance(source, StripCurve):
        shift = 2 * source.eps if eps is None else Fraction(eps)
        if not (Fraction(5, 4) * source.eps < shift < Fraction(11, 4) * source.eps):
            raise OverlapDetected(
                f"Pushoff by {shift} leaves the gap above strip {source.s}",
                details={"shift": str(shift), "eps": str(source.eps)},
            )
        return replace(source, h_prime=source.h_prime + shift, label=f"{source.label}'")
    if isinstance(source, FSSpec):
        if eps is None or eps <= 0:
            raise OverlapDetected("FS pushoff needs a positive eps")
        if source.h + eps >= source.R0:
            raise OverlapDetected(f"Pushoff height {source.h + eps} reaches R0={source.R0}")
        return replace(source, h=source.h + Fraction(eps))
    raise TypeError(f"Cannot push off {type(source).__name__}")
