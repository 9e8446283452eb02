#!/usr/bin/env python3
"""
Planar Diagrams

Projection of a PL link in the round 3-sphere to a planar diagram:
stereographic projection from a pole off the link, then orthogonal
projection to a plane, with crossings read off as PD tuples. Also linking
numbers and framings read from crossing signs, sub-diagrams and
Reidemeister I/II simplification.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvariantViolation, MissingCompanion, NoGenericProjection
from .lift import PLLink

logger = logging.getLogger(__name__)

# Generic viewing directions for the orthogonal projection R^3 -> R^2
DIRECTIONS = (
    (0.2113, 0.5477, 0.8093),
    (0.6150, -0.3012, 0.7287),
    (-0.4871, 0.7213, 0.4923),
    (0.8391, 0.2127, -0.5006),
    (0.1235, -0.9012, 0.4157),
    (-0.7071, -0.3121, 0.6345),
    (0.3779, 0.8452, -0.3780),
    (-0.2673, 0.5345, 0.8018),
)


@dataclass
class Crossing:
    """
    One crossing as a PD tuple (i, j, k, l).

    Edges are listed counterclockwise starting from the incoming under
    edge; for a positive crossing the over strand leaves through j.
    """

    pd: Tuple[int, int, int, int]
    sign: int
    over: str
    under: str
    point: Optional[Tuple[float, float]] = None
    over_dir: Optional[Tuple[float, float]] = None

    @property
    def under_in(self) -> int:
        return self.pd[0]

    @property
    def under_out(self) -> int:
        return self.pd[2]

    @property
    def over_in(self) -> int:
        return self.pd[3] if self.sign > 0 else self.pd[1]

    @property
    def over_out(self) -> int:
        return self.pd[1] if self.sign > 0 else self.pd[3]

    def to_dict(self) -> Dict[str, Any]:
        data = {"pd": list(self.pd), "sign": self.sign, "over": self.over, "under": self.under}
        if self.point is not None:
            data["point"] = [round(v, 9) for v in self.point]
        if self.over_dir is not None:
            data["overDir"] = [round(v, 9) for v in self.over_dir]
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Crossing":
        return cls(
            pd=tuple(data["pd"]),
            sign=data["sign"],
            over=data["over"],
            under=data["under"],
            point=tuple(data["point"]) if data.get("point") else None,
            over_dir=tuple(data["overDir"]) if data.get("overDir") else None,
        )


@dataclass
class Diagram:
    crossings: List[Crossing]
    components: List[str]
    edge_component: Dict[int, str]
    free: List[str] = field(default_factory=list)
    gauss: Dict[str, List[int]] = field(default_factory=dict)
    planar: Dict[str, List[Tuple[float, float]]] = field(default_factory=dict)
    projection: Dict[str, Any] = field(default_factory=dict)

    @property
    def crossing_count(self) -> int:
        return len(self.crossings)

    @property
    def writhe(self) -> int:
        return sum(c.sign for c in self.crossings)

    def component_writhe(self, label: str) -> int:
        return sum(c.sign for c in self.crossings if c.over == label and c.under == label)

    def pd_text(self) -> str:
        """One crossing per line, crossingless components as O[label]."""
        lines = ["# X[i,j,k,l] counterclockwise from the incoming under-strand"]
        for c in self.crossings:
            pd = ",".join(str(e) for e in c.pd)
            lines.append(f"X[{pd}] sign={c.sign:+d} over={c.over} under={c.under}")
        lines += [f"O[{label}]" for label in self.free]
        for label in self.components:
            lines.append(f"# gauss {label}: {' '.join(str(v) for v in self.gauss.get(label, []))}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "components": list(self.components),
            "crossings": [c.to_dict() for c in self.crossings],
            "edgeComponent": {str(e): label for e, label in sorted(self.edge_component.items())},
            "free": list(self.free),
            "gauss": self.gauss,
            "writhe": self.writhe,
            "projection": self.projection,
            "planar": {k: [[round(x, 6), round(y, 6)] for x, y in v] for k, v in self.planar.items()},
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Diagram":
        return cls(
            crossings=[Crossing.from_dict(c) for c in data["crossings"]],
            components=list(data["components"]),
            edge_component={int(e): label for e, label in data["edgeComponent"].items()},
            free=list(data.get("free", [])),
            gauss={k: list(v) for k, v in data.get("gauss", {}).items()},
            planar={k: [tuple(p) for p in v] for k, v in data.get("planar", {}).items()},
            projection=data.get("projection", {}),
        )


# Projection


class _Degenerate(Exception):
    """Raised inside a projection attempt that is not generic."""


def _pole(k: int, count: int) -> np.ndarray:
    angle = math.pi * k / count
    return np.array([math.cos(angle), math.sin(angle), 0.0, 0.0])


def pole_isolation(link: PLLink, count: int) -> List[Tuple[int, float]]:
    """Candidate poles ordered by their distance to the link, farthest first."""
    pts = np.vstack([loop.points for loop in link.loops])
    scored = []
    for k in range(count):
        dist = float(np.min(np.linalg.norm(pts - _pole(k, count), axis=1)))
        scored.append((k, dist))
    scored.sort(key=lambda kd: (-kd[1], kd[0]))
    return scored


def _stereographic_basis(pole: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of pole, oriented with det[pole; B] = +1."""
    q, _ = np.linalg.qr(np.column_stack([pole, np.eye(4)]))
    if np.dot(q[:, 0], pole) < 0:
        q[:, 0] = -q[:, 0]
    frame = q[:, :4].copy()
    if np.linalg.det(frame) < 0:
        frame[:, 3] = -frame[:, 3]
    return frame[:, 1:4].T


def stereographic(points: np.ndarray, pole: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return (points @ basis.T) / (1.0 - points @ pole)[:, None]


def _plane_frame(direction: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    helper = np.array([0.0, 0.0, 1.0]) if abs(u[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(helper, u)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    if np.linalg.det(np.vstack([e1, e2, u])) < 0:
        e2 = -e2
    return e1, e2, u


def _cross2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _detect_crossings(
    planar: List[np.ndarray], depth: List[np.ndarray], margin: float, chunk: int = 512
) -> List[Tuple[int, int, float, int, int, float, bool]]:
    """
    All transverse crossings between non-adjacent segments.

    Returns (loop_i, seg_i, t, loop_j, seg_j, u, i_is_over). Raises
    _Degenerate for near-parallel overlaps, crossings at vertices, or
    crossings whose strands have nearly equal depth.
    """
    P = np.vstack(planar)
    Q = np.vstack([np.roll(p, -1, axis=0) for p in planar])
    zP = np.concatenate(depth)
    zQ = np.concatenate([np.roll(z, -1) for z in depth])
    loop_ids = np.concatenate([np.full(len(p), i) for i, p in enumerate(planar)])
    seg_ids = np.concatenate([np.arange(len(p)) for p in planar])
    sizes = np.concatenate([np.full(len(p), len(p)) for p in planar])
    scale = float(np.max(np.ptp(P, axis=0))) or 1.0
    lo, hi = np.minimum(P, Q), np.maximum(P, Q)
    count = len(P)

    found = []
    for first in range(0, count, chunk):
        rows = np.arange(first, min(first + chunk, count))
        overlap = np.all((lo[rows, None, :] <= hi[None, :, :]) & (lo[None, :, :] <= hi[rows, None, :]), axis=2)
        ii, jj = np.nonzero(overlap)
        ii = rows[ii]
        keep = jj > ii
        ii, jj = ii[keep], jj[keep]
        same = loop_ids[ii] == loop_ids[jj]
        diff = np.abs(seg_ids[ii] - seg_ids[jj])
        adjacent = same & ((diff == 1) | (diff == sizes[ii] - 1))
        ii, jj = ii[~adjacent], jj[~adjacent]
        if len(ii) == 0:
            continue

        r = Q[ii] - P[ii]
        s = Q[jj] - P[jj]
        qp = P[jj] - P[ii]
        denom = _cross2(r, s)
        lens = np.linalg.norm(r, axis=1) * np.linalg.norm(s, axis=1)
        parallel = np.abs(denom) <= margin * lens
        if parallel.any():
            # collinear overlaps are degenerate; separated parallels are harmless
            offset = np.abs(_cross2(qp[parallel], r[parallel])) / np.linalg.norm(r[parallel], axis=1)
            if np.any(offset <= margin * scale):
                raise _Degenerate("collinear segments")
        with np.errstate(divide="ignore", invalid="ignore"):
            t = _cross2(qp, s) / denom
            u = _cross2(qp, r) / denom
        hit = ~parallel & (t >= -margin) & (t <= 1 + margin) & (u >= -margin) & (u <= 1 + margin)
        if not hit.any():
            continue
        near_end = hit & ((t <= margin) | (t >= 1 - margin) | (u <= margin) | (u >= 1 - margin))
        if near_end.any():
            raise _Degenerate("crossing at a vertex")
        idx = np.nonzero(hit)[0]
        zi = zP[ii[idx]] + t[idx] * (zQ[ii[idx]] - zP[ii[idx]])
        zj = zP[jj[idx]] + u[idx] * (zQ[jj[idx]] - zP[jj[idx]])
        if np.any(np.abs(zi - zj) <= margin * scale):
            raise _Degenerate("strands meet in depth")
        for n, k in enumerate(idx):
            found.append(
                (
                    int(loop_ids[ii[k]]),
                    int(seg_ids[ii[k]]),
                    float(t[k]),
                    int(loop_ids[jj[k]]),
                    int(seg_ids[jj[k]]),
                    float(u[k]),
                    bool(zi[n] > zj[n]),
                )
            )
    return found


def _diagram_from_crossings(
    labels: List[str],
    planar: List[np.ndarray],
    raw: List[Tuple[int, int, float, int, int, float, bool]],
) -> Diagram:
    """Label edges between consecutive crossing events and build PD tuples."""
    events: Dict[int, List[Tuple[int, float, int, bool]]] = defaultdict(list)
    for cid, (li, si, t, lj, sj, u, i_over) in enumerate(raw):
        events[li].append((si, t, cid, i_over))
        events[lj].append((sj, u, cid, not i_over))

    strands: Dict[Tuple[int, bool], Tuple[int, int, np.ndarray]] = {}
    edge_component: Dict[int, str] = {}
    free = []
    next_edge = 1
    for li, label in enumerate(labels):
        evs = sorted(events.get(li, []))
        if not evs:
            free.append(label)
            continue
        m = len(evs)
        base = next_edge
        for k in range(m):
            edge_component[base + k] = label
        next_edge += m
        pts = planar[li]
        for k, (seg, _, cid, is_over) in enumerate(evs):
            incoming = base + (k - 1) % m
            outgoing = base + k
            direction = pts[(seg + 1) % len(pts)] - pts[seg]
            strands[(cid, is_over)] = (incoming, outgoing, direction)

    crossings = []
    for cid, (li, si, t, lj, sj, u, i_over) in enumerate(raw):
        o_in, o_out, o_dir = strands[(cid, True)]
        u_in, u_out, u_dir = strands[(cid, False)]
        sign = 1 if float(_cross2(o_dir, u_dir)) > 0 else -1
        if sign > 0:
            pd = (u_in, o_out, u_out, o_in)
        else:
            pd = (u_in, o_in, u_out, o_out)
        over_loop, under_loop = (li, lj) if i_over else (lj, li)
        pts = planar[li]
        point = pts[si] + t * (pts[(si + 1) % len(pts)] - pts[si])
        unit = o_dir / np.linalg.norm(o_dir)
        crossings.append(
            Crossing(
                pd=pd,
                sign=sign,
                over=labels[over_loop],
                under=labels[under_loop],
                point=(float(point[0]), float(point[1])),
                over_dir=(float(unit[0]), float(unit[1])),
            )
        )

    planar_map = {label: [(float(x), float(y)) for x, y in planar[i]] for i, label in enumerate(labels)}
    return _rebuild(crossings, labels, edge_component, planar_map, {})


def _try_projection(link: PLLink, pole_index: int, pole_count: int, direction: Sequence[float], margin: float) -> Diagram:
    pole = _pole(pole_index, pole_count)
    basis = _stereographic_basis(pole)
    e1, e2, u = _plane_frame(direction)
    planar, depth = [], []
    for loop in link.loops:
        q = stereographic(loop.points, pole, basis)
        planar.append(np.column_stack([q @ e1, q @ e2]))
        depth.append(q @ u)
    raw = _detect_crossings(planar, depth, margin)
    return _diagram_from_crossings(link.labels(), planar, raw)


def project_link(
    link: PLLink,
    pole_count: int = 17,
    pole_skip_angle: float = 0.02,
    direction_count: int = 6,
    margin: float = 1e-9,
    strategy: str = "first",
    pole: Optional[int] = None,
    direction: Optional[int] = None,
    max_trials: int = 6,
) -> Diagram:
    """
    Generic planar diagram of a link in the round 3-sphere.

    Poles on the great circle (cos k pi/P, sin k pi/P, 0, 0) are tried
    farthest from the link first; for each, viewing directions are tried
    in order. "first" keeps the first generic projection, "fewest" the
    one with the fewest crossings among up to max_trials generic ones.
    """
    if strategy not in ("first", "fewest"):
        raise ValueError(f"Unknown projection strategy {strategy!r}")
    ranked = pole_isolation(link, pole_count)
    if pole is not None:
        ranked = [kd for kd in ranked if kd[0] == pole]
    dirs = list(range(len(DIRECTIONS)))[:direction_count]
    if direction is not None:
        dirs = [d % len(DIRECTIONS) for d in range(direction, direction + direction_count)]

    diagnostics: List[Dict[str, Any]] = []
    best: Optional[Diagram] = None
    successes = 0
    for k, isolation in ranked:
        if isolation < pole_skip_angle:
            diagnostics.append({"pole": k, "reason": f"pole too close to link ({isolation:.3g})"})
            continue
        for d in dirs:
            try:
                dg = _try_projection(link, k, pole_count, DIRECTIONS[d], margin)
            except _Degenerate as exc:
                diagnostics.append({"pole": k, "direction": d, "reason": str(exc)})
                continue
            except InvariantViolation as exc:
                diagnostics.append({"pole": k, "direction": d, "reason": exc.args[0]})
                continue
            dg.projection = {"pole": k, "direction": d, "retries": len(diagnostics), "strategy": strategy}
            successes += 1
            if best is None or dg.crossing_count < best.crossing_count:
                best = dg
            if strategy == "first" or successes >= max_trials:
                logger.info(f"Projected {len(link.loops)} loops with {best.crossing_count} crossings")
                return best
    if best is not None:
        return best
    raise NoGenericProjection(diagnostics)


# Rebuilding and orientation


def _incoming_map(crossings: Sequence[Crossing]) -> Dict[int, Tuple[int, bool]]:
    incoming = {}
    for cid, c in enumerate(crossings):
        incoming[c.under_in] = (cid, False)
        incoming[c.over_in] = (cid, True)
    return incoming


def _walk(crossings: Sequence[Crossing], start: int) -> Tuple[List[int], List[int]]:
    """Edges and signed crossing visits along the strand starting at edge start."""
    incoming = _incoming_map(crossings)
    edges, visits = [], []
    edge = start
    while True:
        edges.append(edge)
        if edge not in incoming:
            raise InvariantViolation(f"Edge {edge} does not enter any crossing")
        cid, is_over = incoming[edge]
        visits.append(cid + 1 if is_over else -(cid + 1))
        c = crossings[cid]
        edge = c.over_out if is_over else c.under_out
        if edge == start:
            return edges, visits
        if len(edges) > 4 * len(crossings):
            raise InvariantViolation("Strand does not close up")


def _rebuild(
    crossings: List[Crossing],
    components: List[str],
    edge_component: Dict[int, str],
    planar: Dict[str, List[Tuple[float, float]]],
    projection: Dict[str, Any],
) -> Diagram:
    """Renumber edges along each component and recompute Gauss codes."""
    seen = defaultdict(int)
    for c in crossings:
        for e in c.pd:
            seen[e] += 1
    if any(v != 2 for v in seen.values()):
        raise InvariantViolation("An edge does not appear exactly twice")

    renumber: Dict[int, int] = {}
    new_component: Dict[int, str] = {}
    gauss: Dict[str, List[int]] = {}
    free = []
    for label in components:
        own = sorted(e for e in seen if edge_component.get(e) == label)
        if not own:
            free.append(label)
            gauss[label] = []
            continue
        edges, visits = _walk(crossings, own[0])
        if sorted(edges) != own:
            raise InvariantViolation(f"Component {label} is not a single strand")
        for e in edges:
            renumber[e] = len(renumber) + 1
            new_component[renumber[e]] = label
        gauss[label] = visits

    rebuilt = [
        Crossing(
            pd=tuple(renumber[e] for e in c.pd),
            sign=c.sign,
            over=c.over,
            under=c.under,
            point=c.point,
            over_dir=c.over_dir,
        )
        for c in crossings
    ]
    return Diagram(
        crossings=rebuilt,
        components=list(components),
        edge_component=new_component,
        free=free,
        gauss=gauss,
        planar=planar,
        projection=projection,
    )


# Linking numbers


@dataclass
class LinkingMatrix:
    """Linking numbers off the diagonal, writhe of each component on it."""

    labels: List[str]
    values: Dict[Tuple[str, str], int]

    def entry(self, a: str, b: str) -> int:
        return self.values.get((a, b), 0)

    def rows(self) -> List[List[int]]:
        return [[self.entry(a, b) for b in self.labels] for a in self.labels]

    def to_dict(self) -> Dict[str, Any]:
        return {"labels": list(self.labels), "matrix": self.rows()}


def linking_matrix(dg: Diagram, labels: Optional[Iterable[str]] = None) -> LinkingMatrix:
    labels = list(labels) if labels is not None else list(dg.components)
    sums: Dict[Tuple[str, str], int] = defaultdict(int)
    for c in dg.crossings:
        if c.over == c.under:
            sums[(c.over, c.over)] += c.sign
        else:
            sums[(c.over, c.under)] += c.sign
            sums[(c.under, c.over)] += c.sign
    values = {}
    for a in labels:
        for b in labels:
            total = sums.get((a, b), 0)
            if a == b:
                values[(a, b)] = total
                continue
            if total % 2:
                raise InvariantViolation(f"Odd crossing sum between {a} and {b}")
            values[(a, b)] = total // 2
    return LinkingMatrix(labels=labels, values=values)


def framing_of(dg: Diagram, label: str) -> int:
    """Framing of an attaching component as its linking number with its pushoff."""
    companion = f"{label}'"
    if companion not in dg.components:
        raise MissingCompanion(f"No pushoff {companion} in the diagram")
    total = sum(
        c.sign for c in dg.crossings if {c.over, c.under} == {label, companion}
    )
    if total % 2:
        raise InvariantViolation(f"Odd crossing sum between {label} and {companion}")
    return total // 2


# Sub-diagrams and simplification


class _EdgeUnion:
    def __init__(self):
        self.parent: Dict[int, int] = {}

    def find(self, e: int) -> int:
        root = e
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while self.parent.get(e, e) != root:
            self.parent[e], e = root, self.parent[e]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def sub_diagram(dg: Diagram, labels: Iterable[str]) -> Diagram:
    """Diagram of the chosen components, erasing the rest."""
    keep = [label for label in dg.components if label in set(labels)]
    keep_set = set(keep)
    uf = _EdgeUnion()
    kept = []
    for c in dg.crossings:
        over_kept, under_kept = c.over in keep_set, c.under in keep_set
        if over_kept and under_kept:
            kept.append(c)
        elif over_kept:
            uf.union(c.over_in, c.over_out)
        elif under_kept:
            uf.union(c.under_in, c.under_out)
    crossings = [
        Crossing(tuple(uf.find(e) for e in c.pd), c.sign, c.over, c.under, c.point, c.over_dir)
        for c in kept
    ]
    edge_component = {e: label for e, label in dg.edge_component.items() if label in keep_set}
    planar = {k: v for k, v in dg.planar.items() if k in keep_set}
    return _rebuild(crossings, keep, edge_component, planar, dict(dg.projection))


def simplify_diagram(dg: Diagram) -> Diagram:
    """
    Remove crossings by Reidemeister I and II moves until none applies.

    A kink is a crossing with one edge at two adjacent corners; a bigon is
    a two-edge face whose one edge is over at both of its crossings.
    """
    uf = _EdgeUnion()
    live: Dict[int, Crossing] = dict(enumerate(dg.crossings))

    def pd_of(cid: int) -> List[int]:
        return [uf.find(e) for e in live[cid].pd]

    changed = True
    while changed:
        changed = False
        occ: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
        for cid in live:
            for pos, e in enumerate(pd_of(cid)):
                occ[e].append((cid, pos))
        dirty = set()

        def touch(edges: Iterable[int]):
            for e in edges:
                dirty.update(cid for cid, _ in occ.get(e, []))

        for cid in sorted(live):
            if cid in dirty or cid not in live:
                continue
            pd = pd_of(cid)
            removed = False
            for p in range(4):
                if pd[p] == pd[(p + 1) % 4]:
                    q1, q2 = pd[(p + 2) % 4], pd[(p + 3) % 4]
                    touch([pd[p], q1, q2])
                    del live[cid]
                    uf.union(q1, q2)
                    removed = True
                    break
            if removed:
                changed = True
                continue
            for p in range(4):
                x, y = pd[p], pd[(p + 1) % 4]
                others = [(c, q) for c, q in occ[y] if c != cid]
                if len(others) != 1:
                    continue
                c2, q = others[0]
                if c2 in dirty or c2 not in live:
                    continue
                pd2 = pd_of(c2)
                if pd2[(q + 1) % 4] != x or (p + 1) % 2 != q % 2:
                    continue
                outer1 = [(p + 2) % 4, (p + 3) % 4]
                outer2 = [(q + 2) % 4, (q + 3) % 4]
                o1 = next(pd[i] for i in outer1 if i % 2 == 1)
                u1 = next(pd[i] for i in outer1 if i % 2 == 0)
                o2 = next(pd2[i] for i in outer2 if i % 2 == 1)
                u2 = next(pd2[i] for i in outer2 if i % 2 == 0)
                touch([x, y, o1, o2, u1, u2])
                dirty.update((cid, c2))
                del live[cid]
                del live[c2]
                uf.union(o1, o2)
                uf.union(u1, u2)
                changed = True
                break

    crossings = [
        Crossing(tuple(uf.find(e) for e in c.pd), c.sign, c.over, c.under, c.point, c.over_dir)
        for c in live.values()
    ]
    remaining = {e for c in crossings for e in c.pd}
    edge_component = {e: label for e, label in dg.edge_component.items() if e in remaining}
    simplified = _rebuild(crossings, dg.components, edge_component, dg.planar, dict(dg.projection))
    logger.debug(f"Simplified {dg.crossing_count} crossings to {simplified.crossing_count}")
    return simplified
