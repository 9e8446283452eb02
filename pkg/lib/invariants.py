#!/usr/bin/env python3
"""
Link Invariants

Isotopy invariants read from planar diagrams: Fox p-colorings, the
Kauffman bracket and Jones polynomial, linking numbers and framings, plus
the homology of the 4-manifold described by a Kirby diagram.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import sympy as sp
from sympy import GF, ZZ, Matrix, Rational
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.matrices import DomainMatrix

from .diagram import Diagram, LinkingMatrix, _EdgeUnion, framing_of, linking_matrix, simplify_diagram, sub_diagram
from .errors import InvariantViolation, TooManyCrossings

logger = logging.getLogger(__name__)

A = sp.Symbol("A")
T = sp.Symbol("t")

Laurent = Dict[int, int]


# Colorings


def fox_colorings(dg: Diagram, p: int) -> int:
    """
    Number of Fox p-colorings, including the trivial ones.

    Arcs are the over-strand classes of edges; each crossing imposes
    2 * over = under_in + under_out (mod p). Crossingless components add
    a free arc each.
    """
    uf = _EdgeUnion()
    for c in dg.crossings:
        uf.union(c.over_in, c.over_out)
    arcs = sorted({uf.find(e) for c in dg.crossings for e in c.pd})
    free_arcs = len(dg.free)
    if not dg.crossings:
        return p ** free_arcs

    column = {arc: i for i, arc in enumerate(arcs)}
    rows: Dict[int, Dict[int, Any]] = {}
    field_ = GF(p)
    for r, c in enumerate(dg.crossings):
        coeffs: Dict[int, int] = defaultdict(int)
        coeffs[column[uf.find(c.over_in)]] += 2
        coeffs[column[uf.find(c.under_in)]] -= 1
        coeffs[column[uf.find(c.under_out)]] -= 1
        row = {j: field_(v) for j, v in coeffs.items() if v % p}
        if row:
            rows[r] = row
    matrix = DomainMatrix(rows, (len(dg.crossings), len(arcs)), field_)
    rank = matrix.rank()
    return p ** (len(arcs) - rank + free_arcs)


# Kauffman bracket


def _mul_monomial(poly: Laurent, coeff: int, exponent: int) -> Laurent:
    return {e + exponent: c * coeff for e, c in poly.items()}


def _mul_loop(poly: Laurent) -> Laurent:
    """Multiply by d = -A^2 - A^-2."""
    out: Laurent = defaultdict(int)
    for e, c in poly.items():
        out[e + 2] -= c
        out[e - 2] -= c
    return {e: c for e, c in out.items() if c}


def _add_into(target: Laurent, poly: Laurent):
    for e, c in poly.items():
        target[e] = target.get(e, 0) + c
        if target[e] == 0:
            del target[e]


def _crossing_order(dg: Diagram) -> List[int]:
    """Greedy order keeping the set of open edges small."""
    remaining = set(range(len(dg.crossings)))
    order: List[int] = []
    open_edges: Dict[int, int] = defaultdict(int)
    while remaining:
        cid = max(remaining, key=lambda i: (sum(1 for e in dg.crossings[i].pd if open_edges[e]), -i))
        remaining.remove(cid)
        order.append(cid)
        for e in dg.crossings[cid].pd:
            open_edges[e] += 1
            if open_edges[e] == 2:
                open_edges[e] = 0
    return order


def _join(matching: Dict[int, int], x: int, y: int) -> Tuple[Dict[int, int], bool]:
    """
    Join the ends of edges x and y at the current crossing.

    matching maps each edge with one free end to the edge at the other end
    of its arc; an untouched edge is its own other end. Returns the new
    matching and whether a loop closed.
    """
    m = dict(matching)
    if x == y and x not in m:
        return m, True
    ox = m.pop(x, x)
    oy = m.pop(y, y)
    if ox == y:
        return m, True
    m.pop(ox, None)
    m.pop(oy, None)
    m[ox] = oy
    m[oy] = ox
    return m, False


def kauffman_bracket(dg: Diagram, cap: int = 24) -> Laurent:
    """
    Kauffman bracket <D> as a Laurent polynomial {exponent of A: coefficient}.

    States are merged crossing by crossing; the A-smoothing joins (i, j)
    and (k, l) of X[i, j, k, l], the B-smoothing (i, l) and (j, k).
    """
    if dg.crossing_count > cap:
        raise TooManyCrossings(dg.crossing_count, cap)

    free = len(dg.free)
    start: Laurent = {0: 1}
    for _ in range(max(0, free - 1)):
        start = _mul_loop(start)
    states: Dict[Tuple[FrozenSet, bool], Laurent] = {(frozenset(), free > 0): start}

    for cid in _crossing_order(dg):
        i, j, k, l = dg.crossings[cid].pd
        merged: Dict[Tuple[FrozenSet, bool], Laurent] = {}
        for (key, closed_any), poly in states.items():
            matching = {}
            for a, b in key:
                matching[a] = b
                matching[b] = a
            for exponent, pairs in ((1, ((i, j), (k, l))), (-1, ((i, l), (j, k)))):
                m, closed = matching, closed_any
                term = _mul_monomial(poly, 1, exponent)
                for x, y in pairs:
                    m, loop = _join(m, x, y)
                    if loop:
                        if closed:
                            term = _mul_loop(term)
                        closed = True
                new_key = (frozenset((a, b) if a <= b else (b, a) for a, b in m.items()), closed)
                bucket = merged.setdefault(new_key, {})
                _add_into(bucket, term)
        states = {k_: v for k_, v in merged.items() if v}

    result: Laurent = {}
    for (key, _), poly in states.items():
        if key:
            raise InvariantViolation("Bracket state sum left open arcs")
        _add_into(result, poly)
    return result if (dg.crossings or dg.free) else {0: 1}


def normalized_bracket(dg: Diagram, cap: int = 24) -> Laurent:
    """(-A^3)^(-w) <D>, invariant under all Reidemeister moves."""
    w = dg.writhe
    sign = -1 if w % 2 else 1
    return _mul_monomial(kauffman_bracket(dg, cap), sign, -3 * w)


def laurent_to_expr(poly: Laurent, symbol: sp.Symbol = A) -> sp.Expr:
    return sp.Add(*[c * symbol ** e for e, c in sorted(poly.items())])


def jones_polynomial(dg: Diagram, cap: int = 24) -> sp.Expr:
    """V(t) from the normalized bracket at A = t^(-1/4)."""
    expr = laurent_to_expr(normalized_bracket(dg, cap))
    return sp.expand(expr.subs({A: T ** Rational(-1, 4)}))


def jones_string(dg: Diagram, cap: int = 24) -> str:
    return str(jones_polynomial(dg, cap))


# Reports


@dataclass
class ComponentInvariants:
    label: str
    crossings: int
    colorings: Dict[int, int]
    jones: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "crossings": self.crossings,
            "colorings": {str(p): v for p, v in sorted(self.colorings.items())},
            "jones": self.jones,
        }


@dataclass
class InvariantReport:
    """Invariants of the non-companion components of a diagram."""

    components: List[ComponentInvariants]
    linking: LinkingMatrix
    framings: Dict[str, int]
    colorings: Dict[int, int]
    counts: Dict[str, int]
    jones: Optional[str] = None
    provenance: str = ""

    def component(self, label: str) -> ComponentInvariants:
        for comp in self.components:
            if comp.label == label:
                return comp
        raise KeyError(label)

    def labels(self) -> List[str]:
        return [c.label for c in self.components]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "provenance": self.provenance,
            "counts": dict(self.counts),
            "components": [c.to_dict() for c in self.components],
            "linking": self.linking.to_dict(),
            "framings": dict(sorted(self.framings.items())),
            "colorings": {str(p): v for p, v in sorted(self.colorings.items())},
            "jones": self.jones,
        }


def is_companion(label: str) -> bool:
    return label.endswith("'")


def invariant_report(
    dg: Diagram,
    primes: Sequence[int] = (3, 5, 7),
    cap: int = 24,
    whole_jones: bool = False,
    provenance: str = "",
) -> InvariantReport:
    """
    Per-component colorings and Jones polynomials, the linking matrix,
    framings of components with a pushoff and whole-link colorings.
    """
    main = [label for label in dg.components if not is_companion(label)]
    components = []
    for label in main:
        knot = simplify_diagram(sub_diagram(dg, [label]))
        colorings = {p: fox_colorings(knot, p) for p in primes}
        try:
            jones = jones_string(knot, cap)
        except TooManyCrossings:
            logger.warning(f"Skipping Jones polynomial of {label}: {knot.crossing_count} crossings")
            jones = None
        components.append(ComponentInvariants(label, knot.crossing_count, colorings, jones))

    framings = {
        label: framing_of(dg, label) for label in main if f"{label}'" in dg.components
    }
    whole = simplify_diagram(sub_diagram(dg, main))
    colorings = {p: fox_colorings(whole, p) for p in primes}
    jones = None
    if whole_jones:
        try:
            jones = jones_string(whole, cap)
        except TooManyCrossings:
            logger.warning(f"Skipping whole-link Jones polynomial: {whole.crossing_count} crossings")

    counts = {
        "components": len(main),
        "dotted": sum(1 for label in main if label.startswith("dotted:")),
        "attaching": sum(1 for label in main if label.startswith("attach:")),
        "crossings": dg.crossing_count,
        "simplifiedCrossings": whole.crossing_count,
    }
    return InvariantReport(
        components=components,
        linking=linking_matrix(dg, main),
        framings=framings,
        colorings=colorings,
        counts=counts,
        jones=jones,
        provenance=provenance,
    )


@dataclass
class ReportDiff:
    differences: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def equal(self) -> bool:
        return not self.differences

    def add(self, name: str, left: Any, right: Any):
        self.differences.append({"field": name, "left": left, "right": right})

    def to_dict(self) -> Dict[str, Any]:
        return {"equal": self.equal, "differences": self.differences}


def compare_reports(left: InvariantReport, right: InvariantReport) -> ReportDiff:
    """
    Field-by-field comparison of two reports.

    Self-linking entries are writhes of a particular diagram and are not
    compared; a Jones polynomial missing on either side is skipped.
    """
    diff = ReportDiff()
    if sorted(left.labels()) != sorted(right.labels()):
        diff.add("labels", sorted(left.labels()), sorted(right.labels()))
        return diff

    for label in sorted(left.labels()):
        a, b = left.component(label), right.component(label)
        if a.colorings != b.colorings:
            diff.add(f"colorings[{label}]", a.colorings, b.colorings)
        if a.jones is not None and b.jones is not None and a.jones != b.jones:
            diff.add(f"jones[{label}]", a.jones, b.jones)

    labels = sorted(left.labels())
    for i, x in enumerate(labels):
        for y in labels[i + 1:]:
            lx, rx = left.linking.entry(x, y), right.linking.entry(x, y)
            if lx != rx:
                diff.add(f"linking[{x},{y}]", lx, rx)

    if left.framings != right.framings:
        diff.add("framings", left.framings, right.framings)
    if left.colorings != right.colorings:
        diff.add("colorings", left.colorings, right.colorings)
    if left.jones is not None and right.jones is not None and left.jones != right.jones:
        diff.add("jones", left.jones, right.jones)
    for key in ("dotted", "attaching"):
        if left.counts.get(key) != right.counts.get(key):
            diff.add(f"counts.{key}", left.counts.get(key), right.counts.get(key))
    return diff


# Kirby homology


@dataclass
class KirbyHomology:
    """Homology of the 4-manifold of a dotted/attaching Kirby diagram."""

    h1_free_rank: int
    h1_torsion: List[int]
    h2_rank: int
    euler_characteristic: int
    matrix: List[List[int]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "H1": {"freeRank": self.h1_free_rank, "torsion": self.h1_torsion},
            "H2rank": self.h2_rank,
            "chi": self.euler_characteristic,
            "matrix": self.matrix,
        }


def kirby_homology(report: InvariantReport) -> KirbyHomology:
    """
    H1 and H2 of the handlebody from the attaching x dotted linking matrix.

    H1 is Z^n modulo the rows; its invariant factors come from the Smith
    normal form.
    """
    dotted = [label for label in report.labels() if label.startswith("dotted:")]
    attaching = [label for label in report.labels() if label.startswith("attach:")]
    n, b = len(dotted), len(attaching)
    matrix = [[report.linking.entry(a, d) for d in dotted] for a in attaching]

    factors: List[int] = []
    if n and b and any(any(row) for row in matrix):
        snf = smith_normal_form(Matrix(matrix), domain=ZZ)
        factors = [abs(int(snf[i, i])) for i in range(min(b, n)) if snf[i, i] != 0]
    rank = len(factors)
    return KirbyHomology(
        h1_free_rank=n - rank,
        h1_torsion=[f for f in factors if f > 1],
        h2_rank=b - rank,
        euler_characteristic=1 - n + b,
        matrix=matrix,
    )
