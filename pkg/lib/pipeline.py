#!/usr/bin/env python3
"""
Pipeline Orchestration

End-to-end stages shared by the command line and the server: normalize an
arrangement, build its Kirby divide or its FS link, lift, project and
report invariants, and run the self-test corpus. Each stage is timed,
traced and, where it is expensive, cached.
"""

import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from observability.config.otel_config import describe_pipeline
from observability.metrics.pipeline_metrics import PipelineMetrics, get_metrics
from observability.tracing.pipeline_tracer import PipelineTracer, get_pipeline_tracer

from .arrangement import (
    Arrangement,
    FiberChamber,
    enumerate_chambers,
    euler_characteristic,
    fiber_chambers,
    intersection_summary,
    normalize_arrangement,
    parse_arrangement,
)
from .cache import ResultCache
from .corpus import CorpusEntry, load_corpus
from .diagram import Diagram, project_link
from .divide import (
    Between,
    DivideWithCusps,
    StripCurve,
    assemble_kirby_divide,
    calibration_divide,
    kirby_strips,
)
from .errors import Arr2KirbyError, ErrorHandler
from .invariants import InvariantReport, compare_reports, invariant_report, kirby_homology
from .lift import FSSpec, PLLink, PLLoop, fs_circle, geometrize_and_lift, pushoff_curve, rect_dotted_loop, to_round
from .moves import MoveSpec, apply_move, reduce_by_moves, reduction_moves
from .settings import Settings, settings as default_settings

logger = logging.getLogger(__name__)


@dataclass
class Check:
    name: str
    passed: bool
    expected: Any = None
    actual: Any = None
    shown: Optional[str] = None
    skipped: bool = False

    def label(self) -> str:
        if self.shown:
            return self.shown
        if isinstance(self.expected, (int, str)):
            return f"{self.name}={self.expected}"
        return self.name

    def status(self) -> str:
        if self.skipped:
            return f"SKIP ({self.actual})"
        return "PASS" if self.passed else "FAIL"

    def to_dict(self) -> Dict[str, Any]:
        data = {"name": self.name, "passed": self.passed, "expected": self.expected, "actual": self.actual}
        if self.skipped:
            data["skipped"] = True
        return data


@dataclass
class SelftestResult:
    entry: str
    checks: List[Check] = field(default_factory=list)
    error: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def check(self, name: str, expected: Any, actual: Any, shown: Optional[str] = None) -> bool:
        ok = expected == actual
        self.checks.append(Check(name, ok, expected, actual, shown))
        return ok

    def skip(self, name: str, reason: str):
        """Record a check that could not run; it does not fail the entry."""
        self.checks.append(Check(name, True, actual=reason, skipped=True))

    def line(self) -> str:
        parts = [f"{c.label()} {c.status()}" for c in self.checks]
        if self.error:
            parts.append(f"ERROR {self.error['type']}: {self.error['message']}")
        return f"{self.entry}: {', '.join(parts)}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "entry": self.entry,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "error": self.error,
        }


class KirbyPipeline:
    """Stages from an arrangement document to invariant reports."""

    def __init__(
        self,
        settings: Optional[Settings] = None,
        cache: Optional[ResultCache] = None,
        tracer: Optional[PipelineTracer] = None,
        metrics: Optional[PipelineMetrics] = None,
    ):
        self.settings = settings or default_settings
        self.metrics = metrics or get_metrics()
        self.tracer = tracer or get_pipeline_tracer()
        if cache is None and self.settings.cache_enabled:
            cache = ResultCache(
                max_size=self.settings.cache_max_size,
                default_ttl=self.settings.cache_ttl_seconds,
                metrics=self.metrics,
            )
        self.cache = cache
        self.error_handler = ErrorHandler(self.metrics)
        s = self.settings
        describe_pipeline(
            lift_resolution=s.lift_resolution,
            pole_count=s.pole_count,
            direction_count=s.direction_count,
            bracket_cap=s.bracket_cap,
            primes=s.primes,
            cache=self.cache is not None,
        )

    @contextmanager
    def stage(self, name: str, **attributes):
        start = time.time()
        success = False
        with self.tracer.trace_stage(name, **attributes):
            try:
                yield
                success = True
            finally:
                duration = time.time() - start
                self.metrics.record_stage(name, duration, success)
                logger.debug(f"Stage {name} took {duration:.3f}s")

    def _cached(self, operation: str, compute, **key):
        if self.cache is None:
            return compute()
        return self.cache.get_or_compute(operation, compute, **key)

    # Arrangement stages

    def load(self, document: Union[str, bytes, Dict[str, Any]], name: Optional[str] = None) -> Arrangement:
        with self.stage("normalize"):
            if isinstance(document, dict):
                name = name or document.get("name")
            elif name is None:
                try:
                    name = json.loads(document).get("name")
                except (ValueError, AttributeError):
                    name = None
            return normalize_arrangement(parse_arrangement(document), name=name)

    def chambers(self, arr: Arrangement) -> Dict[str, Any]:
        with self.stage("chambers", lines=arr.n):
            chambers = enumerate_chambers(arr)
            fibers = fiber_chambers(arr, chambers)
            return {
                "arrangement": arr,
                "intersections": intersection_summary(arr),
                "chambers": chambers,
                "fibers": fibers,
                "chi": euler_characteristic(arr),
            }

    # Divide construction

    def kirby_strips(self, arr: Arrangement, reduced: bool = True) -> List[StripCurve]:
        return kirby_strips(arr, fiber_chambers(arr), reduced=reduced)

    def kirby_divide(
        self,
        arr: Arrangement,
        reduced: bool = True,
        companions: bool = True,
        strips: Optional[Sequence[StripCurve]] = None,
    ) -> DivideWithCusps:
        with self.stage("divide", lines=arr.n, reduced=reduced):
            if strips is None:
                strips = self.kirby_strips(arr, reduced)
            pushoffs = [pushoff_curve(st) for st in strips] if companions else []
            return assemble_kirby_divide(arr, strips, pushoffs)

    def lift(self, divide: DivideWithCusps) -> PLLink:
        s = self.settings

        def compute() -> PLLink:
            with self.stage("lift", curves=len(divide.curves)):
                link = geometrize_and_lift(
                    divide,
                    resolution=s.lift_resolution,
                    margin=s.disk_margin,
                    tolerance=s.separation_tolerance,
                    max_doublings=s.max_resolution_doublings,
                )
                doublings = (link.meta["resolution"] // s.lift_resolution).bit_length() - 1
                self.metrics.record_lift(doublings)
                return link

        fingerprint = json.dumps(divide.to_dict(), sort_keys=True)
        return self._cached("lift", compute, divide=fingerprint, resolution=s.lift_resolution)

    def build_kirby_link(self, arr: Arrangement, reduced: bool = True, companions: bool = True) -> PLLink:
        return self.lift(self.kirby_divide(arr, reduced=reduced, companions=companions))

    # FS construction

    def _pushoff_eps(self, arr: Arrangement, fibers: Sequence[FiberChamber], fc: FiberChamber) -> Fraction:
        heights = sorted(f.point[1] for f in fibers) + [arr.R0]
        gap = min(hi - lo for lo, hi in zip(heights, heights[1:]))
        eps = gap / 2
        while arr.sign_vector((fc.point[0], fc.point[1] + eps)) != fc.delta:
            eps /= 2
        return eps

    def build_fs_link(self, arr: Arrangement, companions: bool = True) -> PLLink:
        """Dotted circles and FS attaching circles in the rect model, mapped to the round sphere."""
        s = self.settings
        with self.stage("fs_link", lines=arr.n):
            fibers = fiber_chambers(arr)
            loops: List[PLLoop] = []
            for i, line in enumerate(arr.lines, start=1):
                rect = rect_dotted_loop(line, arr.R, s.fs_density)
                loops.append(PLLoop(label=f"dotted:{i}", points=to_round(rect)))
            for fc in fibers:
                spec = FSSpec(fc.point[0], fc.point[1], arr.R0, arr.R)
                _, loop = fs_circle(spec.a1, spec.a2, arr.R, s.fs_density, label=f"attach:{fc.s}")
                loops.append(loop)
                if companions:
                    moved = pushoff_curve(spec, self._pushoff_eps(arr, fibers, fc))
                    _, twin = fs_circle(moved.a1, moved.a2, arr.R, s.fs_density, label=f"attach:{fc.s}'")
                    loops.append(twin)
            logger.info(f"Built FS link with {len(loops)} loops")
            return PLLink(loops=loops, provenance="fsConstruction")

    # Diagrams and reports

    def project(
        self,
        link: PLLink,
        pole: Optional[int] = None,
        direction: Optional[int] = None,
        strategy: str = "first",
    ) -> Diagram:
        s = self.settings

        def compute() -> Diagram:
            with self.stage("project", loops=len(link.loops)):
                dg = project_link(
                    link,
                    pole_count=s.pole_count,
                    pole_skip_angle=s.pole_skip_angle,
                    direction_count=s.direction_count,
                    margin=s.transversality_margin,
                    strategy=strategy,
                    pole=pole,
                    direction=direction,
                )
                retries = dg.projection.get("retries", 0)
                if retries:
                    logger.warning(f"Projection needed {retries} retries")
                self.metrics.record_projection(dg.crossing_count, retries)
                return dg

        return self._cached(
            "project", compute, link=link.fingerprint(), pole=pole, direction=direction, strategy=strategy
        )

    def report(self, dg: Diagram, provenance: str = "", whole_jones: bool = False) -> InvariantReport:
        s = self.settings
        with self.stage("invariants", crossings=dg.crossing_count):
            return invariant_report(
                dg,
                primes=s.primes,
                cap=s.bracket_cap,
                whole_jones=whole_jones,
                provenance=provenance,
            )

    def report_for_link(
        self,
        link: PLLink,
        pole: Optional[int] = None,
        direction: Optional[int] = None,
        strategy: str = "first",
        whole_jones: bool = False,
    ) -> Tuple[Diagram, InvariantReport]:
        dg = self.project(link, pole=pole, direction=direction, strategy=strategy)
        return dg, self.report(dg, provenance=link.provenance, whole_jones=whole_jones)

    def calibration(self, name: str) -> Tuple[Diagram, InvariantReport]:
        """Diagram and report of one calibration curve."""
        link = self.lift(calibration_divide(name))
        return self.report_for_link(link, strategy="fewest")

    # Self-test

    def _moved_divide(self, arr: Arrangement) -> Tuple[DivideWithCusps, List[str]]:
        """
        The full divide with companions taken to the reduced one by cuspBigon
        and cuspSlide moves, then a zigzag inserted with cuspCancel into the
        first straight gap of an attaching curve and its pushoff.

        Returns the moved divide and the ids of the moves applied.
        """
        full = self.kirby_divide(arr, reduced=False)
        targets: Dict[str, StripCurve] = {}
        for st in self.kirby_strips(arr, reduced=True):
            targets[st.label] = st
            targets[f"{st.label}'"] = pushoff_curve(st)
        applied = [
            spec.move_id
            for label, target in targets.items()
            for spec in reduction_moves(full.curve(label).strip, target, arr.n)
        ]
        divide = reduce_by_moves(full, targets)
        for label, st in targets.items():
            if label.endswith("'"):
                continue
            for offset, between in enumerate(st.betweens):
                if between is Between.STRAIGHT:
                    site = st.window[0] + offset
                    for curve in (label, f"{label}'"):
                        divide = apply_move(divide, MoveSpec("cuspCancel", curve, site, direction="backward"))
                    applied.append("cuspCancel")
                    return divide, applied
        return divide, applied

    def check_entry(self, entry: CorpusEntry, quick: bool = False) -> SelftestResult:
        """Run every expectation of one corpus entry."""
        result = SelftestResult(entry.name)
        expected = entry.expected
        try:
            arr = self.load(entry.document(), name=entry.name)
            summary = self.chambers(arr)
            b = len(summary["fibers"])
            result.check("n", expected["n"], arr.n)
            result.check("chambers", expected["chambers"], len(summary["chambers"]))
            result.check("chi", expected["chi"], summary["chi"])

            link = self.build_kirby_link(arr)
            _, report = self.report_for_link(link)
            attaching = [label for label in report.labels() if label.startswith("attach:")]
            result.check("attaching", b, len(attaching))
            result.check("b", expected["b"], b)
            result.check(
                "framings", [0] * b, [report.framings.get(label) for label in attaching], shown="framings=0"
            )
            blocks = [
                report.linking.entry(a, other)
                for a in attaching
                for other in report.labels()
                if other != a
            ]
            result.check("zeroBlocks", True, all(v == 0 for v in blocks), shown="zeroBlocks")

            homology = kirby_homology(report)
            result.check("H1", expected["h1"], [homology.h1_free_rank, homology.h1_torsion])
            result.check("H2", expected["b"], homology.h2_rank)

            if not quick:
                fs_report = self.report_for_link(self.build_fs_link(arr))[1]
                self._check_diff(result, "fsEquivalent", report, fs_report)
                if b:
                    full = self.report_for_link(self.build_kirby_link(arr, reduced=False))[1]
                    self._check_diff(result, "reducedEquivalent", report, full)
                    moved, moves = self._moved_divide(arr)
                    if moves:
                        moved_report = self.report_for_link(self.lift(moved))[1]
                        self._check_diff(result, "moveEquivalent", report, moved_report, moves=moves)
                    else:
                        result.skip("moveEquivalent", "no move applies")
                else:
                    result.skip("reducedEquivalent", "no attaching curves")
                    result.skip("moveEquivalent", "no attaching curves")
        except Arr2KirbyError as e:
            result.error = self.error_handler.create_error_response(e, f"selftest:{entry.name}")
        logger.info(result.line())
        return result

    def _check_diff(
        self,
        result: SelftestResult,
        name: str,
        left: InvariantReport,
        right: InvariantReport,
        moves: Optional[List[str]] = None,
    ):
        diff = compare_reports(left, right)
        result.checks.append(Check(name, diff.equal, moves or [], diff.differences))

    def check_calibration(self, calibration: Dict[str, Dict[str, Any]]) -> SelftestResult:
        """Calibration curves: Hopf link, unknot and trefoil."""
        result = SelftestResult("calibration")
        try:
            for name, expected in sorted(calibration.items()):
                _, report = self.calibration(name)
                result.check(f"{name}.components", expected["components"], len(report.components))
                if "abs_linking" in expected:
                    a, b = report.labels()[:2]
                    result.check(f"{name}.|lk|", expected["abs_linking"], abs(report.linking.entry(a, b)))
                if "colorings3" in expected:
                    result.check(f"{name}.colorings3", expected["colorings3"], report.components[0].colorings.get(3))
                if "jones" in expected:
                    result.check(f"{name}.jones", expected["jones"], report.components[0].jones)
        except Arr2KirbyError as e:
            result.error = self.error_handler.create_error_response(e, "selftest:calibration")
        logger.info(result.line())
        return result

    def selftest(self, names: Optional[Sequence[str]] = None, quick: bool = False) -> List[SelftestResult]:
        corpus = load_corpus()
        entries = [e for e in corpus.entries if names is None or e.name in names]
        results = [self.check_entry(e, quick=quick) for e in entries]
        if names is None or "calibration" in names:
            results.append(self.check_calibration(corpus.calibration))
        return results


# Module-level conveniences on a default pipeline

_pipeline: Optional[KirbyPipeline] = None


def get_pipeline() -> KirbyPipeline:
    global _pipeline
    if _pipeline is None:
        _pipeline = KirbyPipeline()
    return _pipeline


def build_kirby_link(arr: Arrangement, reduced: bool = True, companions: bool = True) -> PLLink:
    return get_pipeline().build_kirby_link(arr, reduced=reduced, companions=companions)


def build_fs_link(arr: Arrangement, companions: bool = True) -> PLLink:
    return get_pipeline().build_fs_link(arr, companions=companions)


def report_for_link(link: PLLink, **kwargs) -> Tuple[Diagram, InvariantReport]:
    return get_pipeline().report_for_link(link, **kwargs)


def selftest(names: Optional[Sequence[str]] = None, quick: bool = False) -> List[SelftestResult]:
    return get_pipeline().selftest(names, quick=quick)


def reduce_divide_by_moves(arr: Arrangement) -> DivideWithCusps:
    """The full divide rewritten into the reduced one through cuspBigon and cuspSlide moves."""
    pipeline = get_pipeline()
    full = pipeline.kirby_divide(arr, reduced=False, companions=False)
    targets = {st.label: st for st in pipeline.kirby_strips(arr, reduced=True)}
    return reduce_by_moves(full, targets)
