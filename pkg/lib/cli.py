#!/usr/bin/env python3
"""
arr2kirby command line

Subcommands run the pipeline stages on JSON documents (arrangements,
divides, PL links and diagrams) and print JSON or short summaries.
Exit status is 0 on success, 1 when a check or geometric stage fails and
2 on bad input or usage.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from .diagram import Diagram
from .divide import DivideWithCusps
from .errors import ErrorHandler
from .invariants import compare_reports, kirby_homology
from .lift import PLLink
from .pipeline import KirbyPipeline
from .render import RenderStyle, render_diagram_svg, render_divide_svg
from .settings import Settings, settings as default_settings

logger = logging.getLogger("arr2kirby")


def _read_document(path: str) -> Dict[str, Any]:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return data


def document_kind(data: Dict[str, Any]) -> str:
    """arrangement, divide, link or diagram, by the keys present."""
    if "lines" in data:
        return "arrangement"
    if "curves" in data and "domain" in data:
        return "divide"
    if "loops" in data:
        return "link"
    if "crossings" in data and "components" in data:
        return "diagram"
    raise ValueError("Unrecognized document: expected an arrangement, divide, link or diagram")


def _emit(args, payload: Any):
    """Write JSON (sorted keys) or text to -o or stdout."""
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True)
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        Path(args.output).write_text(text)
        logger.info(f"Wrote {args.output}")
    else:
        sys.stdout.write(text)


class Runner:
    """Resolves any input document as far down the pipeline as a command needs."""

    def __init__(self, args, pipeline: KirbyPipeline):
        self.args = args
        self.pipeline = pipeline
        self.data = _read_document(args.input) if getattr(args, "input", None) else None
        self.kind = document_kind(self.data) if self.data is not None else None

    @property
    def reduced(self) -> bool:
        return not getattr(self.args, "full", False)

    def arrangement(self):
        if self.kind != "arrangement":
            raise ValueError(f"This command needs an arrangement, got a {self.kind}")
        return self.pipeline.load(self.data)

    def divide(self) -> DivideWithCusps:
        if self.kind == "divide":
            return DivideWithCusps.from_dict(self.data)
        return self.pipeline.kirby_divide(self.arrangement(), reduced=self.reduced)

    def link(self) -> PLLink:
        if self.kind == "link":
            return PLLink.from_dict(self.data)
        return self.pipeline.lift(self.divide())

    def diagram(self) -> Diagram:
        if self.kind == "diagram":
            return Diagram.from_dict(self.data)
        return self.pipeline.project(
            self.link(), pole=self.args.pole, direction=self.args.seed_direction
        )


# Subcommands


def cmd_normalize(runner: Runner) -> int:
    arr = runner.arrangement()
    _emit(runner.args, arr.to_dict())
    return 0


def cmd_chambers(runner: Runner) -> int:
    summary = runner.pipeline.chambers(runner.arrangement())
    if runner.args.json:
        _emit(
            runner.args,
            {
                "chambers": [c.to_dict() for c in summary["chambers"]],
                "fibers": [f.to_dict() for f in summary["fibers"]],
                "intersections": [p.to_dict() for p in summary["intersections"]],
                "chi": summary["chi"],
            },
        )
    else:
        _emit(runner.args, f"chambers={len(summary['chambers'])}, ch_F={len(summary['fibers'])}")
    return 0


def cmd_kirby(runner: Runner) -> int:
    arr = runner.arrangement()
    divide = runner.pipeline.kirby_divide(arr, reduced=runner.reduced, companions=not runner.args.no_companions)
    _emit(runner.args, divide.to_dict())
    return 0


def cmd_lift(runner: Runner) -> int:
    link = runner.link()
    if runner.args.json or runner.args.output:
        _emit(runner.args, link.to_dict())
    else:
        cert = link.meta.get("certificate", {})
        _emit(
            runner.args,
            f"loops={len(link.loops)}, resolution={link.meta.get('resolution')}, "
            f"embedded={cert.get('embedded')}, min_distance={cert.get('min_distance')}",
        )
    return 0


def cmd_diagram(runner: Runner) -> int:
    dg = runner.diagram()
    _emit(runner.args, dg.pd_text() if runner.args.pd else dg.to_dict())
    return 0


def cmd_invariants(runner: Runner) -> int:
    dg = runner.diagram()
    provenance = runner.kind if runner.kind != "link" else runner.data.get("provenance", "link")
    report = runner.pipeline.report(dg, provenance=provenance, whole_jones=runner.args.whole_jones)
    payload = report.to_dict()
    if any(label.startswith("attach:") for label in report.labels()):
        payload["homology"] = kirby_homology(report).to_dict()
    _emit(runner.args, payload)
    return 0


def cmd_render(runner: Runner) -> int:
    style = RenderStyle(size=runner.args.size, show_companions=runner.args.companions)
    if runner.kind in ("arrangement", "divide") and not runner.args.diagram:
        svg = render_divide_svg(runner.divide(), style)
    else:
        svg = render_diagram_svg(runner.diagram(), style)
    _emit(runner.args, svg)
    return 0


def cmd_fsdemo(runner: Runner) -> int:
    pipeline = runner.pipeline
    arr = runner.arrangement()
    fs_report = pipeline.report_for_link(pipeline.build_fs_link(arr))[1]
    divide_report = pipeline.report_for_link(pipeline.build_kirby_link(arr, reduced=runner.reduced))[1]
    diff = compare_reports(fs_report, divide_report)
    _emit(
        runner.args,
        {"fs": fs_report.to_dict(), "divide": divide_report.to_dict(), "diff": diff.to_dict()},
    )
    return 0 if diff.equal else 1


def cmd_selftest(runner: Runner) -> int:
    results = runner.pipeline.selftest(runner.args.names or None, quick=runner.args.quick)
    if runner.args.json:
        _emit(runner.args, [r.to_dict() for r in results])
    else:
        _emit(runner.args, "\n".join(r.line() for r in results))
    failed = [r.entry for r in results if not r.passed]
    if failed:
        logger.error(f"Self-test failed for: {', '.join(failed)}")
    return 1 if failed else 0


COMMANDS = {
    "normalize": (cmd_normalize, "Normalize an arrangement"),
    "chambers": (cmd_chambers, "Enumerate chambers and the chambers missing the fiber line"),
    "kirby": (cmd_kirby, "Build the Kirby divide with cusps of an arrangement"),
    "lift": (cmd_lift, "Lift a divide to a PL link in the 3-sphere"),
    "diagram": (cmd_diagram, "Project a link to a planar diagram"),
    "invariants": (cmd_invariants, "Invariant report of a link diagram"),
    "render": (cmd_render, "Render a divide or a diagram as SVG"),
    "fsdemo": (cmd_fsdemo, "Compare the FS-circle link with the divide link"),
    "selftest": (cmd_selftest, "Run the reference corpus"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--resolution", type=int, help="Lift samples per unit length (default 64)")
    common.add_argument("--pole", type=int, help="Projection pole index")
    common.add_argument("--seed-direction", type=int, help="Projection direction index")
    common.add_argument("--bracket-cap", type=int, help="Largest diagram for the Kauffman bracket")
    common.add_argument("-o", "--output", help="Write output to this file")
    common.add_argument("--json", action="store_true", help="JSON output")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    size = common.add_mutually_exclusive_group()
    size.add_argument("--full", action="store_true", help="Full attaching curves")
    size.add_argument("--reduced", action="store_true", help="Reduced attaching curves (default)")

    parser = argparse.ArgumentParser(
        prog="arr2kirby",
        description="Kirby diagrams of complexified real line arrangements",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "selftest":
            p.add_argument("names", nargs="*", help="Corpus entries to run (default all)")
            p.add_argument("--quick", action="store_true", help="Skip the construction equivalence checks")
            continue
        p.add_argument("input", help="Input JSON document ('-' for stdin)")
        if name == "kirby":
            p.add_argument("--no-companions", action="store_true", help="Omit pushoff companions")
        if name == "diagram":
            p.add_argument("--pd", action="store_true", help="PD text instead of JSON")
        if name == "invariants":
            p.add_argument("--whole-jones", action="store_true", help="Jones polynomial of the whole link")
        if name == "render":
            p.add_argument("--diagram", action="store_true", help="Render the projected diagram")
            p.add_argument("--companions", action="store_true", help="Draw pushoff companions")
            p.add_argument("--size", type=int, default=800, help="Longer page side in pixels")
    return parser


def settings_for(args, base: Optional[Settings] = None) -> Settings:
    base = base or default_settings
    update = {}
    if args.resolution is not None:
        update["lift_resolution"] = args.resolution
    if args.bracket_cap is not None:
        update["bracket_cap"] = args.bracket_cap
    return base.model_copy(update=update) if update else base


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = "DEBUG" if args.verbose else default_settings.log_level
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    handler, _ = COMMANDS[args.command]
    errors = ErrorHandler()
    try:
        pipeline = KirbyPipeline(settings_for(args))
        errors = pipeline.error_handler
        return handler(Runner(args, pipeline))
    except Exception as e:
        response = errors.create_error_response(e, args.command)
        if args.json:
            sys.stdout.write(json.dumps(response, indent=2, sort_keys=True) + "\n")
        logger.error(f"{args.command} failed: {response['type']}: {response['message']}")
        return errors.exit_status(e)


if __name__ == "__main__":
    sys.exit(main())
