#!/usr/bin/env python3
"""
arr2kirby MCP Server

Exposes the arrangement-to-Kirby-diagram pipeline as FastMCP tools that
return JSON strings, with /health and /metrics routes for monitoring.
"""

import asyncio
import json
import logging
from typing import Any, Callable, Dict, List, Optional

from fastmcp import Context, FastMCP
from starlette.requests import Request
from starlette.responses import JSONResponse

from lib.invariants import kirby_homology
from lib.pipeline import KirbyPipeline
from lib.settings import settings
from observability import get_metrics, initialize_otel, is_otel_enabled, trace_tool_execution
from observability.exporters.prometheus_exporter import get_prometheus_config

logger = logging.getLogger(__name__)

if is_otel_enabled():
    initialize_otel()

metrics = get_metrics()
pipeline = KirbyPipeline(settings, metrics=metrics)
error_handler = pipeline.error_handler

mcp = FastMCP(
    name="arr2kirby",
    version="0.1.0",
    instructions="""
    Kirby diagrams of complexified real line arrangements.

    Arrangements are JSON objects {"name"?, "lines": [[a, b, c], ...]} with
    rational entries given as strings such as "1/3"; each triple is the line
    a*x1 + b*x2 + c = 0.

    Tools normalize an arrangement, enumerate its chambers, build the
    divide with cusps of its Kirby diagram, report link invariants of the
    lifted diagram, and run the reference corpus.
    """,
)


async def _run_tool(
    tool_name: str,
    arguments: Dict[str, Any],
    compute: Callable[..., Any],
    ctx: Optional[Context] = None,
) -> str:
    """Run a pipeline computation off the event loop and serialize the outcome."""

    async def execute(**kwargs):
        return await asyncio.to_thread(compute, **kwargs)

    try:
        result = await trace_tool_execution(tool_name, arguments, execute)
        metrics.record_tool_execution(tool_name, True)
        return json.dumps(result, indent=2, sort_keys=True)
    except Exception as e:
        metrics.record_tool_execution(tool_name, False)
        if ctx:
            await ctx.error(f"{tool_name} failed: {e}")
        return json.dumps(error_handler.create_error_response(e, tool_name), indent=2)


@mcp.tool(tags={"arrangement", "public"})
async def normalize_arrangement_tool(arrangement: str, ctx: Context = None) -> str:
    """Normalize an arrangement (rotation, ordering and the fiber line)."""
    if ctx:
        await ctx.info("Normalizing arrangement")

    def compute(arrangement: str) -> Dict[str, Any]:
        return pipeline.load(arrangement).to_dict()

    return await _run_tool("normalize_arrangement_tool", {"arrangement": arrangement}, compute, ctx)


@mcp.tool(tags={"arrangement", "public"})
async def chambers_tool(arrangement: str, ctx: Context = None) -> str:
    """Chambers of the arrangement and those not meeting the fiber line."""
    if ctx:
        await ctx.info("Enumerating chambers")

    def compute(arrangement: str) -> Dict[str, Any]:
        summary = pipeline.chambers(pipeline.load(arrangement))
        return {
            "chamberTotal": len(summary["chambers"]),
            "fiberCount": len(summary["fibers"]),
            "chi": summary["chi"],
            "chambers": [c.to_dict() for c in summary["chambers"]],
            "fibers": [f.to_dict() for f in summary["fibers"]],
            "intersections": [p.to_dict() for p in summary["intersections"]],
        }

    return await _run_tool("chambers_tool", {"arrangement": arrangement}, compute, ctx)


@mcp.tool(tags={"kirby", "public"})
async def kirby_divide_tool(
    arrangement: str, reduced: bool = True, companions: bool = False, ctx: Context = None
) -> str:
    """Divide with cusps whose link is the Kirby diagram of the complement."""
    if ctx:
        await ctx.info(f"Building {'reduced' if reduced else 'full'} Kirby divide")

    def compute(arrangement: str, reduced: bool, companions: bool) -> Dict[str, Any]:
        arr = pipeline.load(arrangement)
        return pipeline.kirby_divide(arr, reduced=reduced, companions=companions).to_dict()

    arguments = {"arrangement": arrangement, "reduced": reduced, "companions": companions}
    return await _run_tool("kirby_divide_tool", arguments, compute, ctx)


@mcp.tool(tags={"kirby", "public"})
async def invariant_report_tool(
    arrangement: str,
    construction: str = "divide",
    reduced: bool = True,
    whole_jones: bool = False,
    ctx: Context = None,
) -> str:
    """
    Invariants of the lifted Kirby diagram: per-component colorings and
    Jones polynomials, linking matrix, framings and handlebody homology.
    construction is "divide" or "fs".
    """
    if ctx:
        await ctx.info(f"Computing invariants of the {construction} construction")

    def compute(arrangement: str, construction: str, reduced: bool, whole_jones: bool) -> Dict[str, Any]:
        arr = pipeline.load(arrangement)
        if construction == "fs":
            link = pipeline.build_fs_link(arr)
        elif construction == "divide":
            link = pipeline.build_kirby_link(arr, reduced=reduced)
        else:
            raise ValueError(f"Unknown construction {construction!r}; use 'divide' or 'fs'")
        dg, report = pipeline.report_for_link(link, whole_jones=whole_jones)
        payload = report.to_dict()
        payload["homology"] = kirby_homology(report).to_dict()
        payload["projection"] = dg.projection
        return payload

    arguments = {
        "arrangement": arrangement,
        "construction": construction,
        "reduced": reduced,
        "whole_jones": whole_jones,
    }
    return await _run_tool("invariant_report_tool", arguments, compute, ctx)


@mcp.tool(tags={"kirby", "admin"})
async def selftest_tool(names: Optional[List[str]] = None, quick: bool = True, ctx: Context = None) -> str:
    """Run the reference corpus; quick skips the construction equivalence checks."""
    if ctx:
        await ctx.info("Running self-test corpus")

    def compute(names: Optional[List[str]], quick: bool) -> Dict[str, Any]:
        results = pipeline.selftest(names, quick=quick)
        return {
            "passed": all(r.passed for r in results),
            "table": [r.line() for r in results],
            "results": [r.to_dict() for r in results],
        }

    return await _run_tool("selftest_tool", {"names": names, "quick": quick}, compute, ctx)


@mcp.tool(tags={"monitoring", "admin"})
async def get_server_metrics(ctx: Context = None) -> str:
    """Get pipeline metrics."""
    if ctx:
        await ctx.info("Retrieving server metrics")

    data = metrics.to_dict()
    if pipeline.cache is not None:
        data["cache_stats"] = pipeline.cache.get_stats()
    return json.dumps(data, indent=2)


@mcp.custom_route("/health", methods=["GET"])
async def health_check_route(request: Request) -> JSONResponse:
    """Health check endpoint for load balancers."""
    try:
        settings.validate_configuration()
        health = {
            "status": "healthy",
            "service": "arr2kirby",
            "cache": pipeline.cache.get_stats() if pipeline.cache is not None else None,
            "otel": is_otel_enabled(),
        }
        return JSONResponse(health)
    except Exception as e:
        return JSONResponse({"status": "unhealthy", "error": str(e)}, status_code=503)


@mcp.custom_route("/metrics", methods=["GET"])
async def metrics_route(request: Request):
    """Prometheus exposition of the pipeline counters."""
    return await get_prometheus_config(metrics, pipeline.cache).metrics_handler(request)


def main():
    """Main entry point for the FastMCP server."""
    logging.basicConfig(level=getattr(logging, settings.log_level.upper(), logging.INFO))
    mcp.run(
        transport="http",
        host=settings.host,
        port=settings.port,
    )


if __name__ == "__main__":
    main()
