#!/usr/bin/env python3
"""
OpenTelemetry Tracing Utilities for the arr2kirby pipeline

Spans around pipeline stages (normalize, chambers, divide, lift, project,
invariants) and around server tool calls. Every helper degrades to a no-op
when tracing is disabled.
"""

import asyncio
import functools
import logging
import time
from contextlib import asynccontextmanager, contextmanager
from typing import Any, Callable, Dict, Optional

from opentelemetry import trace
from opentelemetry.trace import Status, StatusCode

from ..config.otel_config import get_tracer, is_tracing_enabled, stage_index, stage_span_name

logger = logging.getLogger(__name__)


def _fail(span, error: Exception):
    span.record_exception(error)
    span.set_status(Status(StatusCode.ERROR, str(error)))
    span.set_attribute("error", True)
    span.set_attribute("error.type", type(error).__name__)


class PipelineTracer:
    """Stage and tool-call tracing."""

    def __init__(self, tracer: Optional[trace.Tracer] = None):
        self.tracer = tracer or get_tracer()
        self.enabled = is_tracing_enabled() and self.tracer is not None

        if not self.enabled:
            logger.debug("Pipeline tracing disabled or tracer not available")

    @contextmanager
    def trace_stage(self, stage: str, **attributes):
        """Trace one pipeline stage."""
        if not self.enabled:
            yield None
            return

        span = self.tracer.start_span(stage_span_name(stage))
        start_time = time.time()
        try:
            span.set_attribute("pipeline.stage", stage)
            span.set_attribute("pipeline.stage_index", stage_index(stage))
            span.set_attribute("component", "arr2kirby")
            for key, value in attributes.items():
                span.set_attribute(f"pipeline.{key}", value if isinstance(value, (int, float, bool)) else str(value))

            yield span
            span.set_status(Status(StatusCode.OK))

        except Exception as e:
            _fail(span, e)
            raise
        finally:
            span.set_attribute("pipeline.duration", time.time() - start_time)
            span.end()

    @asynccontextmanager
    async def trace_tool_call(self, tool_name: str, arguments: Dict[str, Any]):
        """Trace a server tool call."""
        if not self.enabled:
            yield None
            return

        span = self.tracer.start_span("mcp.tool_call")
        try:
            span.set_attribute("mcp.tool_name", tool_name)
            span.set_attribute("mcp.arguments_count", len(arguments))
            for key, value in arguments.items():
                span.set_attribute(f"mcp.arg.{key}", str(value)[:100])

            yield span
            span.set_status(Status(StatusCode.OK))

        except Exception as e:
            _fail(span, e)
            raise
        finally:
            span.end()

    def trace_function(
        self,
        span_name: Optional[str] = None,
        attributes: Optional[Dict[str, Any]] = None,
    ):
        """Decorator for tracing functions."""

        def decorator(func: Callable):
            if not self.enabled:
                return func

            def start(name: Optional[str]):
                span = self.tracer.start_span(name or f"{func.__module__}.{func.__name__}")
                span.set_attribute("function.name", func.__name__)
                span.set_attribute("function.module", func.__module__)
                for key, value in (attributes or {}).items():
                    span.set_attribute(key, value)
                return span

            @functools.wraps(func)
            async def async_wrapper(*args, **kwargs):
                span = start(span_name)
                try:
                    result = await func(*args, **kwargs)
                    span.set_status(Status(StatusCode.OK))
                    return result
                except Exception as e:
                    _fail(span, e)
                    raise
                finally:
                    span.end()

            @functools.wraps(func)
            def sync_wrapper(*args, **kwargs):
                span = start(span_name)
                try:
                    result = func(*args, **kwargs)
                    span.set_status(Status(StatusCode.OK))
                    return result
                except Exception as e:
                    _fail(span, e)
                    raise
                finally:
                    span.end()

            if asyncio.iscoroutinefunction(func):
                return async_wrapper
            return sync_wrapper

        return decorator


_pipeline_tracer: Optional[PipelineTracer] = None


def get_pipeline_tracer() -> PipelineTracer:
    """Get global pipeline tracer instance."""
    global _pipeline_tracer
    if _pipeline_tracer is None:
        _pipeline_tracer = PipelineTracer()
    return _pipeline_tracer


async def trace_tool_execution(tool_name: str, arguments: Dict[str, Any], func: Callable):
    """Trace a tool execution with automatic error attributes."""
    tracer = get_pipeline_tracer()

    async with tracer.trace_tool_call(tool_name, arguments) as span:
        start_time = time.time()
        try:
            result = await func(**arguments)
            if span:
                span.set_attribute("mcp.execution.duration", time.time() - start_time)
                span.set_attribute("mcp.execution.success", True)
            return result
        except Exception as e:
            if span:
                span.set_attribute("mcp.execution.duration", time.time() - start_time)
                span.set_attribute("mcp.execution.success", False)
                span.set_attribute("mcp.execution.error_type", type(e).__name__)
            raise
