#!/usr/bin/env python3
"""
Observability Tracing Module

Spans for pipeline stages and server tool calls.
"""

from .pipeline_tracer import PipelineTracer, get_pipeline_tracer, trace_tool_execution

__all__ = ["PipelineTracer", "get_pipeline_tracer", "trace_tool_execution"]
