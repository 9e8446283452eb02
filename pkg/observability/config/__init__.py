#!/usr/bin/env python3
"""
Observability Configuration Module

OTEL providers for the pipeline stages, off unless OTEL_ENABLED or
ARR2KIRBY_OTEL_ENABLED is set.
"""

from .otel_config import (
    PIPELINE_STAGES,
    OTELConfig,
    describe_pipeline,
    get_meter,
    get_otel_config,
    get_tracer,
    initialize_otel,
    is_metrics_enabled,
    is_otel_enabled,
    is_tracing_enabled,
    pipeline_attributes,
    reset_otel,
    stage_index,
    stage_span_name,
)

__all__ = [
    "PIPELINE_STAGES",
    "OTELConfig",
    "get_otel_config",
    "initialize_otel",
    "reset_otel",
    "describe_pipeline",
    "pipeline_attributes",
    "stage_span_name",
    "stage_index",
    "get_tracer",
    "get_meter",
    "is_otel_enabled",
    "is_tracing_enabled",
    "is_metrics_enabled",
]
