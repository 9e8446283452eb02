#!/usr/bin/env python3
"""
Observability Metrics Module

Pipeline counters mirrored into OpenTelemetry when enabled.
"""

from .pipeline_metrics import (
    LocalMetrics,
    OTELMetrics,
    PipelineMetrics,
    StageStats,
    get_metrics,
    initialize_metrics,
)

__all__ = [
    "LocalMetrics",
    "OTELMetrics",
    "PipelineMetrics",
    "StageStats",
    "get_metrics",
    "initialize_metrics",
]
