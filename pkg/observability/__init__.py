#!/usr/bin/env python3
"""
Observability Package for arr2kirby

- OpenTelemetry configuration and initialization
- Tracing of pipeline stages and server tool calls
- Pipeline metrics (local counters with an OTEL mirror)
- Prometheus exporter for the server's /metrics route

## Package Structure
```
observability/
├── config/           # OpenTelemetry configuration and initialization
├── metrics/          # Pipeline metrics collection
├── tracing/          # Stage and tool-call tracing
└── exporters/        # Prometheus exporter
```
"""

from .config.otel_config import get_meter, get_tracer, initialize_otel, is_otel_enabled
from .metrics.pipeline_metrics import PipelineMetrics, get_metrics, initialize_metrics
from .tracing.pipeline_tracer import PipelineTracer, get_pipeline_tracer, trace_tool_execution

__version__ = "1.0.0"
__all__ = [
    # Configuration
    "initialize_otel",
    "get_tracer",
    "get_meter",
    "is_otel_enabled",
    # Metrics
    "PipelineMetrics",
    "get_metrics",
    "initialize_metrics",
    # Tracing
    "PipelineTracer",
    "get_pipeline_tracer",
    "trace_tool_execution",
]
