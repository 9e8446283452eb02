#!/usr/bin/env python3
"""
Pipeline Metrics

In-process counters for the arr2kirby pipeline (stage timings, projection
retries, crossing counts, cache and error counts) mirrored into
OpenTelemetry instruments when OTEL metrics are enabled.
"""

import json
import logging
import time
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Dict, List, Optional

from opentelemetry import metrics

from ..config.otel_config import get_meter, is_metrics_enabled

logger = logging.getLogger(__name__)


@dataclass
class StageStats:
    """Timing of one pipeline stage."""

    runs: int = 0
    failures: int = 0
    durations: deque = field(default_factory=lambda: deque(maxlen=500))

    def record(self, duration: float, success: bool):
        self.runs += 1
        if not success:
            self.failures += 1
        self.durations.append(duration)

    def to_dict(self) -> Dict[str, Any]:
        recent = list(self.durations)
        return {
            "runs": self.runs,
            "failures": self.failures,
            "avg_seconds": round(sum(recent) / len(recent), 4) if recent else 0.0,
            "max_seconds": round(max(recent), 4) if recent else 0.0,
        }


@dataclass
class LocalMetrics:
    """Plain counters kept regardless of OTEL."""

    stages: Dict[str, StageStats] = field(default_factory=dict)
    errors: Dict[str, int] = field(default_factory=dict)
    tool_calls: Dict[str, int] = field(default_factory=dict)
    projections: int = 0
    projection_retries: int = 0
    crossings: deque = field(default_factory=lambda: deque(maxlen=500))
    lift_doublings: int = 0
    cache_hits: int = 0
    cache_misses: int = 0
    start_time: datetime = field(default_factory=datetime.now)

    def get_cache_hit_rate(self) -> float:
        total = self.cache_hits + self.cache_misses
        return (self.cache_hits / total * 100) if total > 0 else 0.0

    def to_dict(self) -> Dict[str, Any]:
        recent = list(self.crossings)
        return {
            "stages": {name: stats.to_dict() for name, stats in sorted(self.stages.items())},
            "errors": dict(self.errors),
            "tools": dict(self.tool_calls),
            "projection": {
                "count": self.projections,
                "retries": self.projection_retries,
                "avg_crossings": round(sum(recent) / len(recent), 1) if recent else 0,
                "max_crossings": max(recent) if recent else 0,
            },
            "lift": {"resolution_doublings": self.lift_doublings},
            "cache": {
                "hits": self.cache_hits,
                "misses": self.cache_misses,
                "hit_rate": self.get_cache_hit_rate(),
            },
            "system": {
                "uptime_seconds": round((datetime.now() - self.start_time).total_seconds(), 1),
                "start_time": self.start_time.isoformat(),
            },
        }


class OTELMetrics:
    """OpenTelemetry instruments for the pipeline."""

    def __init__(self, meter: Optional[metrics.Meter] = None):
        self.meter = meter or get_meter()
        self.enabled = is_metrics_enabled() and self.meter is not None
        self.start_time = time.time()

        if not self.enabled:
            logger.debug("OTEL metrics disabled or meter not available")
            return

        self.stage_runs = self.meter.create_counter(
            name="arr2kirby_stage_runs_total",
            description="Pipeline stage executions",
            unit="1",
        )
        self.stage_duration = self.meter.create_histogram(
            name="arr2kirby_stage_duration_seconds",
            description="Pipeline stage duration",
            unit="s",
        )
        self.crossings = self.meter.create_histogram(
            name="arr2kirby_diagram_crossings",
            description="Crossings of projected diagrams",
            unit="1",
        )
        self.projection_retries = self.meter.create_counter(
            name="arr2kirby_projection_retries_total",
            description="Rejected non-generic projections",
            unit="1",
        )
        self.errors = self.meter.create_counter(
            name="arr2kirby_errors_total",
            description="Errors by category",
            unit="1",
        )
        self.cache_operations = self.meter.create_counter(
            name="arr2kirby_cache_operations_total",
            description="Cache operations (hits/misses)",
            unit="1",
        )
        self.tool_executions = self.meter.create_counter(
            name="arr2kirby_tool_executions_total",
            description="Server tool executions",
            unit="1",
        )
        self.uptime_gauge = self.meter.create_observable_gauge(
            name="arr2kirby_uptime_seconds",
            description="Process uptime in seconds",
            unit="s",
            callbacks=[self._get_uptime],
        )
        logger.info("OTEL metrics initialized successfully")

    def _get_uptime(self, options) -> List[metrics.Observation]:
        return [metrics.Observation(time.time() - self.start_time)]

    def record_stage(self, stage: str, duration: float, success: bool):
        if not self.enabled:
            return
        labels = {"stage": stage, "success": str(success).lower()}
        self.stage_runs.add(1, labels)
        self.stage_duration.record(duration, labels)

    def record_projection(self, crossings: int, retries: int):
        if not self.enabled:
            return
        self.crossings.record(crossings)
        if retries:
            self.projection_retries.add(retries)

    def record_error(self, error_type: str, operation: str):
        if not self.enabled:
            return
        self.errors.add(1, {"error_type": error_type, "operation": operation})

    def record_cache(self, operation: str, hit: bool):
        if not self.enabled:
            return
        self.cache_operations.add(1, {"operation": operation, "result": "hit" if hit else "miss"})

    def record_tool_execution(self, tool_name: str, success: bool):
        if not self.enabled:
            return
        self.tool_executions.add(1, {"tool_name": tool_name, "success": str(success).lower()})


class PipelineMetrics:
    """Local counters plus their OTEL mirror."""

    def __init__(self, otel_metrics: Optional[OTELMetrics] = None):
        self.otel = otel_metrics or OTELMetrics()
        self.local = LocalMetrics()

    def record_stage(self, stage: str, duration: float, success: bool = True):
        self.otel.record_stage(stage, duration, success)
        self.local.stages.setdefault(stage, StageStats()).record(duration, success)

    def record_projection(self, crossings: int, retries: int = 0):
        self.otel.record_projection(crossings, retries)
        self.local.projections += 1
        self.local.projection_retries += retries
        self.local.crossings.append(crossings)

    def record_lift(self, doublings: int):
        self.local.lift_doublings += doublings

    def record_error(self, error_type: str, operation: str = "unknown"):
        self.otel.record_error(error_type, operation)
        self.local.errors[error_type] = self.local.errors.get(error_type, 0) + 1

    def record_cache(self, operation: str, hit: bool):
        self.otel.record_cache(operation, hit)
        if hit:
            self.local.cache_hits += 1
        else:
            self.local.cache_misses += 1

    def record_tool_execution(self, tool_name: str, success: bool = True):
        self.otel.record_tool_execution(tool_name, success)
        self.local.tool_calls[tool_name] = self.local.tool_calls.get(tool_name, 0) + 1

    def reset(self):
        """Reset local counters; OTEL instruments stay cumulative."""
        self.local = LocalMetrics()

    def to_dict(self) -> Dict[str, Any]:
        return self.local.to_dict()

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


# Global metrics instance
_metrics_instance: Optional[PipelineMetrics] = None


def get_metrics() -> PipelineMetrics:
    """Get global metrics instance."""
    global _metrics_instance
    if _metrics_instance is None:
        _metrics_instance = PipelineMetrics()
    return _metrics_instance


def initialize_metrics() -> PipelineMetrics:
    """Initialize global metrics."""
    global _metrics_instance
    _metrics_instance = PipelineMetrics()
    logger.debug("Global metrics initialized")
    return _metrics_instance
