#!/usr/bin/env python3
"""
Prometheus Exporter for the arr2kirby server

Gauges refreshed from the in-process pipeline metrics and result cache on
every scrape of /metrics.
"""

import logging
import os
import sys
from typing import Any, Optional

from prometheus_client import (
    CONTENT_TYPE_LATEST,
    CollectorRegistry,
    Gauge,
    Info,
    generate_latest,
)
from starlette.responses import Response

from ..config.otel_config import get_otel_config

logger = logging.getLogger(__name__)


class PrometheusConfig:
    """Prometheus scrape configuration."""

    def __init__(self, metrics: Any = None, cache: Any = None):
        self.enabled = os.getenv("PROMETHEUS_ENABLED", "true").lower() == "true"
        self.path = os.getenv("PROMETHEUS_METRICS_PATH", "/metrics")
        self.registry = CollectorRegistry()
        self.metrics = metrics
        self.cache = cache

        self.custom_metrics = None
        if self.enabled:
            self.custom_metrics = PipelinePrometheusMetrics(self.registry)

    def render(self) -> bytes:
        if self.custom_metrics:
            self.custom_metrics.update_metrics(self.metrics, self.cache)
        return generate_latest(self.registry)

    async def metrics_handler(self, request) -> Response:
        """Handle Prometheus metrics scraping."""
        if not self.enabled:
            return Response(content="Prometheus metrics disabled", status_code=404)

        try:
            return Response(content=self.render(), media_type=CONTENT_TYPE_LATEST)
        except Exception as e:
            logger.error(f"Error generating Prometheus metrics: {e}")
            return Response(content=f"Error generating metrics: {str(e)}", status_code=500)


class PipelinePrometheusMetrics:
    """Gauges describing pipeline activity."""

    def __init__(self, registry: CollectorRegistry):
        self.registry = registry

        self.info = Info("arr2kirby_server", "arr2kirby server information", registry=registry)
        self.stage_runs = Gauge(
            "arr2kirby_stage_runs", "Pipeline stage executions", ["stage"], registry=registry
        )
        self.stage_failures = Gauge(
            "arr2kirby_stage_failures", "Failed pipeline stage executions", ["stage"], registry=registry
        )
        self.stage_avg_seconds = Gauge(
            "arr2kirby_stage_avg_seconds", "Average recent stage duration", ["stage"], registry=registry
        )
        self.errors = Gauge("arr2kirby_errors", "Errors by category", ["error_type"], registry=registry)
        self.projection_retries = Gauge(
            "arr2kirby_projection_retries", "Rejected non-generic projections", registry=registry
        )
        self.max_crossings = Gauge(
            "arr2kirby_max_crossings", "Largest recent projected diagram", registry=registry
        )
        self.cache_entry_count = Gauge(
            "arr2kirby_cache_entry_count", "Number of entries in the result cache", registry=registry
        )
        self.cache_hit_rate = Gauge(
            "arr2kirby_cache_hit_rate_percent", "Result cache hit rate", registry=registry
        )
        self.otel_status = Gauge(
            "arr2kirby_otel_status",
            "OpenTelemetry integration status (1=enabled, 0=disabled)",
            ["component"],
            registry=registry,
        )
        self._initialize_static_info()

    def _initialize_static_info(self):
        config = get_otel_config()
        self.info.info(
            {
                "version": config.service_version,
                "service_name": config.service_name,
                "environment": config.environment,
                "python_version": sys.version.split()[0],
                "otel_enabled": str(config.otel_enabled).lower(),
            }
        )
        self.otel_status.labels(component="tracing").set(1 if config.tracing_enabled else 0)
        self.otel_status.labels(component="metrics").set(1 if config.metrics_enabled else 0)

    def update_metrics(self, metrics: Any = None, cache: Any = None):
        """Refresh gauges from the pipeline metrics and the cache."""
        try:
            if metrics is not None:
                snapshot = metrics.to_dict()
                for stage, stats in snapshot["stages"].items():
                    self.stage_runs.labels(stage=stage).set(stats["runs"])
                    self.stage_failures.labels(stage=stage).set(stats["failures"])
                    self.stage_avg_seconds.labels(stage=stage).set(stats["avg_seconds"])
                for error_type, count in snapshot["errors"].items():
                    self.errors.labels(error_type=error_type).set(count)
                self.projection_retries.set(snapshot["projection"]["retries"])
                self.max_crossings.set(snapshot["projection"]["max_crossings"])
            if cache is not None:
                self.cache_entry_count.set(len(cache))
                self.cache_hit_rate.set(cache.get_hit_rate())
        except Exception as e:
            logger.error(f"Error updating Prometheus metrics: {e}")


# Global Prometheus configuration
_prometheus_config: Optional[PrometheusConfig] = None


def get_prometheus_config(metrics: Any = None, cache: Any = None) -> PrometheusConfig:
    """Get global Prometheus configuration, binding metric sources on first use."""
    global _prometheus_config
    if _prometheus_config is None:
        _prometheus_config = PrometheusConfig(metrics, cache)
    return _prometheus_config


def is_prometheus_enabled() -> bool:
    return get_prometheus_config().enabled


async def prometheus_metrics_handler(request) -> Response:
    """Handle Prometheus metrics endpoint."""
    return await get_prometheus_config().metrics_handler(request)
