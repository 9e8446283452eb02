#!/usr/bin/env python3
"""
OpenTelemetry Configuration for the arr2kirby pipeline

Tracer and meter providers for the pipeline stages. Everything stays a
no-op unless OTEL is switched on, either with the OTEL_* variables or with
the ARR2KIRBY_* flags the pipeline settings read, so the command line runs
without an OTEL backend.

The provider resource names the pipeline stages and, once a pipeline has
described itself, the parameters its spans were produced with (lift
resolution, projection candidates, bracket cap, coloring primes).
"""

import logging
import os
from typing import Any, Dict, Optional, Tuple

logger = logging.getLogger(__name__)

# Stage names in pipeline order; spans are named arr2kirby.<stage>
PIPELINE_STAGES = ("normalize", "chambers", "divide", "lift", "fs_link", "project", "invariants")

TRUE_VALUES = ("true", "1", "yes", "on")

# Global configuration
_otel_config = None
_tracer = None
_meter = None
_pipeline_attributes: Dict[str, Any] = {}


def _flag(*names: str) -> bool:
    """True when any of the variables is set to a true value."""
    return any(os.getenv(name, "").lower() in TRUE_VALUES for name in names)


def stage_span_name(stage: str) -> str:
    return f"arr2kirby.{stage}"


def stage_index(stage: str) -> int:
    """Position of a stage in the pipeline, -1 for ad hoc stages."""
    return PIPELINE_STAGES.index(stage) if stage in PIPELINE_STAGES else -1


def describe_pipeline(**attributes: Any):
    """Record pipeline parameters for the OTEL resource (arr2kirby.<name>)."""
    for key, value in attributes.items():
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        _pipeline_attributes[f"arr2kirby.{key}"] = value if isinstance(value, (bool, int, float, str)) else str(value)


def pipeline_attributes() -> Dict[str, Any]:
    return dict(_pipeline_attributes)


class OTELConfig:
    """OpenTelemetry settings for the pipeline, read from the environment."""

    def __init__(self):
        self.service_name = os.getenv("OTEL_SERVICE_NAME", "arr2kirby")
        self.service_version = os.getenv("OTEL_SERVICE_VERSION", "0.1.0")
        self.environment = os.getenv("OTEL_ENVIRONMENT", "development")

        self.otel_enabled = _flag("OTEL_ENABLED", "ARR2KIRBY_OTEL_ENABLED")
        self.tracing_enabled = _flag("OTEL_TRACING_ENABLED", "ARR2KIRBY_TRACING_ENABLED")
        self.metrics_enabled = _flag("OTEL_METRICS_ENABLED", "ARR2KIRBY_METRICS_ENABLED")

        logger.debug(
            f"OTEL Config: enabled={self.otel_enabled}, tracing={self.tracing_enabled}, metrics={self.metrics_enabled}"
        )

    def resource_attributes(self) -> Dict[str, Any]:
        from opentelemetry.semconv.resource import ResourceAttributes

        attributes: Dict[str, Any] = {
            ResourceAttributes.SERVICE_NAME: self.service_name,
            ResourceAttributes.SERVICE_VERSION: self.service_version,
            ResourceAttributes.DEPLOYMENT_ENVIRONMENT: self.environment,
            "arr2kirby.stages": ",".join(PIPELINE_STAGES),
        }
        attributes.update(pipeline_attributes())
        return attributes

    def _resource(self):
        from opentelemetry.sdk.resources import Resource

        return Resource.create(self.resource_attributes())

    def setup_tracing(self) -> Optional[object]:
        """Tracer for pipeline stage spans, or None when disabled."""
        if not self.otel_enabled or not self.tracing_enabled:
            logger.debug("OpenTelemetry tracing is disabled")
            return None

        try:
            from opentelemetry import trace
            from opentelemetry.sdk.trace import TracerProvider

            trace.set_tracer_provider(TracerProvider(resource=self._resource()))
            tracer = trace.get_tracer(self.service_name, self.service_version)
            logger.info(f"OpenTelemetry tracing configured for stages {', '.join(PIPELINE_STAGES)}")
            return tracer

        except Exception as e:
            logger.error(f"Failed to configure OpenTelemetry tracing: {e}")
            return None

    def setup_metrics(self) -> Optional[object]:
        """Meter for the pipeline counters and histograms, or None when disabled."""
        if not self.otel_enabled or not self.metrics_enabled:
            logger.debug("OpenTelemetry metrics is disabled")
            return None

        try:
            from opentelemetry import metrics
            from opentelemetry.sdk.metrics import MeterProvider

            metrics.set_meter_provider(MeterProvider(resource=self._resource()))
            meter = metrics.get_meter(self.service_name, self.service_version)
            logger.info("OpenTelemetry metrics configured successfully")
            return meter

        except Exception as e:
            logger.error(f"Failed to configure OpenTelemetry metrics: {e}")
            return None


def get_otel_config() -> OTELConfig:
    global _otel_config
    if _otel_config is None:
        _otel_config = OTELConfig()
    return _otel_config


def initialize_otel() -> Tuple[Optional[object], Optional[object]]:
    """Build the tracer and meter once."""
    global _tracer, _meter

    config = get_otel_config()
    if _tracer is None:
        _tracer = config.setup_tracing()
    if _meter is None:
        _meter = config.setup_metrics()
    return _tracer, _meter


def get_tracer() -> Optional[object]:
    if _tracer is None:
        initialize_otel()
    return _tracer


def get_meter() -> Optional[object]:
    if _meter is None:
        initialize_otel()
    return _meter


def reset_otel():
    """Forget cached configuration, tracer, meter and pipeline description."""
    global _otel_config, _tracer, _meter
    _otel_config = None
    _tracer = None
    _meter = None
    _pipeline_attributes.clear()


def is_otel_enabled() -> bool:
    return get_otel_config().otel_enabled


def is_tracing_enabled() -> bool:
    return get_otel_config().tracing_enabled


def is_metrics_enabled() -> bool:
    return get_otel_config().metrics_enabled
