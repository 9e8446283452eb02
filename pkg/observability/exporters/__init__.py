#!/usr/bin/env python3
"""
Observability Exporters Module

Prometheus exposition of pipeline metrics.
"""

from .prometheus_exporter import PipelinePrometheusMetrics, PrometheusConfig, get_prometheus_config

__all__ = ["PrometheusConfig", "PipelinePrometheusMetrics", "get_prometheus_config"]
