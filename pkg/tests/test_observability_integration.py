#!/usr/bin/env python3
"""
Tests for observability configuration and pipeline metrics.
"""

import json
import os
from unittest.mock import Mock, patch

import pytest

from lib.pipeline import KirbyPipeline
from lib.settings import Settings
from observability.config.otel_config import (
    PIPELINE_STAGES,
    OTELConfig,
    describe_pipeline,
    get_otel_config,
    initialize_otel,
    is_otel_enabled,
    pipeline_attributes,
    reset_otel,
    stage_index,
    stage_span_name,
)
from observability.metrics.pipeline_metrics import (
    LocalMetrics,
    OTELMetrics,
    PipelineMetrics,
    StageStats,
    get_metrics,
    initialize_metrics,
)


@pytest.fixture(autouse=True)
def fresh_otel():
    reset_otel()
    yield
    reset_otel()


class TestOTELConfiguration:
    """Test OpenTelemetry configuration from the environment."""

    def test_defaults(self):
        """Test OTEL is off unless asked for."""
        with patch.dict(os.environ, {}, clear=True):
            config = OTELConfig()

        assert config.service_name == "arr2kirby"
        assert config.otel_enabled is False
        assert config.tracing_enabled is False
        assert config.metrics_enabled is False

    def test_configuration_flags(self):
        """Test the enable flags and service identity."""
        with patch.dict(
            os.environ,
            {
                "OTEL_ENABLED": "true",
                "OTEL_TRACING_ENABLED": "TRUE",
                "OTEL_METRICS_ENABLED": "false",
                "OTEL_SERVICE_NAME": "arr2kirby-test",
            },
        ):
            config = OTELConfig()

        assert config.otel_enabled is True
        assert config.tracing_enabled is True
        assert config.metrics_enabled is False
        assert config.service_name == "arr2kirby-test"

    def test_disabled_setup_returns_none(self):
        """Test providers are not built while OTEL is off."""
        with patch.dict(os.environ, {"OTEL_ENABLED": "false"}):
            assert initialize_otel() == (None, None)
            assert is_otel_enabled() is False

    def test_setup_failure_is_logged(self):
        """Test a broken provider setup degrades to no tracer."""
        with patch.dict(os.environ, {"OTEL_ENABLED": "true", "OTEL_TRACING_ENABLED": "true"}):
            config = OTELConfig()
            with patch("opentelemetry.trace.set_tracer_provider", side_effect=RuntimeError("boom")):
                assert config.setup_tracing() is None

    def test_config_is_cached_until_reset(self):
        """Test the global configuration is built once."""
        first = get_otel_config()
        assert get_otel_config() is first

        reset_otel()
        assert get_otel_config() is not first


    def test_prefixed_flags(self):
        """Test the ARR2KIRBY_ flags switch OTEL on like the OTEL_ ones."""
        with patch.dict(
            os.environ,
            {"ARR2KIRBY_OTEL_ENABLED": "1", "ARR2KIRBY_TRACING_ENABLED": "yes"},
            clear=True,
        ):
            config = OTELConfig()

        assert config.otel_enabled is True
        assert config.tracing_enabled is True
        assert config.metrics_enabled is False

    def test_resource_names_stages_and_parameters(self):
        """Test the provider resource carries the stage list and described parameters."""
        describe_pipeline(lift_resolution=64, primes=[3, 5, 7], cache=True)
        attributes = OTELConfig().resource_attributes()

        assert attributes["service.name"] == "arr2kirby"
        assert attributes["arr2kirby.stages"] == "normalize,chambers,divide,lift,fs_link,project,invariants"
        assert attributes["arr2kirby.lift_resolution"] == 64
        assert attributes["arr2kirby.primes"] == "3,5,7"
        assert attributes["arr2kirby.cache"] is True

    def test_pipeline_describes_itself(self):
        """Test a pipeline records its settings for the resource."""
        KirbyPipeline(Settings(lift_resolution=32, bracket_cap=12, otel_enabled=False), metrics=PipelineMetrics())
        attributes = pipeline_attributes()

        assert attributes["arr2kirby.lift_resolution"] == 32
        assert attributes["arr2kirby.bracket_cap"] == 12
        assert attributes["arr2kirby.pole_count"] == 17

    def test_reset_forgets_description(self):
        """Test reset_otel drops the pipeline description."""
        describe_pipeline(pole_count=9)
        reset_otel()
        assert pipeline_attributes() == {}

    @pytest.mark.parametrize("stage,index", [("normalize", 0), ("lift", 3), ("invariants", 6), ("calibration", -1)])
    def test_stage_index(self, stage, index):
        """Test stages are numbered in pipeline order."""
        assert stage_index(stage) == index
        assert stage_span_name(stage) == f"arr2kirby.{stage}"
        assert len(PIPELINE_STAGES) == 7


class TestStageStats:
    """Test per-stage timing."""

    def test_record(self):
        """Test runs, failures and duration summaries."""
        stats = StageStats()
        stats.record(0.5, True)
        stats.record(1.5, False)

        assert stats.to_dict() == {
            "runs": 2,
            "failures": 1,
            "avg_seconds": 1.0,
            "max_seconds": 1.5,
        }

    def test_empty(self):
        """Test a stage that never ran."""
        assert StageStats().to_dict()["avg_seconds"] == 0.0


class TestPipelineMetrics:
    """Test local counters and their OTEL mirror."""

    @pytest.fixture
    def metrics(self):
        return PipelineMetrics(otel_metrics=OTELMetrics(meter=None))

    def test_otel_disabled_without_meter(self):
        """Test OTEL instruments stay off without a meter."""
        with patch("observability.metrics.pipeline_metrics.is_metrics_enabled", return_value=False):
            assert OTELMetrics().enabled is False

    def test_otel_instruments_created(self):
        """Test instruments are created on an enabled meter."""
        meter = Mock()
        with patch("observability.metrics.pipeline_metrics.is_metrics_enabled", return_value=True):
            otel = OTELMetrics(meter=meter)

        assert otel.enabled is True
        assert meter.create_counter.call_count == 5
        assert meter.create_histogram.call_count == 2

        otel.record_stage("lift", 0.25, True)
        otel.stage_runs.add.assert_called_once_with(1, {"stage": "lift", "success": "true"})

    def test_stage_and_error_counts(self, metrics):
        """Test stages and errors accumulate."""
        metrics.record_stage("lift", 0.1)
        metrics.record_stage("lift", 0.3, success=False)
        metrics.record_error("geometry_error", "lift")
        metrics.record_error("geometry_error", "lift")

        data = metrics.to_dict()
        assert data["stages"]["lift"]["runs"] == 2
        assert data["stages"]["lift"]["failures"] == 1
        assert data["errors"] == {"geometry_error": 2}

    def test_projection_counts(self, metrics):
        """Test projected crossing counts and retries."""
        metrics.record_projection(4, retries=2)
        metrics.record_projection(8)

        projection = metrics.to_dict()["projection"]
        assert projection == {"count": 2, "retries": 2, "avg_crossings": 6.0, "max_crossings": 8}

    def test_cache_and_tools(self, metrics):
        """Test cache hit rate, lift doublings and tool counts."""
        metrics.record_cache("lift", True)
        metrics.record_cache("lift", False)
        metrics.record_lift(2)
        metrics.record_tool_execution("chambers")

        data = metrics.to_dict()
        assert data["cache"] == {"hits": 1, "misses": 1, "hit_rate": 50.0}
        assert data["lift"] == {"resolution_doublings": 2}
        assert data["tools"] == {"chambers": 1}

    def test_reset(self, metrics):
        """Test reset clears local counters."""
        metrics.record_error("input_error")
        metrics.reset()

        assert isinstance(metrics.local, LocalMetrics)
        assert metrics.to_dict()["errors"] == {}

    def test_to_json(self, metrics):
        """Test the JSON document parses back."""
        metrics.record_stage("chambers", 0.01)
        assert json.loads(metrics.to_json())["stages"]["chambers"]["runs"] == 1

    def test_global_instance(self):
        """Test the global metrics are replaced on initialization."""
        first = get_metrics()
        assert get_metrics() is first

        second = initialize_metrics()
        assert get_metrics() is second
        assert second is not first
