"""
Shared pytest configuration and fixtures for the arr2kirby test suite.

This module provides common fixtures (settings environment, sample
arrangements, hand-built diagrams and a pipeline with fresh metrics) used
across the test modules.
"""

import os
from unittest.mock import AsyncMock, patch

import pytest

from lib.arrangement import normalize_arrangement, parse_arrangement
from lib.cache import ResultCache
from lib.corpus import load_corpus
from lib.diagram import Crossing, Diagram, _rebuild
from lib.pipeline import KirbyPipeline
from lib.settings import Settings
from observability.metrics.pipeline_metrics import PipelineMetrics


@pytest.fixture
def mock_settings():
    """Environment for settings tests."""
    with patch.dict(
        os.environ,
        {
            "ARR2KIRBY_LOG_LEVEL": "DEBUG",
            "ARR2KIRBY_LIFT_RESOLUTION": "32",
            "ARR2KIRBY_BRACKET_CAP": "16",
            "ARR2KIRBY_CACHE_ENABLED": "true",
            "ARR2KIRBY_OTEL_ENABLED": "false",
        },
        clear=False,
    ):
        yield


@pytest.fixture
def mock_context():
    """Mock FastMCP context for testing."""
    context = AsyncMock()
    context.info = AsyncMock()
    context.error = AsyncMock()
    return context


@pytest.fixture
def corpus():
    return load_corpus()


def make_arrangement(lines, name=None):
    return normalize_arrangement(parse_arrangement({"lines": lines}), name=name)


@pytest.fixture
def two_crossing():
    return make_arrangement([["1", "0", "0"], ["0", "1", "0"]], "two_crossing")


@pytest.fixture
def two_parallel():
    return make_arrangement([["1", "0", "0"], ["1", "0", "-1"]], "two_parallel")


@pytest.fixture
def generic4():
    return make_arrangement(
        [["1", "0", "0"], ["0", "1", "0"], ["1", "1", "-1"], ["1", "-1", "-2"]], "generic4"
    )


@pytest.fixture
def pencil4():
    return make_arrangement(
        [["1", "0", "0"], ["0", "1", "0"], ["1", "-1", "0"], ["1", "1", "0"]], "pencil_A1"
    )


def diagram_from_pd(pd_rows, components):
    """
    Diagram from PD rows (i, j, k, l, sign) on consecutively numbered edges.

    components maps a label to its edge range (first, last); the over and
    under labels of each crossing are read off that map.
    """

    def owner(edge):
        for label, (first, last) in components.items():
            if first <= edge <= last:
                return label
        raise KeyError(edge)

    crossings = []
    for i, j, k, l, sign in pd_rows:
        over_edge = l if sign > 0 else j
        crossings.append(Crossing(pd=(i, j, k, l), sign=sign, over=owner(over_edge), under=owner(i)))
    edge_component = {
        e: label for label, (first, last) in components.items() for e in range(first, last + 1)
    }
    return _rebuild(crossings, list(components), edge_component, {}, {})


@pytest.fixture
def trefoil():
    """Right-handed trefoil."""
    return diagram_from_pd(
        [(1, 5, 2, 4, 1), (3, 1, 4, 6, 1), (5, 3, 6, 2, 1)], {"K": (1, 6)}
    )


@pytest.fixture
def hopf():
    """Positive Hopf link."""
    return diagram_from_pd([(1, 3, 2, 4, 1), (3, 1, 4, 2, 1)], {"A": (1, 2), "B": (3, 4)})


@pytest.fixture
def pipeline():
    settings = Settings(cache_enabled=True, otel_enabled=False, tracing_enabled=False)
    metrics = PipelineMetrics()
    return KirbyPipeline(settings, cache=ResultCache(max_size=64, metrics=metrics), metrics=metrics)
