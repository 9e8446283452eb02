#!/usr/bin/env python3
"""
Tests for lib/cache.py
"""

from datetime import datetime, timedelta
from unittest.mock import Mock

import pytest

from lib.cache import CacheEntry, ResultCache


def expire(cache, key):
    cache.cache[key].expires_at = datetime.now() - timedelta(seconds=1)


class TestCacheEntry:
    """Test CacheEntry class."""

    def test_cache_entry_is_expired(self):
        """Test CacheEntry.is_expired on both sides of the deadline."""
        now = datetime.now()
        fresh = CacheEntry(value="x", expires_at=now + timedelta(seconds=300), created_at=now)
        stale = CacheEntry(
            value="x",
            expires_at=now - timedelta(seconds=10),
            created_at=now - timedelta(seconds=310),
        )

        assert fresh.is_expired() is False
        assert stale.is_expired() is True

    def test_cache_entry_touch(self):
        """Test access statistics are updated."""
        now = datetime.now()
        entry = CacheEntry(value="x", expires_at=now + timedelta(seconds=60), created_at=now)

        entry.touch()
        entry.touch()

        assert entry.access_count == 2
        assert entry.last_accessed is not None

    def test_cache_entry_age(self):
        """Test the age of an entry."""
        now = datetime.now()
        entry = CacheEntry(
            value="x", expires_at=now + timedelta(seconds=60), created_at=now - timedelta(seconds=5)
        )
        assert entry.age >= 5


class TestResultCache:
    """Test ResultCache class."""

    @pytest.fixture
    def cache(self):
        return ResultCache(max_size=3, default_ttl=60)

    def test_generate_key_is_order_independent(self, cache):
        """Test parameters are sorted into the key."""
        assert cache.generate_key("lift", resolution=32, divide="abc") == cache.generate_key(
            "lift", divide="abc", resolution=32
        )
        assert cache.generate_key("lift", resolution=32) == "lift:resolution:32"

    def test_generate_key_hashes_long_parameters(self, cache):
        """Test long keys are hashed behind the operation name."""
        key = cache.generate_key("lift", divide="v" * 200)

        assert key.startswith("lift:")
        assert len(key) == len("lift:") + 32

    def test_get_miss_and_hit(self, cache):
        """Test a miss, a store and a hit."""
        assert cache.get("diagram", link="a") is None

        cache.set("diagram", {"crossings": 2}, link="a")

        assert cache.get("diagram", link="a") == {"crossings": 2}
        assert (cache.hits, cache.misses) == (1, 1)
        assert cache.get_hit_rate() == 50.0

    def test_lru_eviction(self, cache):
        """Test the least recently used entry is evicted first."""
        for name in ("a", "b", "c"):
            cache.set("lift", name, divide=name)
        cache.get("lift", divide="a")
        cache.set("lift", "d", divide="d")

        assert cache.get("lift", divide="b") is None
        assert cache.get("lift", divide="a") == "a"
        assert cache.evictions == 1
        assert len(cache) == 3

    def test_overwrite_does_not_evict(self, cache):
        """Test storing an existing key replaces it in place."""
        for name in ("a", "b", "c"):
            cache.set("lift", name, divide=name)
        cache.set("lift", "a2", divide="a")

        assert cache.evictions == 0
        assert cache.get("lift", divide="a") == "a2"

    def test_expired_entry_is_a_miss(self, cache):
        """Test an expired entry is dropped on access."""
        cache.set("report", "value", diagram="x")
        expire(cache, cache.generate_key("report", diagram="x"))

        assert cache.get("report", diagram="x") is None
        assert cache.expirations == 1
        assert len(cache) == 0

    def test_cleanup_expired(self, cache):
        """Test expired entries are swept in one pass."""
        cache.set("report", 1, diagram="x")
        cache.set("report", 2, diagram="y")
        expire(cache, cache.generate_key("report", diagram="x"))

        assert cache.cleanup_expired() == 1
        assert cache.generate_key("report", diagram="y") in cache

    def test_get_or_compute(self, cache):
        """Test the computation runs only on a miss."""
        compute = Mock(return_value="link")

        assert cache.get_or_compute("lift", compute, divide="a") == "link"
        assert cache.get_or_compute("lift", compute, divide="a") == "link"
        compute.assert_called_once()

    def test_clear(self, cache):
        """Test clear drops entries and statistics."""
        cache.set("lift", "x", divide="a")
        cache.get("lift", divide="a")
        cache.clear()

        assert len(cache) == 0
        assert cache.get_stats()["hits"] == 0

    def test_get_stats(self, cache):
        """Test the statistics document."""
        cache.set("lift", "x", divide="a")
        cache.get("lift", divide="a")
        cache.get("lift", divide="b")

        assert cache.get_stats() == {
            "size": 1,
            "max_size": 3,
            "hits": 1,
            "misses": 1,
            "hit_rate": 50.0,
            "evictions": 0,
            "expirations": 0,
            "default_ttl_seconds": 60,
        }

    def test_metrics_recording(self):
        """Test hits and misses reach the pipeline metrics."""
        metrics = Mock()
        cache = ResultCache(metrics=metrics)

        cache.get("lift", divide="a")
        cache.set("lift", "x", divide="a")
        cache.get("lift", divide="a")

        assert [c.args for c in metrics.record_cache.call_args_list] == [
            ("lift", False),
            ("lift", True),
        ]
