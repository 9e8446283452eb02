#!/usr/bin/env python3
"""
Result Caching

LRU cache with TTL expiration for expensive pipeline stages (lifted links
and projected diagrams). Keys are built from the stage name
and its parameters so that repeated stages reuse earlier work.
"""

import hashlib
import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Any, Callable, Dict, Optional

logger = logging.getLogger(__name__)


@dataclass
class CacheEntry:
    """Cache entry with value, expiration time, and metadata."""

    value: Any
    expires_at: datetime
    created_at: datetime
    access_count: int = 0
    last_accessed: Optional[datetime] = None

    def is_expired(self) -> bool:
        """Check if the cache entry has expired."""
        return datetime.now() > self.expires_at

    def touch(self):
        """Update access statistics."""
        self.access_count += 1
        self.last_accessed = datetime.now()

    @property
    def age(self) -> float:
        """Get the age of the cache entry in seconds."""
        return (datetime.now() - self.created_at).total_seconds()


class ResultCache:
    """
    LRU + TTL cache for pipeline results.

    Entries are evicted least-recently-used first once max_size is reached
    and dropped on access after their TTL. Thread-safe.
    """

    def __init__(self, max_size: int = 256, default_ttl: int = 3600, metrics: Any = None):
        self.max_size = max_size
        self.default_ttl = default_ttl
        self.metrics = metrics
        self.cache: "OrderedDict[str, CacheEntry]" = OrderedDict()
        self.lock = threading.Lock()

        # Statistics
        self.hits = 0
        self.misses = 0
        self.evictions = 0
        self.expirations = 0
        self.created_at = datetime.now()

    def generate_key(self, operation: str, **kwargs) -> str:
        """Generate a consistent cache key from operation and parameters."""
        sorted_params = sorted(kwargs.items())
        key_data = f"{operation}:{':'.join(f'{k}:{v}' for k, v in sorted_params)}"

        # Hash long keys (arrangement documents, curve fingerprints)
        if len(key_data) > 100:
            return f"{operation}:{hashlib.md5(key_data.encode()).hexdigest()}"

        return key_data

    def get(self, operation: str, **kwargs) -> Optional[Any]:
        """Return the cached value or None on a miss."""
        key = self.generate_key(operation, **kwargs)

        with self.lock:
            entry = self.cache.get(key)

            if entry is None:
                self.misses += 1
                self._record(operation, hit=False)
                return None

            if entry.is_expired():
                del self.cache[key]
                self.expirations += 1
                self.misses += 1
                self._record(operation, hit=False)
                return None

            entry.touch()
            self.cache.move_to_end(key)
            self.hits += 1
            self._record(operation, hit=True)
            return entry.value

    def set(self, operation: str, value: Any, ttl: Optional[int] = None, **kwargs):
        """Store a value under the key built from operation and parameters."""
        key = self.generate_key(operation, **kwargs)
        ttl = ttl or self.default_ttl

        with self.lock:
            if key in self.cache:
                del self.cache[key]

            while len(self.cache) >= self.max_size:
                self.cache.popitem(last=False)
                self.evictions += 1

            now = datetime.now()
            self.cache[key] = CacheEntry(
                value=value, expires_at=now + timedelta(seconds=ttl), created_at=now
            )

    def get_or_compute(self, operation: str, compute: Callable[[], Any], **kwargs) -> Any:
        """Return the cached value, computing and storing it on a miss."""
        value = self.get(operation, **kwargs)
        if value is None:
            value = compute()
            self.set(operation, value, **kwargs)
        else:
            logger.debug(f"Cache hit for {operation}")
        return value

    def clear(self):
        """Clear all cache entries."""
        with self.lock:
            self.cache.clear()
            self.hits = 0
            self.misses = 0
            self.evictions = 0
            self.expirations = 0

    def cleanup_expired(self) -> int:
        """Remove expired entries, returning how many were dropped."""
        with self.lock:
            expired_keys = [k for k, e in self.cache.items() if e.is_expired()]
            for key in expired_keys:
                del self.cache[key]
            self.expirations += len(expired_keys)
        return len(expired_keys)

    def get_hit_rate(self) -> float:
        """Calculate cache hit rate as a percentage."""
        total_requests = self.hits + self.misses
        if total_requests == 0:
            return 0.0
        return (self.hits / total_requests) * 100

    def get_stats(self) -> Dict[str, Any]:
        """Get cache statistics."""
        return {
            "size": len(self.cache),
            "max_size": self.max_size,
            "hits": self.hits,
            "misses": self.misses,
            "hit_rate": round(self.get_hit_rate(), 2),
            "evictions": self.evictions,
            "expirations": self.expirations,
            "default_ttl_seconds": self.default_ttl,
        }

    def _record(self, operation: str, hit: bool):
        if hasattr(self.metrics, "record_cache"):
            self.metrics.record_cache(operation, hit)

    def __len__(self) -> int:
        return len(self.cache)

    def __contains__(self, key: str) -> bool:
        return key in self.cache
