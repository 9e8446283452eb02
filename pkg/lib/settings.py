#!/usr/bin/env python3
"""
Configuration and Settings Management

Centralized configuration for the arr2kirby pipeline: lift resolution,
projection candidates, invariant caps, caching and the optional server,
all overridable through ARR2KIRBY_* environment variables.
"""

import os
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import ConfigDict, Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Pipeline settings with environment variable integration."""

    model_config = ConfigDict(
        env_prefix="ARR2KIRBY_",
        case_sensitive=False,
        validate_assignment=True,
        extra="ignore",
    )

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")

    # Lift configuration
    lift_resolution: int = Field(
        default=64, description="Samples per unit disk diameter along each curve"
    )
    max_resolution_doublings: int = Field(
        default=4, description="Automatic resolution doublings before giving up"
    )
    separation_tolerance: float = Field(
        default=1e-6,
        description="Embeddedness threshold relative to the link diameter",
    )
    disk_margin: float = Field(
        default=0.1, description="Margin left when rescaling a rectangle into the disk"
    )
    fs_density: int = Field(
        default=8, description="Samples per edge of the square when drawing FS circles"
    )

    # Projection configuration
    pole_count: int = Field(default=17, description="Boundary pole candidates (k*pi/N)")
    pole_skip_angle: float = Field(
        default=0.02, description="Minimum distance between a pole and the link"
    )
    direction_count: int = Field(
        default=6, description="Planar projection directions tried per pole"
    )
    transversality_margin: float = Field(
        default=1e-9, description="Minimum sine of a crossing angle"
    )

    # Invariants
    bracket_cap: int = Field(
        default=24, description="Largest crossing count for the bracket state sum"
    )
    coloring_primes: str = Field(
        default="3,5,7", description="Primes used for Fox colorings (comma-separated)"
    )

    # Caching configuration
    cache_enabled: bool = Field(default=True, description="Enable result caching")
    cache_max_size: int = Field(default=256, description="Maximum cache entries")
    cache_ttl_seconds: int = Field(default=3600, description="Cache TTL in seconds")

    # Server configuration
    host: str = Field(default="0.0.0.0", description="Server host")
    port: int = Field(default=8080, description="Server port")

    # Observability configuration
    otel_enabled: bool = Field(default=False, description="Enable OpenTelemetry")
    tracing_enabled: bool = Field(default=False, description="Enable tracing")
    metrics_enabled: bool = Field(default=True, description="Enable metrics collection")

    @property
    def primes(self) -> List[int]:
        """Coloring primes as integers."""
        return [int(p) for p in self.coloring_primes.split(",") if p.strip()]

    @classmethod
    def from_env(cls, env_file: Optional[str] = None) -> "Settings":
        """Create settings from the environment (and an optional .env file)."""
        load_dotenv(env_file, override=False)

        env_overrides = {}

        # Unprefixed variables shared with the server deployment
        if os.getenv("HOST"):
            env_overrides["host"] = os.getenv("HOST")
        if os.getenv("PORT"):
            try:
                env_overrides["port"] = int(os.getenv("PORT"))
            except (ValueError, TypeError):
                pass
        if os.getenv("LOG_LEVEL"):
            env_overrides["log_level"] = os.getenv("LOG_LEVEL")

        for bool_field in [
            "cache_enabled",
            "otel_enabled",
            "tracing_enabled",
            "metrics_enabled",
        ]:
            env_key = f"ARR2KIRBY_{bool_field.upper()}"
            if os.getenv(env_key):
                env_overrides[bool_field] = os.getenv(env_key, "").lower() in (
                    "true",
                    "1",
                    "yes",
                    "on",
                )

        int_fields = [
            "lift_resolution",
            "max_resolution_doublings",
            "fs_density",
            "pole_count",
            "direction_count",
            "bracket_cap",
            "cache_max_size",
            "cache_ttl_seconds",
        ]
        for int_field in int_fields:
            env_key = f"ARR2KIRBY_{int_field.upper()}"
            if os.getenv(env_key):
                try:
                    env_overrides[int_field] = int(os.getenv(env_key))
                except (ValueError, TypeError):
                    pass

        try:
            return cls(**env_overrides)
        except Exception:
            # Fall back to defaults, keeping whatever parsed cleanly
            instance = cls.model_construct()
            for key, value in env_overrides.items():
                try:
                    setattr(instance, key, value)
                except Exception:
                    pass
            return instance

    def validate_configuration(self) -> bool:
        """Validate the current configuration."""
        issues = []

        if self.lift_resolution < 16:
            issues.append(f"Invalid lift resolution: {self.lift_resolution}")

        if self.max_resolution_doublings < 0:
            issues.append(
                f"Invalid resolution doublings: {self.max_resolution_doublings}"
            )

        if not (0 < self.separation_tolerance < 1):
            issues.append(f"Invalid separation tolerance: {self.separation_tolerance}")

        if not (0 < self.disk_margin < 1):
            issues.append(f"Invalid disk margin: {self.disk_margin}")

        if self.fs_density < 1:
            issues.append(f"Invalid FS density: {self.fs_density}")

        if self.pole_count < 1 or self.direction_count < 1:
            issues.append(
                f"Invalid projection candidates: {self.pole_count}x{self.direction_count}"
            )

        if self.bracket_cap < 0:
            issues.append(f"Invalid bracket cap: {self.bracket_cap}")

        try:
            primes = self.primes
        except ValueError:
            primes = []
            issues.append(f"Invalid coloring primes: {self.coloring_primes}")
        for p in primes:
            if p < 3 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
                issues.append(f"Coloring modulus is not an odd prime: {p}")

        if self.cache_max_size <= 0:
            issues.append(f"Invalid cache max size: {self.cache_max_size}")

        if self.cache_ttl_seconds <= 0:
            issues.append(f"Invalid cache TTL: {self.cache_ttl_seconds}")

        if not (1 <= self.port <= 65535):
            issues.append(f"Invalid port: {self.port}")

        if issues:
            raise ValueError(f"Configuration validation failed: {'; '.join(issues)}")

        return True


# Global settings instance
settings = Settings.from_env()
