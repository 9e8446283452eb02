#!/usr/bin/env python3
"""
Tests for lib/settings.py
"""

import os
from unittest.mock import patch

import pytest

from lib.settings import Settings


class TestSettings:
    """Test cases for the Settings class."""

    def test_default_settings(self):
        """Test default settings values."""
        with patch.dict(os.environ, {}, clear=True):
            settings = Settings()

        assert settings.log_level == "INFO"
        assert settings.lift_resolution == 64
        assert settings.max_resolution_doublings == 4
        assert settings.separation_tolerance == 1e-6
        assert settings.disk_margin == 0.1
        assert settings.fs_density == 8
        assert settings.pole_count == 17
        assert settings.pole_skip_angle == 0.02
        assert settings.direction_count == 6
        assert settings.bracket_cap == 24
        assert settings.coloring_primes == "3,5,7"
        assert settings.cache_enabled is True
        assert settings.cache_max_size == 256
        assert settings.cache_ttl_seconds == 3600
        assert settings.host == "0.0.0.0"
        assert settings.port == 8080
        assert settings.otel_enabled is False
        assert settings.metrics_enabled is True

    def test_custom_settings(self):
        """Test settings with custom values."""
        settings = Settings(
            lift_resolution=32,
            bracket_cap=12,
            coloring_primes="3,11",
            cache_enabled=False,
            port=9000,
        )

        assert settings.lift_resolution == 32
        assert settings.bracket_cap == 12
        assert settings.primes == [3, 11]
        assert settings.cache_enabled is False
        assert settings.port == 9000

    def test_primes_ignore_blanks(self):
        """Test the primes list skips empty entries."""
        assert Settings(coloring_primes="3, 5,").primes == [3, 5]

    def test_from_env_server_variables(self):
        """Test Settings.from_env() reads HOST, PORT and LOG_LEVEL."""
        with patch.dict(
            os.environ,
            {"HOST": "127.0.0.1", "PORT": "9100", "LOG_LEVEL": "DEBUG"},
        ):
            settings = Settings.from_env()

        assert settings.host == "127.0.0.1"
        assert settings.port == 9100
        assert settings.log_level == "DEBUG"

    def test_from_env_prefixed_variables(self):
        """Test Settings.from_env() with ARR2KIRBY_ prefixed variables."""
        with patch.dict(
            os.environ,
            {
                "ARR2KIRBY_LIFT_RESOLUTION": "128",
                "ARR2KIRBY_POLE_COUNT": "9",
                "ARR2KIRBY_BRACKET_CAP": "16",
                "ARR2KIRBY_CACHE_ENABLED": "false",
                "ARR2KIRBY_METRICS_ENABLED": "false",
            },
        ):
            settings = Settings.from_env()

        assert settings.lift_resolution == 128
        assert settings.pole_count == 9
        assert settings.bracket_cap == 16
        assert settings.cache_enabled is False
        assert settings.metrics_enabled is False

    @pytest.mark.parametrize(
        "value,expected",
        [
            ("true", True),
            ("1", True),
            ("yes", True),
            ("on", True),
            ("false", False),
            ("0", False),
            ("off", False),
            ("invalid", False),
        ],
    )
    def test_from_env_with_bool_variations(self, value, expected):
        """Test Settings.from_env() with various boolean string formats."""
        with patch.dict(os.environ, {"ARR2KIRBY_OTEL_ENABLED": value}):
            assert Settings.from_env().otel_enabled is expected

    def test_from_env_with_invalid_int_conversion(self):
        """Test invalid integers keep their defaults."""
        with patch.dict(
            os.environ,
            {"PORT": "invalid", "ARR2KIRBY_FS_DENSITY": "many"},
            clear=True,
        ):
            settings = Settings.from_env()

        assert settings.port == 8080
        assert settings.fs_density == 8

    def test_validate_configuration_success(self):
        """Test validate_configuration with valid settings."""
        assert Settings().validate_configuration() is True

    @pytest.mark.parametrize(
        "overrides,message",
        [
            ({"lift_resolution": 8}, "Invalid lift resolution: 8"),
            ({"max_resolution_doublings": -1}, "Invalid resolution doublings: -1"),
            ({"separation_tolerance": 0.0}, "Invalid separation tolerance: 0.0"),
            ({"disk_margin": 1.0}, "Invalid disk margin: 1.0"),
            ({"fs_density": 0}, "Invalid FS density: 0"),
            ({"direction_count": 0}, "Invalid projection candidates: 17x0"),
            ({"bracket_cap": -1}, "Invalid bracket cap: -1"),
            ({"coloring_primes": "3,4"}, "Coloring modulus is not an odd prime: 4"),
            ({"coloring_primes": "2"}, "Coloring modulus is not an odd prime: 2"),
            ({"coloring_primes": "three"}, "Invalid coloring primes: three"),
            ({"cache_max_size": 0}, "Invalid cache max size: 0"),
            ({"cache_ttl_seconds": -1}, "Invalid cache TTL: -1"),
            ({"port": 0}, "Invalid port: 0"),
            ({"port": 70000}, "Invalid port: 70000"),
        ],
    )
    def test_validate_configuration_failures(self, overrides, message):
        """Test each rejected setting is named in the error."""
        with pytest.raises(ValueError, match="Configuration validation failed") as exc_info:
            Settings(**overrides).validate_configuration()
        assert message in str(exc_info.value)

    def test_validate_configuration_multiple_errors(self):
        """Test all problems are reported together."""
        with pytest.raises(ValueError) as exc_info:
            Settings(lift_resolution=8, port=0, bracket_cap=-1).validate_configuration()

        error_message = str(exc_info.value)
        assert "Invalid lift resolution: 8" in error_message
        assert "Invalid port: 0" in error_message
        assert "Invalid bracket cap: -1" in error_message

    def test_prefixed_environment(self, mock_settings):
        """Test pydantic reads ARR2KIRBY_ variables on construction."""
        settings = Settings()

        assert settings.lift_resolution == 32
        assert settings.bracket_cap == 16
        assert settings.log_level == "DEBUG"

    def test_global_settings_instance(self):
        """Test that the global settings instance is created correctly."""
        from lib.settings import settings

        assert isinstance(settings, Settings)
        assert settings.port == 8080

    def test_pydantic_model_config(self):
        """Test Pydantic model configuration."""
        config = Settings().model_config

        assert config["env_prefix"] == "ARR2KIRBY_"
        assert config["case_sensitive"] is False
        assert config["validate_assignment"] is True
        assert config["extra"] == "ignore"

    def test_field_descriptions(self):
        """Test that fields have proper descriptions."""
        fields = Settings.model_fields

        assert "Server port" in str(fields["port"].description)
        assert "bracket" in str(fields["bracket_cap"].description)
        assert "Fox colorings" in str(fields["coloring_primes"].description)
