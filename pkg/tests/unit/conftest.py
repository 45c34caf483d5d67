"""
Unit test configuration.

This conftest overrides the session-scoped CLI check from the parent
conftest (unit tests call the click group in-process) and isolates every
test from the user's scla configuration and environment.
"""

import pytest

from scla.sdk.timing import reset_call_stats


@pytest.fixture(scope="session", autouse=True)
def validate_test_environment():
    """
    Override parent's validate_test_environment to skip the subprocess check.

    Unit tests use CliRunner and an isolated config directory.
    """
    yield


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """
    Point SCLA_CONFIG_DIR at an empty temp directory.

    Returns the config directory; config.yaml inside it does not exist
    until a test writes it (so defaults apply).
    """
    config_dir = tmp_path / "scla-config"
    config_dir.mkdir()
    monkeypatch.setenv("SCLA_CONFIG_DIR", str(config_dir))
    monkeypatch.delenv("SCLA_CONFIG_FILE", raising=False)
    monkeypatch.delenv("SCLA_OUTPUT_DIR", raising=False)
    monkeypatch.delenv("LOG_LEVEL", raising=False)
    reset_call_stats()
    return config_dir
