"""
Test configuration and fixtures for scla integration tests.

This module provides:
- Sample sizes and tolerances from tests/test-config.yaml
- CLI availability check before the integration suite runs
- CLI runner fixture executing `python -m scla.cli` in a subprocess
- Scenario file factory shared by unit and integration tests

The statistical integration tests (Monte Carlo vs analytic, channel
composition) take their frame counts from test-config.yaml so a quick
local run and the full acceptance run differ only in configuration.
"""

import sys
import pytest
import subprocess
import json
import os
import yaml
from typing import Dict, Any, List, Optional
from pathlib import Path


# Path to test configuration file
TEST_CONFIG_FILE = Path(__file__).parent / "test-config.yaml"

PROJECT_ROOT = Path(__file__).resolve().parent.parent

DEFAULT_TEST_CONFIG = {
    "sizes": {
        "monte_carlo_frames": 1_000_000,
        "composition_frames": 1_000_000,
        "property_runs": 100_000,
        "rer_corpus": 1000,
    },
    "tolerance": {
        "sigmas": 4.0,
        "relative": 1e-12,
    },
}


def load_test_config() -> Dict[str, Any]:
    """Load test configuration from tests/test-config.yaml, over the defaults."""
    config = json.loads(json.dumps(DEFAULT_TEST_CONFIG))
    if not TEST_CONFIG_FILE.exists():
        return config

    with open(TEST_CONFIG_FILE, 'r') as f:
        loaded = yaml.safe_load(f) or {}

    for section, values in loaded.items():
        if isinstance(values, dict):
            config.setdefault(section, {}).update(values)
        else:
            config[section] = values
    return config


def check_cli_available() -> Dict[str, Any]:
    """
    Check that `python -m scla.cli --help` runs.

    Returns:
        Dict with:
            - ready: bool
            - error: error message (if any)
    """
    try:
        result = subprocess.run(
            [sys.executable, "-m", "scla.cli", "--help"],
            capture_output=True,
            text=True,
            timeout=30,
            cwd=str(PROJECT_ROOT)
        )
    except Exception as e:
        return {"ready": False, "error": str(e)}
    if result.returncode != 0:
        return {"ready": False, "error": result.stderr}
    return {"ready": True, "error": None}


@pytest.fixture(scope="session", autouse=True)
def validate_test_environment():
    """
    Validate that the test environment is properly configured.

    This fixture runs once at the start of the test session and verifies
    the CLI is installed and importable. Prints the active sample sizes.
    """
    status = check_cli_available()
    if not status["ready"]:
        pytest.exit(
            f"scla CLI not properly installed. Run 'pip install -e .[dev]' first.\n"
            f"Error: {status['error']}",
            returncode=1
        )

    sizes = load_test_config()["sizes"]
    print(f"\n✓ scla CLI available")
    print(f"✓ Sample sizes: {sizes}")
    yield


@pytest.fixture(scope="session")
def test_config() -> Dict[str, Any]:
    """Sizes and tolerances for the statistical tests."""
    return load_test_config()


@pytest.fixture(scope="session")
def sizes(test_config) -> Dict[str, int]:
    return test_config["sizes"]


@pytest.fixture(scope="session")
def sigmas(test_config) -> float:
    return float(test_config["tolerance"]["sigmas"])


@pytest.fixture
def scenario_file(tmp_path):
    """
    Factory writing a scenario document to a YAML file.

    Usage:
        path = scenario_file({"seed": 1, "traffic": {...}, "hops": [{}]})
    """
    counter = {"n": 0}

    def write(document: Dict[str, Any], name: Optional[str] = None) -> Path:
        counter["n"] += 1
        path = tmp_path / (name or f"scenario-{counter['n']}.yaml")
        with open(path, "w") as f:
            yaml.safe_dump(document, f, sort_keys=False)
        return path

    return write


@pytest.fixture(scope="session")
def cli_runner():
    """
    Factory fixture that executes CLI commands via subprocess.

    Returns:
        Callable that takes command args and returns parsed result dict:
            - returncode: int (0 pass, 1 fail, 2 input error, 3 capability error)
            - stdout: str (raw output)
            - stderr: str (error output)
            - json: dict/list (parsed JSON if valid, None otherwise)

    Usage:
        result = cli_runner(["rer", "compute", "--params", path, "--format", "json"])
        breakdown = result["json"]["breakdown"]
        assert result["returncode"] == 0
    """

    def run_command(command_args: List[str], timeout: int = 300) -> Dict[str, Any]:
        """Execute a scla CLI command and return parsed result."""
        env = dict(os.environ)
        env.pop("LOG_LEVEL", None)
        try:
            result = subprocess.run(
                [sys.executable, "-m", "scla.cli"] + [str(a) for a in command_args],
                capture_output=True,
                text=True,
                timeout=timeout,
                cwd=str(PROJECT_ROOT),
                env=env,
            )

            json_data = None
            if result.stdout.strip():
                try:
                    json_data = json.loads(result.stdout)
                except json.JSONDecodeError:
                    json_data = None

            return {
                "returncode": result.returncode,
                "stdout": result.stdout,
                "stderr": result.stderr,
                "json": json_data
            }

        except subprocess.TimeoutExpired:
            return {
                "returncode": 124,
                "stdout": "",
                "stderr": "Command timed out",
                "json": None
            }
        except Exception as e:
            return {
                "returncode": -1,
                "stdout": "",
                "stderr": str(e),
                "json": None
            }

    return run_command


# Session-level marker definitions
def pytest_configure(config):
    """Register custom pytest markers."""
    config.addinivalue_line(
        "markers", "integration: mark test as an integration test"
    )
    config.addinivalue_line(
        "markers", "slow: long-running statistical test (sizes from test-config.yaml)"
    )
