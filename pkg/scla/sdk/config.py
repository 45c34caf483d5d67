"""Configuration management for SCLA.

Handles loading and saving YAML configuration from ~/.config/scla/.
"""

import copy
import os
import yaml
import logging
from pathlib import Path
from typing import Any, List, Optional, Union

logger = logging.getLogger(__name__)


def get_config_dir() -> Path:
    """Get the configuration directory path."""
    env_path = os.getenv("SCLA_CONFIG_DIR")
    if env_path:
        return Path(env_path)
    return Path.home() / ".config" / "scla"


def get_config_file_path() -> Path:
    """
    Get the path to the config file, respecting the SCLA_CONFIG_FILE env var.
    """
    env_path = os.getenv("SCLA_CONFIG_FILE")
    if env_path:
        return Path(env_path)
    return get_config_dir() / "config.yaml"


DEFAULT_CONFIG = {
    "analysis": {
        "default_bep": 1e-2,
        "bep_grid": [1e-4, 1e-3, 1e-2, 0.1, 0.25, 0.5],
        "n_min": 1,
        "n_max": 64,
    },
    "budget": {
        "share": 0.01,
    },
    "output": {
        "format": "human",
        "dir": None,
    },
    # SIL -> PFH table is user data; only the SIL 3 example is pre-filled.
    "sil_targets": {
        3: 1e-7,
    },
}


def load_config() -> dict:
    """Load the scla configuration from the config file."""
    config_file = get_config_file_path()
    if not config_file.exists():
        logger.debug(f"Config file not found at {config_file}, using default config.")
        return copy.deepcopy(DEFAULT_CONFIG)

    try:
        with open(config_file, 'r') as f:
            config = yaml.safe_load(f)
            if config is None:
                return copy.deepcopy(DEFAULT_CONFIG)
            return _deep_merge(copy.deepcopy(DEFAULT_CONFIG), config)
    except yaml.YAMLError as e:
        logger.error(f"Error loading config file {config_file}: {e}")
        return copy.deepcopy(DEFAULT_CONFIG)
    except Exception as e:
        logger.error(f"An unexpected error occurred while loading config: {e}")
        return copy.deepcopy(DEFAULT_CONFIG)


def save_config(config_data: dict):
    """Save the scla configuration to the config file."""
    config_file = get_config_file_path()
    config_file.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(config_file, 'w') as f:
            yaml.safe_dump(config_data, f, default_flow_style=False)
        logger.debug(f"Configuration saved to {config_file}")
    except Exception as e:
        logger.error(f"Error saving config file {config_file}: {e}")


def _key_path(key: str) -> List[Union[str, int]]:
    """Split a dotted key; numeric parts address integer keys such as SIL levels."""
    return [int(k) if k.isdigit() else k for k in key.split('.')]


def get_config_value(key: str, default: Any = None) -> Any:
    """Retrieve a configuration value using a dot-separated key."""
    value: Any = load_config()
    for k in _key_path(key):
        if not isinstance(value, dict):
            return default
        if k in value:
            value = value[k]
        elif str(k) in value:
            value = value[str(k)]
        else:
            return default
    return value


def set_config_value(key: str, value: Any):
    """Set a configuration value using a dot-separated key and save."""
    config_data = load_config()
    *parents, last = _key_path(key)
    node = config_data
    for k in parents:
        if not isinstance(node.get(k), dict):
            node[k] = {}
        node = node[k]
    node[last] = value
    save_config(config_data)


def get_output_dir() -> Optional[Path]:
    """Default directory for written reports.

    SCLA_OUTPUT_DIR wins over `output.dir` from the config file.
    """
    env_path = os.getenv("SCLA_OUTPUT_DIR")
    if env_path:
        return Path(env_path)
    configured = get_config_value("output.dir")
    return Path(configured) if configured else None


def get_sil_target(sil: int) -> Optional[float]:
    """Look up the target PFH for a SIL in the configured table."""
    table = get_config_value("sil_targets", {}) or {}
    value = table.get(sil, table.get(str(sil)))
    return float(value) if value is not None else None


def _deep_merge(base: dict, new: dict) -> dict:
    """Recursively merge dictionary `new` into `base`."""
    for k, v in new.items():
        if k in base and isinstance(base[k], dict) and isinstance(v, dict):
            base[k] = _deep_merge(base[k], v)
        else:
            base[k] = v
    return base
