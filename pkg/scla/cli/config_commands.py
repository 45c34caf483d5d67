import re

import click
import yaml

from scla.sdk import config

# Define the schema of allowed configuration keys and their allowed values
ALLOWED_CONFIG = {
    "analysis.default_bep": {"type": float, "min": 0.0, "max": 0.5, "exclusive_min": True},
    "analysis.n_min": {"type": int, "min": 1},
    "analysis.n_max": {"type": int, "min": 1},
    "budget.share": {"type": float, "min": 0.0, "max": 1.0, "exclusive_min": True},
    "output.format": {"type": str, "allowed_values": ["human", "json", "csv"]},
    "output.dir": {"type": str},
}

# sil_targets.<1-4>: target PFH per hour
_SIL_KEY = re.compile(r"^sil_targets\.([1-4])$")
_SIL_SCHEMA = {"type": float, "min": 0.0, "exclusive_min": True}


def _schema_for(key: str):
    if key in ALLOWED_CONFIG:
        return ALLOWED_CONFIG[key]
    if _SIL_KEY.match(key):
        return _SIL_SCHEMA
    return None


def _convert(key: str, value: str, key_schema: dict):
    if "allowed_values" in key_schema and value not in key_schema["allowed_values"]:
        allowed = ", ".join(f"'{v}'" for v in key_schema["allowed_values"])
        raise click.UsageError(f"Invalid value '{value}' for key '{key}'. Allowed values are: {allowed}.")
    kind = key_schema["type"]
    if kind is str:
        return value
    try:
        converted = kind(value)
    except ValueError:
        raise click.UsageError(f"Value for '{key}' must be {'an integer' if kind is int else 'a number'}.")
    low = key_schema.get("min")
    if low is not None and (converted < low or (key_schema.get("exclusive_min") and converted == low)):
        bound = ">" if key_schema.get("exclusive_min") else ">="
        raise click.UsageError(f"Value for '{key}' must be {bound} {low}.")
    high = key_schema.get("max")
    if high is not None and converted > high:
        raise click.UsageError(f"Value for '{key}' must be <= {high}.")
    return converted


@click.group()
def config_group():
    """Commands for managing scla configuration."""
    pass


@config_group.command('view')
def view_config():
    """Displays the current scla configuration."""
    config_data = config.load_config()
    click.echo(yaml.dump(config_data, default_flow_style=False))


@config_group.command('set')
@click.argument('key')
@click.argument('value')
def set_config(key, value):
    """
    Sets a configuration value for a supported key.

    \b
    Supported Keys:
      - analysis.default_bep: BEP of the application, in (0, 0.5].
      - analysis.n_min / analysis.n_max: codeword length range in bits.
      - budget.share: share of the PFH granted to communication, in (0, 1].
      - output.format: 'human', 'json' or 'csv'.
      - output.dir: default directory for written reports.
      - sil_targets.<1-4>: target PFH per hour for that SIL.

    \b
    Examples:
      scla config set budget.share 0.01
      scla config set sil_targets.2 1e-6
    """
    key_schema = _schema_for(key)
    if key_schema is None:
        raise click.UsageError(f"Configuration key '{key}' is not supported.")
    converted = _convert(key, value, key_schema)

    if key in ("analysis.n_min", "analysis.n_max"):
        n_min = converted if key == "analysis.n_min" else config.get_config_value("analysis.n_min", 1)
        n_max = converted if key == "analysis.n_max" else config.get_config_value("analysis.n_max", 64)
        if n_min > n_max:
            raise click.UsageError(f"analysis.n_min ({n_min}) must not exceed analysis.n_max ({n_max}).")

    config.set_config_value(key, converted)
    click.echo(f"✓ Set '{key}' to: {converted}")
