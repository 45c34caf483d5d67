"""Report emission shared by the analysis commands.

Human, JSON and CSV renderings are all produced from the same report
object; the command decides only which one is written and where.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import click
from rich.console import Console
from rich.table import Table

from scla.sdk.config import get_config_value, get_output_dir
from scla.sdk.timing import get_call_stats

logger = logging.getLogger(__name__)

FORMATS = ("human", "json", "csv")


def resolve_format(fmt: Optional[str]) -> str:
    """Explicit --format wins, then `output.format` from config, then human."""
    if fmt:
        return fmt
    configured = get_config_value("output.format", "human")
    if configured not in FORMATS:
        logger.warning(f"Ignoring unknown output.format '{configured}' in config")
        return "human"
    return configured


def to_json(document: Dict[str, Any]) -> str:
    return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"


def resolve_output_path(output: Optional[str]) -> Optional[Path]:
    """Relative paths land in SCLA_OUTPUT_DIR (or `output.dir`) when one is set."""
    if not output:
        return None
    path = Path(output)
    if path.is_absolute():
        return path
    base = get_output_dir()
    return base / path if base else path


def emit_text(text: str, output: Optional[str]) -> None:
    path = resolve_output_path(output)
    if path is None:
        click.echo(text, nl=False)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")
    click.echo(f"✓ Wrote {path}", err=True)


def console() -> Console:
    # rich writes through click's stdout so CliRunner captures it
    return Console(file=click.get_text_stream("stdout"), highlight=False, soft_wrap=True)


def new_table(*columns: str, title: Optional[str] = None) -> Table:
    table = Table(show_header=True, header_style="bold magenta", title=title)
    for i, name in enumerate(columns):
        table.add_column(name, justify="left" if i == 0 else "right")
    return table


def fmt_float(value: Optional[float], digits: int = 4) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}e}" if value != 0 else "0"


def print_call_stats() -> None:
    """Timing table for -v human output."""
    stats = get_call_stats()
    if not stats:
        return
    table = new_table("Function", "Calls", "Seconds", title="Timing")
    for name, entry in sorted(stats.items()):
        table.add_row(name, str(entry["calls"]), f"{entry['seconds']:.3f}")
    console().print(table)
