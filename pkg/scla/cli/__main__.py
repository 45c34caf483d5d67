"""SCLA CLI - Command-line interface for the Safety Communication Layer Analyzer."""

import logging
import os
import sys

import click
from dotenv import load_dotenv

from scla import __version__

from .config_commands import config_group as config_module
from .crc_commands import crc as crc_module
from .rer_commands import rer as rer_module
from .sim_commands import sim as sim_module


# Configure logging at the application level; stderr keeps stdout clean for JSON/CSV
if not logging.root.handlers:
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
    logging.basicConfig(level=getattr(logging, LOG_LEVEL, logging.INFO), stream=sys.stderr,
                        format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


@click.group()
@click.version_option(__version__, prog_name="scla")
@click.option('-v', '--verbose', is_flag=True, help='Debug logging and timing tables.')
@click.option('-q', '--quiet', is_flag=True, help='Only log errors.')
@click.pass_context
def scla(ctx, verbose, quiet):
    """Safety Communication Layer Analyzer (SCLA) CLI.

    Residual error rates after IEC 61784-3, CRC properness over the binary
    symmetric channel, and seeded black-channel simulation of a safety
    protocol with roaming cells.

    \b
    Exit codes: 0 pass, 1 analysis fail, 2 input error, 3 capability error.
    """
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    root = logging.getLogger()
    if verbose:
        root.setLevel(logging.DEBUG)
    elif quiet:
        root.setLevel(logging.ERROR)
    elif "LOG_LEVEL" not in os.environ:
        # analysis output is the report; INFO chatter only with -v
        root.setLevel(logging.WARNING)


scla.add_command(crc_module, name='crc')
scla.add_command(rer_module, name='rer')
scla.add_command(sim_module, name='sim')
scla.add_command(config_module, name='config')


def main():
    """Entry point for the CLI."""
    load_dotenv()
    scla()


if __name__ == "__main__":
    main()
