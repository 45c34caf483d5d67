"""CLI decorators: the exit-code contract and the shared output options."""

import logging
import sys
from functools import wraps

import click

from scla.sdk.exceptions import (
    AccountingError,
    CapabilityError,
    RoamingError,
    SCLAError,
    ValidationError,
)
from .output import FORMATS

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_CAPABILITY = 3


def exit_codes(f):
    """Map the command result and SCLA exceptions onto the stable exit codes.

    0 pass, 1 analysis fail, 2 input error, 3 capability error. A command
    signals an analysis failure by returning False.
    """
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            result = f(*args, **kwargs)
        except (ValidationError, RoamingError) as e:
            click.secho(f"Error: {e}", fg="red", err=True)
            sys.exit(EXIT_INPUT)
        except CapabilityError as e:
            click.secho(f"Error: {e}", fg="red", err=True)
            sys.exit(EXIT_CAPABILITY)
        except AccountingError as e:
            logger.critical(f"Scoring invariant violated: {e}", exc_info=True)
            sys.exit(EXIT_FAIL)
        except SCLAError as e:
            click.secho(f"Error: {e}", fg="red", err=True)
            sys.exit(EXIT_FAIL)
        if result is False:
            sys.exit(EXIT_FAIL)
        return result
    return decorated_function


def output_options(f):
    """--format / --output, shared by every command that emits a report."""
    f = click.option('--output', '-o', 'output', default=None,
                     help='Write the report to this file (relative paths go to SCLA_OUTPUT_DIR).')(f)
    f = click.option('--format', 'fmt', type=click.Choice(FORMATS), default=None,
                     help="Output format (default: 'output.format' from config, else human).")(f)
    return f
