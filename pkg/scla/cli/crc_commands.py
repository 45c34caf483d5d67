"""`scla crc` - CRC computation, residual-error analysis and the catalog."""

import logging
from typing import Optional, Tuple

import click
import yaml

from scla.sdk.config import get_config_value
from scla.sdk.crc import (
    CrcConfig,
    GeneratorPolynomial,
    PropernessReport,
    crc_compute,
    find_catalog_entry,
    load_catalog,
    parse_polynomial,
    properness_check,
    weight_distribution,
)
from scla.sdk.exceptions import DomainError, ScenarioError
from scla.sdk.schemas import validation_errors
from .decorators import exit_codes, output_options
from .output import (
    console,
    emit_text,
    fmt_float,
    new_table,
    print_call_stats,
    resolve_format,
    to_json,
)

logger = logging.getLogger(__name__)


@click.group()
def crc():
    """CRC residual-error analysis (binary symmetric channel)."""
    pass


def _load_analysis_file(path: str) -> Tuple[dict, int]:
    """Read an analysis file; returns the mapping and the polynomial's line number."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
        data = yaml.safe_load(text) or {}
        node = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ScenarioError(f"Invalid YAML{where}: {e}")
    if not isinstance(data, dict):
        raise ScenarioError("An analysis file must be a mapping.")
    line = 1
    if node is not None and isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            if key.value == "polynomial":
                line = value.start_mark.line + 1
    return data, line


def _catalog_or_parse(text: str, line: int = 1) -> Tuple[GeneratorPolynomial, Optional[CrcConfig]]:
    entry = find_catalog_entry(text.strip()) if isinstance(text, str) else None
    if entry is not None:
        return entry.polynomial, CrcConfig.from_catalog(entry)
    return parse_polynomial(text, line), None


def render_properness_human(report: PropernessReport, verbose: bool = False) -> None:
    out = console()
    r = report.polynomial.degree
    table = new_table("BEP", "max P_ud", "at n", f"<= 2^-{r}",
                      title=f"{report.polynomial.to_text()}, n in [{report.n_min}, {report.n_max}]")
    for p in report.bep_grid:
        curve = report.curves[p]
        worst = max(curve)
        n_at = report.n_min + curve.index(worst)
        ok = worst <= report.limit * (1 + 1e-12)
        table.add_row(f"{p:g}", fmt_float(worst), str(n_at), "[green]yes[/green]" if ok else "[red]no[/red]")
    out.print(table)
    out.print(f"Conservative limit 2^-{r} = {fmt_float(report.limit)}")
    verdict = "[green]proper[/green]" if report.proper else "[red]NOT proper[/red]"
    out.print(f"Verdict over the grid: {verdict} (worst P_ud {fmt_float(report.worst_rp_i)} "
              f"at n={report.worst_n}, p={report.worst_p:g})")
    if report.configured_bep is not None:
        cfg = "proper" if report.proper_at_configured_bep else "NOT proper"
        out.print(f"At configured BEP {report.configured_bep:g}: {cfg} "
                  f"(RP_I = {fmt_float(report.worst_rp_i_at_configured_bep)})")
    for warning in report.warnings:
        out.print(f"[yellow]Warning:[/yellow] {warning}")
    if verbose:
        print_call_stats()


def properness_csv(report: PropernessReport) -> str:
    """One row per length, one column per BEP."""
    lines = ["n," + ",".join(f"p={p:g}" for p in report.bep_grid)]
    for offset, n in enumerate(report.lengths):
        lines.append(f"{n}," + ",".join(repr(report.curves[p][offset]) for p in report.bep_grid))
    return "\n".join(lines) + "\n"


@crc.command('analyze')
@click.argument('polynomial', required=False)
@click.option('--file', 'file_path', type=click.Path(exists=True, dir_okay=False),
              help='YAML file with polynomial, n_min, n_max, bep_grid and configured_bep.')
@click.option('--n-min', type=int, default=None, help="Shortest codeword length in bits (config 'analysis.n_min').")
@click.option('--n-max', type=int, default=None, help="Longest codeword length in bits (config 'analysis.n_max').")
@click.option('--bep', 'bep_grid', type=float, multiple=True,
              help="BEP grid value; repeat for several (config 'analysis.bep_grid').")
@click.option('--configured-bep', type=float, default=None,
              help="BEP of the application, added to the grid (config 'analysis.default_bep', 1e-2).")
@output_options
@click.pass_context
@exit_codes
def analyze(ctx, polynomial, file_path, n_min, n_max, bep_grid, configured_bep, fmt, output):
    """Properness of a generator polynomial: P_ud(n, p) against 2^-r.

    POLYNOMIAL is 'r=<degree>, <mask>' (e.g. 'r=16, 0x1021') or a catalog
    name (see 'scla crc catalog'). n counts every bit of the codeword,
    protected data plus signature. Exits 0 when proper, 1 when not.
    """
    data, line = ({}, 1)
    if file_path:
        data, line = _load_analysis_file(file_path)
    text = polynomial if polynomial is not None else data.get("polynomial")
    if text is None:
        raise click.UsageError("Give a POLYNOMIAL argument or a --file with a 'polynomial' entry.")
    poly, _ = _catalog_or_parse(str(text), line if polynomial is None else 1)

    n_min = n_min if n_min is not None else data.get("n_min", get_config_value("analysis.n_min", 1))
    n_max = n_max if n_max is not None else data.get("n_max", get_config_value("analysis.n_max", 64))
    grid = list(bep_grid) or data.get("bep_grid") or get_config_value("analysis.bep_grid")
    if configured_bep is None:
        configured_bep = data.get("configured_bep", get_config_value("analysis.default_bep", 1e-2))

    logger.debug(f"Analyzing {poly} over n in [{n_min}, {n_max}], grid {grid}")
    report = properness_check(poly, int(n_min), int(n_max), grid, configured_bep)

    fmt = resolve_format(fmt)
    if fmt == "json":
        document = report.to_dict()
        errors = validation_errors(document, "properness-report")
        if errors:
            logger.error(f"Properness report does not match its schema: {errors[:3]}")
        emit_text(to_json(document), output)
    elif fmt == "csv":
        emit_text(properness_csv(report), output)
    else:
        render_properness_human(report, verbose=ctx.obj.get("verbose", False) if ctx.obj else False)
    return report.proper


@crc.command('weights')
@click.argument('polynomial')
@click.argument('length', type=int)
@output_options
@exit_codes
def weights(polynomial, length, fmt, output):
    """Weight distribution A_w of undetected error patterns of LENGTH bits (LENGTH <= 24)."""
    poly, _ = _catalog_or_parse(polynomial)
    counts = weight_distribution(poly, length)
    fmt = resolve_format(fmt)
    if fmt == "json":
        emit_text(to_json({"polynomial": poly.to_text(), "n": length,
                           "weights": {str(w): c for w, c in enumerate(counts) if c}}), output)
    elif fmt == "csv":
        emit_text("w,A_w\n" + "".join(f"{w},{c}\n" for w, c in enumerate(counts)), output)
    else:
        table = new_table("w", "A_w", title=f"{poly.to_text()}, n = {length}")
        for w, c in enumerate(counts):
            if c:
                table.add_row(str(w), str(c))
        console().print(table)
        d_min = next((w for w, c in enumerate(counts) if c), None)
        console().print(f"Minimum distance: {d_min if d_min is not None else f'> {length}'}")


@crc.command('compute')
@click.argument('name')
@click.argument('data')
@exit_codes
def compute(name, data):
    """Checksum of hex DATA with catalog CRC NAME (e.g. CRC-16/XMODEM 313233)."""
    entry = find_catalog_entry(name)
    if entry is None:
        raise DomainError(f"Unknown catalog CRC '{name}'. See 'scla crc catalog'.")
    try:
        message = bytes.fromhex(data)
    except ValueError:
        raise DomainError(f"DATA must be hex, got '{data}'.")
    value = crc_compute(CrcConfig.from_catalog(entry), message)
    width = (entry.polynomial.degree + 3) // 4
    click.echo(f"0x{value:0{width}x}")


@crc.command('catalog')
@output_options
def catalog(fmt, output):
    """List the named CRC variants shipped with scla."""
    entries = sorted(load_catalog().values(), key=lambda e: (e.polynomial.degree, e.name))
    fmt = resolve_format(fmt)
    if fmt == "json":
        emit_text(to_json({"crcs": [
            {"name": e.name, **CrcConfig.from_catalog(e).to_dict(),
             "check": None if e.check is None else f"0x{e.check:x}", "note": e.note}
            for e in entries
        ]}), output)
        return
    if fmt == "csv":
        rows = ["name,width,poly,init,refin,refout,xorout,check"]
        for e in entries:
            check = "" if e.check is None else f"0x{e.check:x}"
            rows.append(f"{e.name},{e.polynomial.degree},0x{e.polynomial.coefficients:x},0x{e.init:x},"
                        f"{e.reflect_in},{e.reflect_out},0x{e.xor_out:x},{check}")
        emit_text("\n".join(rows) + "\n", output)
        return
    table = new_table("Name", "r", "Poly", "Init", "RefIn", "RefOut", "XorOut", "Check", title="CRC catalog")
    for e in entries:
        table.add_row(e.name, str(e.polynomial.degree), f"0x{e.polynomial.coefficients:x}", f"0x{e.init:x}",
                      str(e.reflect_in), str(e.reflect_out), f"0x{e.xor_out:x}",
                      "-" if e.check is None else f"0x{e.check:x}")
    console().print(table)
