"""`scla rer` - residual error rate of the safety communication layer."""

import logging
from typing import Any, Dict, Optional

import click
import yaml
from click_option_group import MutuallyExclusiveOptionGroup, optgroup

from scla.sdk.config import get_config_value, get_sil_target
from scla.sdk.crc import find_catalog_entry, parse_polynomial, properness_check
from scla.sdk.exceptions import DomainError, ParameterError, ScenarioError, UnauditableInputError
from scla.sdk.rer import (
    DEFAULT_SHARE,
    SYMBOLS,
    RerBreakdown,
    ResidualProbability,
    SafetyParameters,
    SilBudget,
    lambda_scl,
    per_second_to_per_hour,
    sil_budget_check,
)
from .decorators import exit_codes, output_options
from .output import console, emit_text, fmt_float, new_table, print_call_stats, resolve_format, to_json

logger = logging.getLogger(__name__)

# CLI option destination -> symbol
FLAG_SYMBOLS = {
    "la": "LA",
    "lt": "LT",
    "lr": "LR",
    "crc_bits": "r",
    "w": "w",
    "v": "v",
    "m": "m",
    "rt": "R_T",
    "rm": "R_M",
    "rpu": "RP_U",
    "rp_fscp_t": "RP_FSCP_T",
    "rp_fscp_i": "RP_FSCP_I",
    "bep": "BEP",
}


def _help(symbol: str) -> str:
    return f"{symbol}: {SYMBOLS[symbol][1]}."


@click.group()
def rer():
    """Residual error rate calculus (lambda_SCL) and the SIL budget rule."""
    pass


def load_parameter_file(path: str) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ScenarioError(f"Invalid YAML in parameter file{where}: {e}")
    if not isinstance(data, dict):
        raise ParameterError("A parameter file must map symbols to values.")
    return data


def resolve_rp_i(params: SafetyParameters, file_rp_i: Optional[dict], rpi: Optional[float],
                 rpi_conservative: bool, polynomial: Optional[str], n_min: Optional[int],
                 n_max: Optional[int], reference: str) -> ResidualProbability:
    """RP_I from exactly one source; none given is an unauditable input."""
    if rpi is not None:
        return ResidualProbability.asserted(rpi, reference)
    if rpi_conservative:
        return ResidualProbability.conservative_limit(params.r)
    if polynomial is not None:
        entry = find_catalog_entry(polynomial)
        poly = entry.polynomial if entry is not None else parse_polynomial(polynomial)
        if poly.degree != params.r:
            raise ParameterError(f"Polynomial degree {poly.degree} does not match r = {params.r}.", ["r"])
        n_min = n_min if n_min is not None else get_config_value("analysis.n_min", 1)
        n_max = n_max if n_max is not None else get_config_value("analysis.n_max", 64)
        bep = params.bep if params.bep > 0 else None
        report = properness_check(poly, int(n_min), int(n_max),
                                  get_config_value("analysis.bep_grid"), bep)
        for warning in report.warnings:
            logger.warning(warning)
        return ResidualProbability.from_report(report)
    if file_rp_i is not None:
        if not isinstance(file_rp_i, dict):
            raise UnauditableInputError("RP_I in a parameter file needs 'value' and 'provenance'.")
        return ResidualProbability.from_dict(file_rp_i)
    raise UnauditableInputError(
        "No RP_I source: give --polynomial (analytic), --rpi VALUE or --rpi-conservative (asserted)."
    )


def render_rer_human(breakdown: RerBreakdown, budget: Optional[SilBudget], verbose: bool = False) -> None:
    out = console()
    table = new_table("Component", "Rate [1/h]", "Formula", title="Residual error rate")
    for component in (breakdown.rr_a, breakdown.rr_t, breakdown.rr_m, breakdown.rr_i):
        table.add_row(component.name, fmt_float(component.value), component.formula)
    out.print(table)
    out.print(f"lambda_SCL = {fmt_float(breakdown.lambda_scl)} /h  (m = {breakdown.params.m})")
    out.print(f"RP_I = {fmt_float(breakdown.rp_i.value)} ({breakdown.rp_i.provenance})")
    if breakdown.params.r_t is None:
        out.print("R_T assumed in the worst case to v")
    for warning in breakdown.warnings:
        out.print(f"[yellow]Warning:[/yellow] {warning}")
    if budget is not None:
        sil = f"SIL {budget.sil}, " if budget.sil is not None else ""
        out.print(f"Budget: {sil}PFH {budget.target_pfh:g}/h x share {budget.share:g} "
                  f"= limit {fmt_float(budget.limit)} /h")
        margin = "infinite" if budget.margin == float("inf") else f"{budget.margin:.3g}"
        color = "green" if budget.passed else "red"
        out.print(f"Verdict: [{color}]{budget.verdict.upper()}[/{color}] (margin {margin})")
    if verbose:
        print_call_stats()


def rer_csv(breakdown: RerBreakdown, budget: Optional[SilBudget]) -> str:
    row = {symbol: value for symbol, value in breakdown.params.to_dict().items()}
    row.update({
        "RP_I": breakdown.rp_i.value,
        "RP_I_provenance": breakdown.rp_i.provenance,
        "RR_A": breakdown.rr_a.value,
        "RR_T": breakdown.rr_t.value,
        "RR_M": breakdown.rr_m.value,
        "RR_I": breakdown.rr_i.value,
        "lambda_scl": breakdown.lambda_scl,
    })
    if budget is not None:
        row.update({"target_pfh": budget.target_pfh, "share": budget.share,
                    "limit": budget.limit, "verdict": budget.verdict})
    return ",".join(row) + "\n" + ",".join(str(v) for v in row.values()) + "\n"


@rer.command('compute')
@click.option('--params', 'params_file', type=click.Path(exists=True, dir_okay=False),
              help='YAML/JSON file keyed by symbol (LA, LT, r, w, v, m, ...); flags override it.')
@optgroup.group('Code lengths')
@optgroup.option('--la', type=int, help=_help("LA"))
@optgroup.option('--lt', type=int, help=_help("LT"))
@optgroup.option('--lr', type=int, help=_help("LR"))
@optgroup.option('--crc-bits', type=int, help=_help("r"))
@optgroup.group('Traffic')
@optgroup.option('--w', type=int, help=_help("w"))
@optgroup.option('--v', type=float, help=_help("v"))
@optgroup.option('--v-per-second', is_flag=True, help='Read --v as messages per second (x 3600).')
@optgroup.option('--m', type=int, help=_help("m"))
@optgroup.option('--rt', type=float, help=_help("R_T"))
@optgroup.option('--rm', type=float, help=_help("R_M"))
@optgroup.group('Additional measures')
@optgroup.option('--rpu', type=float, help=_help("RP_U"))
@optgroup.option('--rp-fscp-t', type=float, help=_help("RP_FSCP_T"))
@optgroup.option('--rp-fscp-i', type=float, help=_help("RP_FSCP_I"))
@optgroup.option('--bep', type=float, help=_help("BEP") + " Default 1e-2.")
@optgroup.group('RP_I source', cls=MutuallyExclusiveOptionGroup)
@optgroup.option('--polynomial', help='Analytic: worst-case P_ud of this polynomial over the length range.')
@optgroup.option('--rpi', type=float, help='Asserted RP_I value.')
@optgroup.option('--rpi-conservative', is_flag=True, help='Asserted RP_I = 2^-r (proper CRC).')
@optgroup.group('RP_I options')
@optgroup.option('--rpi-reference', default="", help='Where an asserted RP_I comes from.')
@optgroup.option('--n-min', type=int, help="Length range start for --polynomial (config 'analysis.n_min').")
@optgroup.option('--n-max', type=int, help="Length range end for --polynomial (config 'analysis.n_max').")
@optgroup.group('Budget')
@optgroup.option('--pfh', type=float, help='Target PFH of the safety function per hour (e.g. 1e-7).')
@optgroup.option('--sil', type=click.IntRange(1, 4), help="Look the PFH up in config 'sil_targets'.")
@optgroup.option('--share', type=float, help="Share of the PFH granted to communication (config 'budget.share').")
@output_options
@click.pass_context
@exit_codes
def compute(ctx, params_file, v_per_second, polynomial, rpi, rpi_conservative, rpi_reference, n_min, n_max,
            pfh, sil, share, fmt, output, **symbols):
    """Compute RR_A, RR_T, RR_M, RR_I and lambda_SCL, and check the SIL budget.

    \b
    lambda_SCL = (RR_T + RR_A + RR_M + RR_I) * m, all rates per hour:
      RR_A = 0
      RR_T = 2^-LT * w * R_T * RP_FSCP_T        (R_T defaults to v)
      RR_M = 2^-LA * 2^-LT * w * 2^-r * RP_U * 2^-LR * R_M
      RR_I = RP_I * v * RP_FSCP_I

    \b
    Exits 0 on pass (or with no budget), 1 when lambda_SCL exceeds the limit.

    \b
    Example (SIL 3, PFH 1e-7/h, share 1% -> limit 1e-9/h):
      scla rer compute --la 16 --lt 16 --crc-bits 16 --w 1 --v 3600 --m 1 \\
          --rpi-conservative --pfh 1e-7
    """
    data = load_parameter_file(params_file) if params_file else {}
    file_rp_i = data.pop("RP_I", None)
    for dest, symbol in FLAG_SYMBOLS.items():
        value = symbols.get(dest)
        if value is not None:
            data[symbol] = value
    if v_per_second and data.get("v") is not None:
        data["v"] = per_second_to_per_hour(float(data["v"]))
    params = SafetyParameters.from_dict(data)

    rp_i = resolve_rp_i(params, file_rp_i, rpi, rpi_conservative, polynomial, n_min, n_max, rpi_reference)
    breakdown = lambda_scl(params, rp_i)
    breakdown.verify()

    budget = None
    if sil is not None and pfh is None:
        pfh = get_sil_target(sil)
        if pfh is None:
            raise DomainError(f"No target PFH configured for SIL {sil}; set 'sil_targets.{sil}' or give --pfh.")
    if pfh is not None:
        share = share if share is not None else get_config_value("budget.share", DEFAULT_SHARE)
        budget = sil_budget_check(breakdown, pfh, float(share), sil)

    fmt = resolve_format(fmt)
    if fmt == "json":
        emit_text(to_json({"breakdown": breakdown.to_dict(),
                           "budget": budget.to_dict() if budget is not None else None}), output)
    elif fmt == "csv":
        emit_text(rer_csv(breakdown, budget), output)
    else:
        render_rer_human(breakdown, budget, verbose=ctx.obj.get("verbose", False) if ctx.obj else False)
    return budget.passed if budget is not None else True
