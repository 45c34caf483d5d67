"""`scla sim` - seeded black-channel fault-injection runs."""

import logging
import os
from typing import List, Optional

import click
import yaml

from scla.sdk.exceptions import ScenarioError
from scla.sdk.sim import (
    SimReport,
    SweepPoint,
    estimate_residual_rate,
    load_scenario,
    log_axis,
    reports_to_csv,
    run_scenario,
    sweep,
)
from .decorators import exit_codes, output_options
from .output import (
    console,
    emit_text,
    fmt_float,
    new_table,
    print_call_stats,
    resolve_format,
    resolve_output_path,
    to_json,
)

logger = logging.getLogger(__name__)

SWEEP_SCHEMA = "scla/sim-sweep/v1"


@click.group()
def sim():
    """Black-channel simulation with the safety protocol in the loop."""
    pass


def render_report_human(report: SimReport, verbose: bool = False) -> None:
    data = report.to_dict()
    out = console()
    frames = data["frames"]
    out.print(f"[bold]{report.name}[/bold]  seeds {', '.join(str(s) for s in report.seeds)}  "
              f"exposure {report.horizon_hours:g} h at {report.rate_per_hour:g} frames/h")
    out.print("Frames: " + ", ".join(f"{k} {v}" for k, v in frames.items()))

    table = new_table("Class", "Injected", "Detected", "Undetected dangerous", "Harmless", title="Fault classes")
    for name, counts in data["classes"].items():
        table.add_row(name, str(counts["injected"]), str(counts["detected"]),
                      str(counts["undetected_dangerous"]), str(counts["harmless"]))
    out.print(table)

    verdicts = new_table("Verdict", "Count")
    for reason, count in data["verdicts"].items():
        if count:
            verdicts.add_row(reason, str(count))
    out.print(verdicts)

    rate = data["residual_rate"]
    out.print(f"Residual rate: {fmt_float(rate['value'])} /h  "
              f"[{fmt_float(rate['lower'])}, {fmt_float(rate['upper'])}] "
              f"({rate['method']}, {rate['confidence']:g})  from {report.dangerous_frames} dangerous frames")
    crc = data["crc"]
    out.print(f"CRC: {crc['escapes']} escapes of {crc['corrupted']} corrupted frames; "
              f"empirical P_ud {fmt_float(crc['empirical_p_ud']['value'])}, "
              f"analytic {fmt_float(crc['analytic_p_ud'])} at n={crc['frame_bits']}, "
              f"bep={crc['composed_bep']:g}")
    response = data["response_time_us"]
    if response["count"]:
        out.print(f"Response time [us]: min {response['min']}, median {response['median']}, "
                  f"p99 {response['p99']}, max {response['max']}; "
                  f"{response['within_bound']}/{response['count']} within {response['latency_bound_us']}")
    out.print(f"Safe-state events: {len(report.safe_state_events)}, roaming events: {len(report.roaming_events)}")
    if verbose:
        hops = new_table("Hop", *next(iter(data["hops"].values())).keys(), title="Hop ledger") if data["hops"] else None
        if hops is not None:
            for label, ledger in data["hops"].items():
                hops.add_row(label, *(str(v) for v in ledger.values()))
            out.print(hops)
        print_call_stats()
    for warning in report.warnings:
        out.print(f"[yellow]Warning:[/yellow] {warning}")


def _open_trace(trace: Optional[str]):
    path = resolve_output_path(trace)
    if path is None:
        return None
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="\n")


@sim.command('run')
@click.argument('scenario_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--seed', type=click.IntRange(0, 2**64 - 1), default=None, help='Override the scenario seed.')
@click.option('--batches', type=click.IntRange(min=1), default=1,
              help='Independent runs with seeds derived from the scenario seed, merged into one report.')
@click.option('--workers', type=click.IntRange(min=1), default=1, help='Worker processes for --batches.')
@click.option('--trace', default=None, help='Write an NDJSON event trace (single run only).')
@output_options
@click.pass_context
@exit_codes
def run(ctx, scenario_file, seed, batches, workers, trace, fmt, output):
    """Run SCENARIO_FILE and report what the safety layer detected.

    Exits 1 if the run's own conservation check fails.
    """
    scenario = load_scenario(scenario_file)
    if seed is not None:
        scenario = scenario.with_seed(seed)
    if trace and batches > 1:
        raise click.UsageError("--trace records a single run; drop --batches.")

    if batches > 1:
        estimate = estimate_residual_rate(scenario, batches, workers=workers)
        report = estimate.report
    else:
        handle = _open_trace(trace)
        try:
            report = run_scenario(scenario, handle)
        finally:
            if handle is not None:
                handle.close()

    fmt = resolve_format(fmt)
    if fmt == "json":
        emit_text(report.to_json(), output)
    elif fmt == "csv":
        emit_text(reports_to_csv([report.flat_row()]), output)
    else:
        render_report_human(report, verbose=ctx.obj.get("verbose", False) if ctx.obj else False)
    return report.conservation_ok()


def _parse_values(values: Optional[str]) -> List[object]:
    parsed = []
    for token in values.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            parsed.append(yaml.safe_load(token))
        except yaml.YAMLError:
            raise ScenarioError(f"Cannot read sweep value '{token}'.")
    if not parsed:
        raise ScenarioError("Sweep needs at least one value.")
    return parsed


def sweep_document(path: str, points: List[SweepPoint]) -> dict:
    return {
        "schema": SWEEP_SCHEMA,
        "parameter": path,
        "points": [point.to_dict() for point in points],
    }


@sim.command('sweep')
@click.argument('scenario_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--param', 'path', required=True, help="Scenario field to sweep, e.g. 'hops[0].bep'.")
@click.option('--values', default=None, help='Comma-separated values, e.g. 1e-4,1e-3,1e-2.')
@click.option('--log-range', nargs=3, type=(float, float, int), default=None,
              help='START STOP POINTS, log-spaced (e.g. 1e-4 0.5 5).')
@click.option('--seed', type=click.IntRange(0, 2**64 - 1), default=None, help='Override the scenario seed.')
@click.option('--workers', type=click.IntRange(min=1), default=lambda: min(4, os.cpu_count() or 1),
              show_default="min(4, cpus)", help='Sweep points run in parallel processes.')
@output_options
@exit_codes
def sweep_command(scenario_file, path, values, log_range, seed, workers, fmt, output):
    """Run SCENARIO_FILE once per value of one field, ordered by value.

    Point i uses the i-th seed derived from the scenario seed, so each point
    is reproducible on its own.
    """
    if (values is None) == (log_range is None):
        raise click.UsageError("Give exactly one of --values or --log-range.")
    scenario = load_scenario(scenario_file)
    if seed is not None:
        scenario = scenario.with_seed(seed)
    axis = _parse_values(values) if values is not None else log_axis(*log_range)
    points = sweep(scenario, path, axis, workers=workers)

    fmt = resolve_format(fmt)
    if fmt == "json":
        emit_text(to_json(sweep_document(path, points)), output)
    elif fmt == "csv":
        rows = []
        for point in points:
            row = {path: point.value}
            row.update(point.report.flat_row())
            rows.append(row)
        emit_text(reports_to_csv(rows), output)
    else:
        table = new_table(path, "Offered", "Accepted", "Dangerous", "Rate [1/h]", "Upper", "CRC escapes",
                          "Analytic P_ud", "Safe states", "Seed", title=f"Sweep of {path}")
        for point in points:
            data = point.report.to_dict()
            rate = data["residual_rate"]
            table.add_row(
                f"{point.value:g}" if isinstance(point.value, float) else str(point.value),
                str(data["frames"]["offered"]), str(data["frames"]["accepted"]),
                str(point.report.dangerous_frames), fmt_float(rate["value"]), fmt_float(rate["upper"]),
                f"{data['crc']['escapes']}/{data['crc']['corrupted']}", fmt_float(data["crc"]["analytic_p_ud"]),
                str(len(point.report.safe_state_events)), str(point.report.seeds[0]),
            )
        console().print(table)
    return all(point.report.conservation_ok() for point in points)
