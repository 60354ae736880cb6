"""
Command Line Interface for hyperdyn
"""
import json
import logging
from typing import Optional

import click
import pandas as pd
from rich import box
from rich.console import Console
from rich.table import Table

from hyperdyn.config import (
    OUTPUT_FORMATS,
    QUERY_PROPERTIES,
    ExperimentConfig,
    Settings,
    parse_target,
)
from hyperdyn.core.family import MapFamily, apply_budget
from hyperdyn.core.serialization import dump_system, load_system
from hyperdyn.entropy import LOG_BASES, OpenCover, entropy_series, separated_entropy
from hyperdyn.hyperspace import as_hyper_system
from hyperdyn.runner import QUERY_PARAMS, ExperimentRunner
from hyperdyn.suites import repro as run_repro
from hyperdyn.utils import (
    ReportWriter,
    ResourceError,
    ValidationError,
    clean_label,
    format_rational,
    setup_logging,
    validate_horizon,
    validate_path,
    validate_positive_int,
    validate_positive_rational,
)
from hyperdyn.zoo import SystemRecipe

console = Console()
err_console = Console(stderr=True)
logger = logging.getLogger(__name__)

STATUS_COLORS = {"Holds": "green", "Fails": "red", "Inconclusive": "yellow"}


def _fail(kind: str, error: Exception):
    err_console.print(f"[red]✗ {kind}: {error}[/red]")
    logger.error(f"{kind}: {error}")
    raise click.Abort()


def _load_family(ctx, system: Optional[str], recipe: Optional[str], target: Optional[str] = None) -> MapFamily:
    """Build the system named by --system or --recipe, lifted when --target is lifted:M."""
    budget = ctx.obj['settings'].budget
    if bool(system) == bool(recipe):
        raise ValidationError("give exactly one of --system PATH or --recipe JSON")
    if system:
        family = load_system(system)
    else:
        try:
            data = json.loads(recipe)
        except json.JSONDecodeError as e:
            raise ValidationError(f"--recipe is not valid JSON: {e}")
        family = SystemRecipe.from_dict(data, field_name="--recipe").build(budget=budget, field_name="--recipe")
    family = apply_budget(family, budget)
    m = parse_target(target, field_name="--target")
    if m is not None:
        family = as_hyper_system(family, m, budget=budget)
    return family


def _system_options(f):
    f = click.option('--recipe', help='Zoo recipe as JSON, e.g. \'{"kind": "full_shift", "length": 4}\'')(f)
    f = click.option('--system', type=click.Path(), help='Path to a system description file')(f)
    return f


@click.group()
@click.option('--env-file', type=click.Path(exists=True), help='Path to .env file')
@click.option('--log-level', default=None, help='Logging level (default: HYPERDYN_LOG_LEVEL or INFO)')
@click.option('--log-file', default=None, help='JSON log file (default: HYPERDYN_LOG_FILE)')
@click.pass_context
def main(ctx, env_file, log_level, log_file):
    """hyperdyn - Non-autonomous dynamics on finite spaces and their hyperspace lifts"""
    ctx.ensure_object(dict)

    try:
        settings = Settings(env_file)
    except ValidationError as e:
        _fail("Configuration Error", e)
    ctx.obj['settings'] = settings

    setup_logging(log_level or settings.log_level, log_file or settings.log_file)


@main.command()
@click.option('--config', 'config_path', type=click.Path(), help='Experiment config to validate')
@_system_options
@click.pass_context
def validate(ctx, config_path, system, recipe):
    """Validate an experiment config or a system description"""
    settings = ctx.obj['settings']
    try:
        if config_path:
            config = ExperimentConfig.from_file(config_path, base_budget=settings.budget)
            runner = ExperimentRunner(config)
            family = runner.build()
        else:
            family = _load_family(ctx, system, recipe)
    except ValidationError as e:
        _fail("Validation Error", e)
    except ResourceError as e:
        _fail("Resource Error", e)

    trace = family.trace
    table = Table(title=f"System {family.name}", box=box.ROUNDED)
    table.add_column("Item", style="cyan")
    table.add_column("Value", justify="right")
    rows = [
        ("Points", family.space.size),
        ("Minimal opens", len(family.space.minimal_opens)),
        ("Maps (period)", family.period),
        ("Commutative", family.commutative),
        ("Preperiod", trace.preperiod),
        ("Cycle", trace.cycle),
        ("Min positive distance", format_rational(family.space.min_positive_distance or 0)),
    ]
    for item, value in rows:
        table.add_row(item, str(value))
    console.print(table)
    console.print("[green]✓ Valid[/green]")


@main.command()
@_system_options
@click.option('--target', default='base', help='base or lifted:M')
@click.option('--point', 'points', multiple=True, help='Point id to follow (repeatable; default: all)')
@click.option('--steps', default=8, show_default=True, help='Last time n to print')
@click.pass_context
def orbit(ctx, system, recipe, target, points, steps):
    """Print omega_n trajectories"""
    try:
        family = _load_family(ctx, system, recipe, target)
        steps = validate_positive_int(steps, field_name="--steps", minimum=0)
        indices = family.space.indices(points) if points else range(family.space.size)
    except ValidationError as e:
        _fail("Validation Error", e)
    except ResourceError as e:
        _fail("Resource Error", e)

    table = Table(title=f"Orbits under {family.name}", box=box.ROUNDED)
    table.add_column("x", style="cyan")
    for n in range(steps + 1):
        table.add_column(f"n={n}", justify="right")
    for x in indices:
        row = [family.space.points[x]]
        for n in range(steps + 1):
            row.append(family.space.points[int(family.trace.table(n)[x])])
        table.add_row(*row)
    console.print(table)


@main.command()
@_system_options
@click.option('-m', '--max-cardinality', 'm', default=2, show_default=True, help='Largest set size M')
@click.option('--output', required=True, type=click.Path(), help='Where to write the lifted system')
@click.pass_context
def lift(ctx, system, recipe, m, output):
    """Export the induced system on sets of size <= M"""
    try:
        family = _load_family(ctx, system, recipe, target=f"lifted:{m}")
        path = dump_system(family, output)
    except ValidationError as e:
        _fail("Validation Error", e)
    except ResourceError as e:
        _fail("Resource Error", e)
    console.print(f"[green]✓ Wrote {family.name} ({family.space.size} points) to {path}[/green]")


def _print_records(target: Console, records):
    table = Table(title="Query Results", box=box.ROUNDED)
    table.add_column("#", justify="right")
    table.add_column("Property", style="cyan")
    table.add_column("Target")
    table.add_column("Status")
    table.add_column("Exact")
    table.add_column("Horizon", justify="right")
    for record in records:
        kind = record["record_type"]
        if kind == "verdict":
            status = record["status"]
            color = STATUS_COLORS.get(status, "white")
            status = f"[{color}]{status}[/{color}]"
        elif kind == "series":
            status = "[cyan]series[/cyan]"
        else:
            status = f"[red]{kind}[/red]"
        table.add_row(
            str(record["index"]),
            record["property"],
            record["target"],
            status,
            str(record.get("exact", "")),
            str(record.get("horizon", "")),
        )
    target.print(table)


def _command_line_config(properties, system, recipe, horizon, delta):
    """Experiment config dict for `check PROPERTY... --system/--recipe`."""
    if not properties:
        raise ValidationError("name at least one property or give --config")
    if bool(system) == bool(recipe):
        raise ValidationError("give exactly one of --system PATH or --recipe JSON")
    source = {"file": system} if system else {"recipe": json.loads(recipe)}
    horizon = validate_horizon(horizon, field_name="--horizon")
    if delta is not None:
        delta = format_rational(validate_positive_rational(delta, field_name="--delta"))
    queries = []
    for name in properties:
        if name not in QUERY_PROPERTIES:
            raise ValidationError(
                f"unknown property '{clean_label(name)}' (expected one of {', '.join(QUERY_PROPERTIES)})"
            )
        accepted = QUERY_PARAMS[name]
        params = {}
        if horizon is not None and "horizon" in accepted:
            params["horizon"] = horizon
        if delta is not None:
            for key in ("delta", "epsilon"):
                if key in accepted:
                    params[key] = delta
        queries.append({"property": name, "params": params})
    return {"system": source, "queries": queries}


def _apply_log_base(data, log_base):
    """Set log_base on every query whose property takes one."""
    for query in data.get("queries") or []:
        if not isinstance(query, dict) or not isinstance(query.get("property"), str):
            continue
        if "log_base" in QUERY_PARAMS.get(query["property"], ()):
            query["params"] = {**(query.get("params") or {}), "log_base": log_base}


@main.command()
@click.argument('properties', nargs=-1)
@click.option('--config', 'config_path', type=click.Path(), help='Experiment config file')
@_system_options
@click.option('--target', default=None, help='base or lifted:M (overrides the config)')
@click.option('--horizon', type=int, default=None, help='Last time to examine')
@click.option('--delta', default=None, help='Threshold as an exact rational, e.g. 1/4')
@click.option('--log-base', type=click.Choice(LOG_BASES), default=None,
              help='Logarithm base of entropy values (overrides the config)')
@click.option('--workers', type=int, default=None, help='Concurrent queries')
@click.option('--output', type=click.Path(), default=None, help='Report path (default: stdout)')
@click.option('--format', 'fmt', type=click.Choice(OUTPUT_FORMATS), default=None, help='Report format')
@click.pass_context
def check(ctx, properties, config_path, system, recipe, target, horizon, delta, log_base, workers,
          output, fmt):
    """Run property queries from a config or from the command line"""
    settings = ctx.obj['settings']
    try:
        if config_path:
            path = validate_path(config_path, must_exist=True, field_name="--config")
            with open(path, "r") as f:
                data = json.load(f)
            if not isinstance(data, dict):
                raise ValidationError("config must be a JSON object")
        else:
            data = _command_line_config(properties, system, recipe, horizon, delta)
        if target is not None:
            data["target"] = target
        if log_base is not None:
            _apply_log_base(data, log_base)
        data.setdefault("workers", settings.workers)
        if workers is not None:
            data["workers"] = workers
        if output is not None or fmt is not None:
            section = dict(data.get("output") or {})
            if output is not None:
                section["path"] = output
            if fmt is not None:
                section["format"] = fmt
            data["output"] = section
        config = ExperimentConfig.from_dict(data, base_budget=settings.budget)
        writer = ReportWriter(config.output.path, fmt=config.output.format,
                              include_hash_chain=config.output.hash_chain)
        result = ExperimentRunner(config).execute(writer=writer)
    except json.JSONDecodeError as e:
        _fail("Validation Error", f"invalid JSON: {e}")
    except ValidationError as e:
        _fail("Validation Error", e)

    if result.report_path:
        _print_records(console, result.records)
        console.print(f"[green]✓ Report written to {result.report_path}[/green]")
    else:
        _print_records(err_console, result.records)
        click.echo(writer.render(), nl=False)
    ctx.exit(result.exit_code)


@main.command()
@_system_options
@click.option('--target', default='base', help='base or lifted:M')
@click.option('--kind', type=click.Choice(["cover", "separated"]), default="cover", show_default=True)
@click.option('--k-max', default=6, show_default=True, help='Number of terms')
@click.option('--epsilon', default=None, help='Separation threshold for --kind separated')
@click.option('--cover', 'cover_json', default=None, help='Cover as JSON list of point-id lists (default: minimal opens)')
@click.option('--log-base', type=click.Choice(LOG_BASES), default="e", show_default=True)
@click.option('--output', type=click.Path(), default=None, help='CSV path for the series')
@click.pass_context
def entropy(ctx, system, recipe, target, kind, k_max, epsilon, cover_json, log_base, output):
    """Compute an entropy series"""
    budget = ctx.obj['settings'].budget
    try:
        family = _load_family(ctx, system, recipe, target)
        if kind == "cover":
            cover = (OpenCover.from_ids(family.space, json.loads(cover_json)) if cover_json
                     else OpenCover.from_opens(family.space).check())
            series = entropy_series(family, cover, k_max, budget=budget)
        else:
            if epsilon is None:
                raise ValidationError("--epsilon is required for --kind separated")
            series = separated_entropy(family, epsilon, k_max, budget=budget)
    except json.JSONDecodeError as e:
        _fail("Validation Error", f"--cover is not valid JSON: {e}")
    except ValidationError as e:
        _fail("Validation Error", e)
    except ResourceError as e:
        err_console.print(f"[yellow]⚠ Resource limit reached: {e}[/yellow]")
        series = e.partial
        if series is None:
            raise click.Abort()

    frame = series.to_frame(log_base)
    table = Table(title=f"{series.kind} entropy of {family.name} (log base {log_base})", box=box.ROUNDED)
    for column in frame.columns:
        table.add_column(column, justify="right")
    for row in frame.itertuples(index=False):
        table.add_row(str(row[0]), str(row[1]), f"{row[2]:.6f}", f"{row[3]:.6f}")
    console.print(table)
    summary = series.summary(log_base)
    console.print(f"limsup estimate over the last {summary['window']} terms: "
                  f"[bold]{summary['limsup_estimate']:.6f}[/bold]")
    if output:
        path = validate_path(output, field_name="--output")
        frame.to_csv(path, index=False)
        console.print(f"[green]✓ Series written to {path}[/green]")


@main.command()
@click.argument('suite')
@click.option('--output', type=click.Path(), default=None, help='CSV path for the summary table')
@click.pass_context
def repro(ctx, suite, output):
    """Run a reproduction suite (or 'all')"""
    budget = ctx.obj['settings'].budget
    try:
        frame = run_repro(suite, budget=budget)
    except ValidationError as e:
        _fail("Validation Error", e)
    except ResourceError as e:
        _fail("Resource Error", e)

    table = Table(title=f"Suite {suite}", box=box.ROUNDED)
    for column in frame.columns:
        table.add_column(column)
    for row in frame.itertuples(index=False):
        cells = [str(v) for v in row]
        color = "green" if row[-1] else "red"
        cells[-1] = f"[{color}]{row[-1]}[/{color}]"
        table.add_row(*cells)
    console.print(table)

    if output:
        path = validate_path(output, field_name="--output")
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False)
        console.print(f"[green]✓ Summary written to {path}[/green]")
    passed = int(frame["pass"].sum())
    console.print(f"{passed}/{len(frame)} rows passed")
    ctx.exit(0 if passed == len(frame) else 1)


@main.command('export-plotdata')
@_system_options
@click.option('--target', default='base', help='base or lifted:M')
@click.option('--kind', type=click.Choice(["diameter", "distance"]), required=True)
@click.option('--steps', default=16, show_default=True, help='Last time n')
@click.option('--output', type=click.Path(), required=True, help='CSV path')
@click.pass_context
def export_plotdata(ctx, system, recipe, target, kind, steps, output):
    """Write diameter or distance sequences as plot-ready CSV"""
    try:
        family = _load_family(ctx, system, recipe, target)
        steps = validate_positive_int(steps, field_name="--steps", minimum=0)
        path = validate_path(output, field_name="--output")
    except ValidationError as e:
        _fail("Validation Error", e)
    except ResourceError as e:
        _fail("Resource Error", e)

    space = family.space
    rows = []
    for n in range(steps + 1):
        table = family.trace.table(n)
        if kind == "diameter":
            for open_set in space.minimal_opens:
                diameter = space.diameter(table[list(open_set.members)])
                rows.append({"n": n, "open": open_set.name, "diameter": float(diameter),
                             "exact": format_rational(diameter)})
        else:
            for x in range(space.size):
                for y in range(x + 1, space.size):
                    d = space.distance(int(table[x]), int(table[y]))
                    rows.append({"n": n, "x": space.points[x], "y": space.points[y],
                                 "distance": float(d), "exact": format_rational(d)})
    frame = pd.DataFrame(rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    console.print(f"[green]✓ Wrote {len(frame)} rows to {path}[/green]")


if __name__ == '__main__':
    main()
