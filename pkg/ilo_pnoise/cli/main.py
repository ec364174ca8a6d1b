"""
Main CLI Entry Point for ILO PNoise

Click group with the global configuration options and one subcommand per
pipeline stage. Every subcommand reads the run configuration selected by
--config or --scenario (or auto-discovered) and writes its artifacts to
<out>/<point>/.

Exit codes:
- 0 success
- 1 unexpected error
- 2 configuration error
- 3 analysis failure (solver, Floquet, spectrum, oracle, artifact write)
- 4 comparison gate failure
- 130 interrupted

Author: ILO PNoise Team
"""

import logging
import os
import sys
from typing import Optional

import click
from rich.console import Console

from ..utils.log_setup import configure_logging
from .commands.common import EXIT_CONFIG, EXIT_UNEXPECTED
from .commands.floquet import floquet_command
from .commands.oracle import oracle_command
from .commands.pss import pss_command
from .commands.run import run_command
from .commands.scenarios import scenarios_command
from .commands.spectrum import spectrum_command
from .config.loader import ConfigError, ConfigLoader

console = Console()
err_console = Console(stderr=True)

POINT_OPTION = click.option(
    "--point", default=None, help="Scenario point to analyze (default: the base configuration)"
)
FORMAT_OPTION = click.option(
    "--format", "output_format", type=click.Choice(["table", "json"]), default="table",
    help="Output format for results",
)


@click.group(invoke_without_command=True)
@click.option("--config", "-c", "config_path", type=click.Path(), help="Path to YAML run configuration")
@click.option("--scenario", "-s", help="Bundled scenario name (see 'scenarios')")
@click.option("--out", "-o", type=click.Path(file_okay=False), help="Artifact root directory")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose output")
@click.option("--quiet", "-q", is_flag=True, help="Suppress non-error output")
@click.option("--generate-config", is_flag=True, help="Print a documented configuration template")
@click.option("--validate-config", is_flag=True, help="Validate the configuration and exit")
@click.option("--show-config-locations", is_flag=True, help="Show configuration file search locations")
@click.version_option(package_name="ilo-pnoise", prog_name="ilo-pnoise")
@click.pass_context
def cli(
    ctx: click.Context,
    config_path: Optional[str],
    scenario: Optional[str],
    out: Optional[str],
    verbose: bool,
    quiet: bool,
    generate_config: bool,
    validate_config: bool,
    show_config_locations: bool,
) -> None:
    """
    ILO PNoise - phase noise of injection-locked oscillators

    Examples:
        ilo-pnoise scenarios                      # List bundled scenarios
        ilo-pnoise --scenario fig6 run            # Full pipeline of a scenario
        ilo-pnoise -c my.yaml spectrum --methods ilo-pmm,k-ilo
        ilo-pnoise --scenario fig4 --out out oracle --point pset1-a --paths 16
    """
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    ctx.obj["quiet"] = quiet
    ctx.obj["out"] = out

    loader = ConfigLoader()
    ctx.obj["config_loader"] = loader

    if show_config_locations:
        loader.show_config_locations()
        ctx.exit(0)

    if generate_config:
        from .config.templates import generate_config_template

        click.echo(generate_config_template())
        ctx.exit(0)

    if validate_config:
        target = config_path or loader.discover_config_file()
        if target is None and scenario is None:
            err_console.print("[red]No configuration file found to validate.[/red]")
            ctx.exit(EXIT_CONFIG)
        if target is not None:
            valid = loader.validate_config_file(target)
        else:
            try:
                loader.load_config(scenario=scenario)
                valid = True
            except ConfigError as e:
                err_console.print(f"[red]Configuration validation failed:[/red] {e}")
                valid = False
        if valid:
            console.print("[green]Configuration is valid.[/green]")
            ctx.exit(0)
        ctx.exit(EXIT_CONFIG)

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())
        ctx.exit(0)

    if ctx.invoked_subcommand == "scenarios":
        configure_logging("DEBUG" if verbose else "ERROR" if quiet else "WARNING", console=err_console)
        return

    try:
        run_config = loader.load_config(config_path, scenario)
    except ConfigError as e:
        err_console.print(f"[red]Configuration Error:[/red] {e}")
        ctx.exit(EXIT_CONFIG)

    log = run_config.logging
    level = "DEBUG" if verbose else "ERROR" if quiet else log.level
    configure_logging(level, log.file, log.max_size_mb, log.backup_count, console=err_console)
    ctx.obj["config"] = run_config
    ctx.obj["source"] = loader.source
    logging.getLogger(__name__).debug(f"Configuration loaded from {loader.source}")


@cli.command("pss")
@POINT_OPTION
@click.option("--samples", type=click.IntRange(min=16), help="Samples per period N_t")
@click.option("--harmonics", type=click.IntRange(min=1), help="Harmonic truncation N_h")
@click.pass_context
def pss(ctx: click.Context, point: Optional[str], samples: Optional[int], harmonics: Optional[int]) -> None:
    """Solve the periodic steady state; write pss.csv and harmonics.csv."""
    pss_command(ctx, point, samples, harmonics)


@cli.command("floquet")
@POINT_OPTION
@click.option("--modes", type=click.IntRange(min=1), help="Retained Floquet modes")
@click.pass_context
def floquet(ctx: click.Context, point: Optional[str], modes: Optional[int]) -> None:
    """Floquet exponents and vectors; write floquet.json and lambda.csv."""
    floquet_command(ctx, point, modes)


@cli.command("spectrum")
@POINT_OPTION
@click.option("--methods", help="Comma-separated methods: ilo-pmm, cosc-pmm, k-ilo, lorentzian, q-sinus")
@click.option("--offsets", help="Offset grid as min:max:ppd (Hz, Hz, points per decade)")
@click.option("--nu", type=click.IntRange(min=1), help="Carrier harmonic of the ensemble model")
@click.option("--rho-max", type=click.IntRange(min=0), help="Truncation of the rho sum")
@click.option("--p-max", type=click.IntRange(min=0), help="Truncation of the inner harmonic sums")
@FORMAT_OPTION
@click.pass_context
def spectrum(
    ctx: click.Context,
    point: Optional[str],
    methods: Optional[str],
    offsets: Optional[str],
    nu: Optional[int],
    rho_max: Optional[int],
    p_max: Optional[int],
    output_format: str,
) -> None:
    """Closed-form spectra; write spectrum_<method>.csv and diagnostics.json."""
    spectrum_command(ctx, point, methods, offsets, nu, rho_max, p_max, output_format)


@cli.command("oracle")
@POINT_OPTION
@click.option("--seed", type=click.IntRange(min=0), help="Generator seed")
@click.option("--paths", type=click.IntRange(min=1), help="Number of simulated paths")
@click.option("--periods", type=click.IntRange(min=16), help="Recorded periods per path")
@click.option("--offsets", help="Offset grid as min:max:ppd; must be resolvable by the record")
@click.option("--workers", type=click.IntRange(min=1), help="Worker processes")
@click.pass_context
def oracle(
    ctx: click.Context,
    point: Optional[str],
    seed: Optional[int],
    paths: Optional[int],
    periods: Optional[int],
    offsets: Optional[str],
    workers: Optional[int],
) -> None:
    """Monte-Carlo oracle; write spectrum_oracle.csv and oracle.json."""
    oracle_command(ctx, point, seed, paths, periods, offsets, workers)


@cli.command("run")
@click.option("--methods", help="Comma-separated methods overriding the configured list")
@click.option("--offsets", help="Offset grid as min:max:ppd")
@click.option("--seed", type=click.IntRange(min=0), help="Oracle seed")
@click.option("--oracle/--no-oracle", default=None, help="Force the oracle on or off")
@FORMAT_OPTION
@click.pass_context
def run(
    ctx: click.Context,
    methods: Optional[str],
    offsets: Optional[str],
    seed: Optional[int],
    oracle: Optional[bool],
    output_format: str,
) -> None:
    """Full pipeline over every scenario point."""
    run_command(ctx, methods, offsets, seed, oracle, output_format)


@cli.command("scenarios")
@FORMAT_OPTION
@click.pass_context
def scenarios(ctx: click.Context, output_format: str) -> None:
    """List bundled scenarios."""
    scenarios_command(ctx, output_format)


def main() -> None:
    """
    Main entry point for the ilo-pnoise console script.

    Unexpected exceptions exit with code 1; set ILO_PNOISE_DEBUG to see the
    traceback instead.
    """
    try:
        cli(obj={})
    except KeyboardInterrupt:
        err_console.print("\n[yellow]Operation cancelled by user.[/yellow]")
        sys.exit(130)
    except Exception as e:
        if os.environ.get("ILO_PNOISE_DEBUG"):
            raise
        err_console.print(f"[red]Error:[/red] {e}")
        sys.exit(EXIT_UNEXPECTED)


if __name__ == "__main__":
    main()
