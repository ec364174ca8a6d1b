"""
Oracle Command Implementation

Runs the Monte-Carlo stochastic transient ensemble and writes its
phase-noise spectrum in the same CSV schema as the closed-form methods.
Progress is reported on standard error.

Author: ILO PNoise Team
"""

from dataclasses import asdict
from typing import Optional

import click
from rich.console import Console
from rich.table import Table

from ...oracle.sde import diffusion_slope
from ...utils.exceptions import OracleError, PNoiseError
from ...writers import CSVArtifactWriter, JSONArtifactWriter
from ..config.loader import ConfigError
from ..formatting.progress import BatchProgressTracker, OperationType
from ..formatting.tables import SpectrumTable
from ..pipeline import PointAnalysis
from .common import command_config, console, parse_offset_option, report_error


def oracle_command(
    ctx: click.Context,
    point: Optional[str],
    seed: Optional[int],
    paths: Optional[int],
    periods: Optional[int],
    offsets: Optional[str],
    workers: Optional[int],
) -> None:
    """
    Execute the oracle command.

    Explicit --offsets are used as given and must be resolvable by the
    record; the configured grid is restricted to the resolvable band.

    Args:
        ctx: Click context
        point: Scenario point, or None for the base configuration
        seed: Generator seed
        paths: Number of paths
        periods: Recorded periods per path
        offsets: Offset grid 'min:max:ppd'
        workers: Worker processes
    """
    try:
        name, config, directory = command_config(
            ctx,
            point,
            **{
                "oracle.seed": seed,
                "oracle.n_paths": paths,
                "oracle.duration_periods": periods,
                "oracle.workers": workers,
            },
        )
        grid = parse_offset_option(offsets)
        analysis = PointAnalysis(config, name)
        tracker = BatchProgressTracker(
            console=Console(stderr=True),
            operation_type=OperationType.ORACLE,
            enabled=not ctx.obj.get("quiet"),
        )
        run, spectrum = analysis.oracle(grid, strict=grid is not None, progress=tracker)

        summary = dict(spectrum.metadata)
        try:
            summary["diffusion"] = asdict(diffusion_slope(run, config.oracle.block_periods))
        except OracleError as e:
            summary["diffusion"] = None
            summary["diffusion_error"] = str(e)
        summary["divergent_paths"] = run.n_diverged

        csv_path = CSVArtifactWriter().write(spectrum, directory / "spectrum_oracle.csv")
        json_path = JSONArtifactWriter().write(summary, directory / "oracle.json")

        if not ctx.obj.get("quiet"):
            table = Table(title="Monte-Carlo Oracle", show_header=False, box=None)
            table.add_column("Property", style="cyan", no_wrap=True)
            table.add_column("Value", style="bold white")
            table.add_row("Paths", f"{run.n_paths} ({run.n_diverged} diverged)")
            table.add_row("Record", f"{run.n_periods} periods, {run.T_total:.4e} s")
            table.add_row("Step", f"{run.dt:.4e} s ({run.scheme})")
            if summary["diffusion"]:
                d = summary["diffusion"]
                table.add_row("w0^2 c (ensemble)", f"{d['omega0_sq_c']:.4e} 1/s +- {100 * d['stderr']:.1f}%")
            console.print(table)
            console.print()
            console.print(SpectrumTable(console).create_spectrum_table({"oracle": spectrum}))
            console.print(f"[dim]Wrote {csv_path}[/dim]")
            console.print(f"[dim]Wrote {json_path}[/dim]")
    except (ConfigError, PNoiseError) as e:
        report_error(ctx, e)
