"""
Floquet Command Implementation

Computes Floquet exponents, the phase-diffusion constant and the Lambda
waveforms of the configured circuit.

Author: ILO PNoise Team
"""

from typing import Optional

import click

from ...utils.exceptions import PNoiseError
from ..config.loader import ConfigError
from ..formatting.tables import FloquetTable
from ..pipeline import PointAnalysis, write_floquet_artifacts
from .common import command_config, console, report_error


def floquet_command(ctx: click.Context, point: Optional[str], modes: Optional[int]) -> None:
    """
    Execute the floquet command.

    Args:
        ctx: Click context
        point: Scenario point, or None for the base configuration
        modes: Override of the retained modes
    """
    try:
        name, config, directory = command_config(ctx, point, **{"solver.n_modes": modes})
        analysis = PointAnalysis(config, name)
        decomp, _ = analysis.floquet
        paths = write_floquet_artifacts(analysis, directory)

        if not ctx.obj.get("quiet"):
            tables = FloquetTable(console)
            console.print(tables.create_exponent_table(decomp))
            console.print()
            console.print(tables.create_checks_table(decomp))
            for path in paths:
                console.print(f"[dim]Wrote {path}[/dim]")
    except (ConfigError, PNoiseError) as e:
        report_error(ctx, e)
