"""
PSS Command Implementation

Solves the periodic steady state of the configured circuit and writes the
waveform and its harmonics.

Author: ILO PNoise Team
"""

import logging
from typing import Optional

import click

from ...core.circuits import check_jacobian
from ...utils.exceptions import PNoiseError
from ..config.loader import ConfigError
from ..formatting.tables import SteadyStateTable
from ..pipeline import PointAnalysis, write_pss_artifacts
from .common import command_config, console, report_error

logger = logging.getLogger(__name__)


def pss_command(ctx: click.Context, point: Optional[str], samples: Optional[int],
                harmonics: Optional[int]) -> None:
    """
    Execute the pss command.

    Args:
        ctx: Click context
        point: Scenario point, or None for the base configuration
        samples: Override of samples per period
        harmonics: Override of the harmonic truncation
    """
    try:
        name, config, directory = command_config(
            ctx, point, **{"solver.n_samples": samples, "solver.n_harmonics": harmonics}
        )
        analysis = PointAnalysis(config, name)
        pss = analysis.pss
        if ctx.obj.get("verbose"):
            error = check_jacobian(analysis.model, pss.x0)
            logger.debug(f"Jacobian check at the anchor state: {error:.2e}")
        paths = write_pss_artifacts(analysis, directory)

        if not ctx.obj.get("quiet"):
            tables = SteadyStateTable(console)
            console.print(tables.create_summary_table(pss, analysis.harmonics()))
            console.print()
            console.print(tables.create_state_table(pss))
            for path in paths:
                console.print(f"[dim]Wrote {path}[/dim]")
    except (ConfigError, PNoiseError) as e:
        report_error(ctx, e)
