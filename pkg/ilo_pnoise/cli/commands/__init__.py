"""
CLI Commands Package

Command implementations behind the click subcommands: one module per
pipeline stage plus the full run and the scenario listing.

Author: ILO PNoise Team
"""

from .floquet import floquet_command
from .oracle import oracle_command
from .pss import pss_command
from .run import run_command
from .scenarios import scenarios_command
from .spectrum import spectrum_command

__all__ = [
    "floquet_command",
    "oracle_command",
    "pss_command",
    "run_command",
    "scenarios_command",
    "spectrum_command",
]
