"""
Scenarios Command Implementation

Lists the bundled scenario configurations.

Author: ILO PNoise Team
"""

import json

import click

from ..config.loader import list_scenarios
from ..formatting.tables import ScenarioTable
from .common import console


def scenarios_command(ctx: click.Context, output_format: str) -> None:
    """
    Execute the scenarios command.

    Args:
        ctx: Click context
        output_format: table or json
    """
    scenarios = list_scenarios()
    if output_format == "json":
        click.echo(json.dumps(scenarios, indent=2))
        return
    console.print(ScenarioTable(console).create_scenarios_table(scenarios))
    console.print()
    console.print("[dim]Usage: ilo-pnoise --scenario <name> run[/dim]")
