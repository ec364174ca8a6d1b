"""
Run Command Implementation

Runs the full pipeline over every point of the configuration and writes
the artifact bundle of each point.

Author: ILO PNoise Team
"""

import json
from pathlib import Path
from typing import Optional

import click
from rich.console import Console

from ...utils.exceptions import ComparisonThresholdError, PNoiseError
from ...writers import to_jsonable
from ..config.loader import ConfigError
from ..formatting.progress import BatchProgressTracker, OperationType
from ..formatting.tables import ScenarioTable, SpectrumTable
from ..pipeline import PhaseNoisePipeline
from .common import console, parse_methods, parse_offset_option, report_error


def run_command(
    ctx: click.Context,
    methods: Optional[str],
    offsets: Optional[str],
    seed: Optional[int],
    oracle: Optional[bool],
    output_format: str,
) -> None:
    """
    Execute the run command.

    Args:
        ctx: Click context
        methods: Comma-separated methods overriding every point's list
        offsets: Offset grid 'min:max:ppd' overriding the configured grid
        seed: Oracle seed
        oracle: Force the oracle on or off (configured per point if None)
        output_format: table or json
    """
    config = ctx.obj["config"]
    tracker = BatchProgressTracker(
        console=Console(stderr=True),
        operation_type=OperationType.ORACLE,
        enabled=not ctx.obj.get("quiet"),
    )
    pipeline = PhaseNoisePipeline(
        config,
        output_dir=Path(ctx.obj["out"]) if ctx.obj.get("out") else None,
        source=ctx.obj.get("source"),
        progress=tracker,
    )
    gate_error: Optional[ComparisonThresholdError] = None
    try:
        overrides = {"seed": seed} if seed is not None else {}
        pipeline.run(oracle, parse_methods(methods), parse_offset_option(offsets), **overrides)
    except ComparisonThresholdError as e:
        gate_error = e
    except (ConfigError, PNoiseError) as e:
        report_error(ctx, e)
        return

    summaries = [r.summary for r in pipeline.results]
    if output_format == "json":
        click.echo(json.dumps(to_jsonable({
            "scenario": config.name,
            "output": str(pipeline.output_dir),
            "points": summaries,
            "gates": [{"point": r.name, **g} for r in pipeline.results for g in r.gates],
        }), indent=2))
    elif not ctx.obj.get("quiet"):
        console.print(ScenarioTable(console).create_run_table(summaries))
        spectra_tables = SpectrumTable(console)
        for result in pipeline.results:
            if result.comparisons or result.gates:
                console.print()
                table = spectra_tables.create_comparison_table(result.comparisons, result.gates)
                table.title = f"Spectrum Comparisons: {result.name}"
                console.print(table)
        console.print(f"\n[green]Artifacts written to {pipeline.output_dir}[/green]")

    if gate_error is not None:
        report_error(ctx, gate_error)
