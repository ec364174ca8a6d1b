"""
Shared Command Helpers

Console, exit-code mapping and option parsing shared by the subcommands.

Author: ILO PNoise Team
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple

import click
from rich.console import Console

from ...spectrum.result import parse_offsets
from ...utils.exceptions import ComparisonThresholdError, PNoiseError
from ..config.loader import ConfigError
from ..config.schemas import METHOD_NAMES, RunConfig
from ..pipeline import select_point

console = Console()
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_ANALYSIS = 3
EXIT_GATE = 4


def exit_code_for(error: BaseException) -> int:
    """Process exit code of an exception."""
    if isinstance(error, ConfigError):
        return EXIT_CONFIG
    if isinstance(error, ComparisonThresholdError):
        return EXIT_GATE
    if isinstance(error, PNoiseError):
        return EXIT_ANALYSIS
    return EXIT_UNEXPECTED


def report_error(ctx: click.Context, error: BaseException) -> None:
    """Print an error and exit with its code."""
    if isinstance(error, ConfigError):
        console.print(f"[red]Configuration Error:[/red] {error}")
    elif isinstance(error, ComparisonThresholdError):
        console.print(f"[red]Comparison gates failed:[/red] {error}")
        for failure in error.failures:
            console.print(f"  [red]x[/red] {failure.get('point', '')}: "
                          f"{' vs '.join(failure['pair'])}: {failure.get('reason', '')}")
    else:
        console.print(f"[red]Error:[/red] {error}")
    ctx.exit(exit_code_for(error))


def parse_methods(value: Optional[str]) -> Optional[List[str]]:
    """
    Comma-separated method list.

    Raises:
        ConfigError: On an unknown method name
    """
    if not value:
        return None
    methods = [m.strip().lower().replace("_", "-") for m in value.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHOD_NAMES]
    if unknown:
        raise ConfigError(
            f"Unknown method(s) {', '.join(unknown)}; expected one of {', '.join(METHOD_NAMES)}"
        )
    return methods


def parse_offset_option(value: Optional[str]):
    """
    Offset grid from 'min:max:ppd'.

    Raises:
        ConfigError: On a malformed grid
    """
    if not value:
        return None
    try:
        return parse_offsets(value)
    except (ValueError, PNoiseError) as e:
        raise ConfigError(f"Invalid --offsets '{value}': {e}") from e


def command_config(ctx: click.Context, point: Optional[str], **overrides) -> Tuple[str, RunConfig, Path]:
    """
    Resolved configuration and artifact directory of a single-stage command.

    Returns:
        (point name, configuration, artifact directory)
    """
    name, config = select_point(ctx.obj["config"], point, overrides)
    root = Path(ctx.obj.get("out") or config.output.directory)
    return name, config, root / name
