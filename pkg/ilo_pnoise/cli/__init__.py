"""
ILO PNoise CLI Package

Click-based command-line interface: a group with global configuration
options and one subcommand per pipeline stage, plus the full scenario run.

Author: ILO PNoise Team
"""

from .main import cli, main

__all__ = ["cli", "main"]
