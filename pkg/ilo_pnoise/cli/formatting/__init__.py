"""
Rich Formatting Package

Rich-based tables and progress trackers used by the CLI commands.

Author: ILO PNoise Team
"""

from .progress import BatchProgressTracker, OperationType
from .tables import FloquetTable, ScenarioTable, SpectrumTable, SteadyStateTable

__all__ = [
    "BatchProgressTracker",
    "OperationType",
    "FloquetTable",
    "ScenarioTable",
    "SpectrumTable",
    "SteadyStateTable",
]
