"""
Rich Progress Trackers

Progress bars for long-running pipeline stages (scenario points, oracle
ensembles), written to standard error so that machine-readable output on
standard output stays clean.

Author: ILO PNoise Team
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Optional

from rich.console import Console
from rich.panel import Panel
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TaskID,
    TextColumn,
    TimeElapsedColumn,
    TimeRemainingColumn,
)
from rich.table import Table


class OperationType(Enum):
    """Types of operations that can be tracked."""

    RUN = "run"
    ORACLE = "oracle"


@dataclass
class OperationStats:
    """Statistics for tracking operations."""

    total_items: int = 0
    completed_items: int = 0
    failed_items: int = 0
    start_time: float = field(default_factory=time.time)
    end_time: Optional[float] = None
    errors: List[str] = field(default_factory=list)

    @property
    def duration(self) -> float:
        """Operation duration in seconds."""
        end = self.end_time or time.time()
        return end - self.start_time


class BatchProgressTracker:
    """
    Progress tracker for scenario points and oracle path-periods.

    Either advance it by increments (update_progress) or hand its
    callback() to a routine that reports (completed, total) pairs.
    """

    def __init__(
        self,
        console: Optional[Console] = None,
        operation_type: OperationType = OperationType.RUN,
        show_eta: bool = True,
        enabled: bool = True,
    ):
        """
        Initialize the tracker.

        Args:
            console: Rich Console instance (a stderr console if None)
            operation_type: Type of operation being tracked
            show_eta: Whether to show estimated time remaining
            enabled: When False nothing is drawn (quiet mode, tests)
        """
        self.console = console or Console(stderr=True)
        self.operation_type = operation_type
        self.enabled = enabled
        self.stats = OperationStats()
        self.progress: Optional[Progress] = None
        self.main_task: Optional[TaskID] = None

        self.progress_columns = [
            SpinnerColumn(spinner_name="dots"),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(complete_style="green", finished_style="bright_green"),
            MofNCompleteColumn(),
            TextColumn("•"),
            TimeElapsedColumn(),
        ]
        if show_eta:
            self.progress_columns.append(TimeRemainingColumn())

    @contextmanager
    def track_operation(
        self, total_items: int, operation_description: Optional[str] = None, show_summary: bool = False
    ) -> Iterator["BatchProgressTracker"]:
        """
        Context manager for tracking an operation.

        Args:
            total_items: Total number of items to process
            operation_description: Description of the operation
            show_summary: Whether to show a summary at completion

        Yields:
            This tracker
        """
        self.stats = OperationStats(total_items=total_items)
        description = operation_description or f"{self.operation_type.value.title()}..."
        try:
            if not self.enabled:
                yield self
                return
            with Progress(*self.progress_columns, console=self.console, refresh_per_second=4,
                          transient=False) as progress:
                self.progress = progress
                self.main_task = progress.add_task(f"[cyan]{description}", total=total_items)
                yield self
        finally:
            self.stats.end_time = time.time()
            self.progress = None
            self.main_task = None
            if show_summary and self.enabled:
                self.show_completion_summary()

    def update_progress(self, completed: int = 1, current_item: Optional[str] = None) -> None:
        """
        Advance the main bar.

        Args:
            completed: Number of items completed (increment)
            current_item: Item being processed, shown next to the description
        """
        self.stats.completed_items += completed
        if not self.progress or self.main_task is None:
            return
        kwargs = {"advance": completed}
        if current_item:
            kwargs["description"] = (
                f"[cyan]{self.operation_type.value.title()} • [dim]{current_item}[/dim]"
            )
        self.progress.update(self.main_task, **kwargs)

    def callback(self):
        """Callable receiving (completed, total) absolute counts."""

        def report(completed: int, total: int) -> None:
            self.stats.completed_items = completed
            self.stats.total_items = total
            if self.progress is not None and self.main_task is not None:
                self.progress.update(self.main_task, completed=completed, total=total)

        return report

    def add_error(self, error_message: str, item_name: Optional[str] = None) -> None:
        """Record a failed item."""
        self.stats.failed_items += 1
        self.stats.errors.append(f"{item_name}: {error_message}" if item_name else error_message)

    def show_completion_summary(self) -> None:
        """Display an operation summary."""
        table = Table(title=f"{self.operation_type.value.title()} Summary", show_header=False)
        table.add_column("Metric", style="cyan")
        table.add_column("Value", style="bold")
        table.add_row("Total", str(self.stats.total_items))
        table.add_row("Completed", f"[green]{self.stats.completed_items}[/green]")
        table.add_row("Failed", f"[red]{self.stats.failed_items}[/red]")
        table.add_row("Duration", f"{self.stats.duration:.2f}s")
        self.console.print()
        self.console.print(table)
        if self.stats.errors:
            shown = self.stats.errors[:10]
            more = len(self.stats.errors) - len(shown)
            self.console.print(
                Panel(
                    "\n".join(shown) + (f"\n... and {more} more" if more else ""),
                    title=f"Issues ({len(self.stats.errors)})",
                    border_style="red",
                )
            )
