"""
Rich Table Formatters

Summary tables for steady states, Floquet exponents, spectra, validity
diagnostics, spectrum comparisons and the bundled scenario list.

Author: ILO PNoise Team
"""

from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from rich.console import Console
from rich.table import Table

from ...core.floquet import FloquetDecomposition
from ...core.harmonics import HarmonicSet
from ...core.pss import PeriodicSteadyState
from ...spectrum.diagnostics import KurokawaDiagnostics
from ...spectrum.result import SpectrumComparison, SpectrumResult


def _eng(value: float, unit: str = "") -> str:
    """Compact scientific notation with a unit."""
    if value is None or not np.isfinite(value):
        return f"{value}"
    return f"{value:.6g} {unit}".rstrip()


def _complex(value: complex) -> str:
    value = complex(value)
    if value.imag == 0.0:
        return f"{value.real:.6e}"
    return f"{value.real:.6e} {'+' if value.imag >= 0 else '-'} {abs(value.imag):.3e}j"


class SteadyStateTable:
    """Periodic steady-state and harmonic tables."""

    def __init__(self, console: Console):
        self.console = console

    def create_summary_table(self, pss: PeriodicSteadyState, harmonics: Optional[HarmonicSet] = None) -> Table:
        """
        Create a summary table for a periodic steady state.

        Args:
            pss: Converged steady state
            harmonics: Optional harmonics, adding fundamental amplitudes

        Returns:
            Rich Table with formatted summary
        """
        table = Table(title="Periodic Steady State", show_header=False, box=None)
        table.add_column("Property", style="cyan", no_wrap=True)
        table.add_column("Value", style="bold white")

        table.add_row("Model", pss.model_name or "-")
        table.add_row("Period T0", _eng(pss.T0, "s"))
        table.add_row("Frequency f0", _eng(pss.f0, "Hz"))
        table.add_row("Samples per period", str(pss.n_samples))
        table.add_row("Newton iterations", str(pss.iterations))
        table.add_row("Closure residual", f"{pss.closure_residual:.2e}")
        table.add_row("Anchor state", pss.state_labels[pss.anchor_index])
        if harmonics is not None:
            fundamental = np.abs(harmonics.at(1))
            for label, amplitude in zip(harmonics.labels, fundamental):
                table.add_row(f"|X1| {label}", f"{2.0 * amplitude:.6g}")
        return table

    def create_state_table(self, pss: PeriodicSteadyState) -> Table:
        """Per-state extrema over one period."""
        table = Table(title="Orbit Extent")
        table.add_column("State", style="cyan")
        table.add_column("Min", justify="right")
        table.add_column("Max", justify="right")
        table.add_column("Mean", justify="right", style="dim")
        for i, label in enumerate(pss.state_labels):
            column = pss.samples[:, i]
            table.add_row(label, f"{column.min():.6g}", f"{column.max():.6g}", f"{column.mean():.6g}")
        return table


class FloquetTable:
    """Floquet exponent table."""

    def __init__(self, console: Console):
        self.console = console

    def create_exponent_table(self, decomp: FloquetDecomposition) -> Table:
        """
        One row per mode with exponent, multiplier and decay time.

        Args:
            decomp: Floquet decomposition

        Returns:
            Rich Table
        """
        table = Table(title=f"Floquet Modes (c = {decomp.c:.4e} s)")
        table.add_column("Mode", style="cyan", justify="right")
        table.add_column("mu (1/s)", style="bold")
        table.add_column("|iota|", justify="right")
        table.add_column("Decay (periods)", justify="right", style="dim")
        for i, (mu, iota) in enumerate(zip(decomp.mu, decomp.iota), start=1):
            mu = complex(mu)
            periods = "-" if mu.real == 0.0 else f"{1.0 / (abs(mu.real) * decomp.T0):.3g}"
            style = "" if i <= decomp.n_modes else "[dim]"
            table.add_row(f"{style}{i}", _complex(mu), f"{abs(iota):.6f}", periods)
        return table

    def create_checks_table(self, decomp: FloquetDecomposition) -> Table:
        """Numerical checks of the decomposition."""
        table = Table(title="Decomposition Checks", show_header=False, box=None)
        table.add_column("Check", style="cyan")
        table.add_column("Value", style="bold")
        table.add_row("|mu1| T0", f"{decomp.zero_mode_error:.2e}")
        table.add_row("Biorthogonality", f"{decomp.biorthogonality_error:.2e}")
        table.add_row("u1 deviation", f"{decomp.u1_deviation:.2e}")
        table.add_row("v1 . dx_s/dt - 1", f"{decomp.flow_dual_error:.2e}")
        table.add_row("w0^2 c", f"{decomp.omega0**2 * decomp.c:.6g} 1/s")
        for warning in decomp.warnings:
            table.add_row("Warning", f"[yellow]{warning}[/yellow]")
        return table


class SpectrumTable:
    """Spectrum, diagnostics and comparison tables."""

    def __init__(self, console: Console):
        self.console = console

    def create_spectrum_table(
        self, spectra: Dict[str, SpectrumResult], probe_offsets: Sequence[float] = (1e4, 1e5, 1e6, 1e7)
    ) -> Table:
        """
        dBc/Hz of every spectrum at a few decade offsets.

        Args:
            spectra: Spectra by name
            probe_offsets: Offsets (Hz) shown as columns

        Returns:
            Rich Table
        """
        table = Table(title="Phase Noise (dBc/Hz)")
        table.add_column("Spectrum", style="cyan", no_wrap=True)
        probes = np.asarray(probe_offsets, dtype=float)
        for f in probes:
            table.add_column(f"{f:.0e} Hz", justify="right")
        for name, spectrum in spectra.items():
            values = spectrum.interpolate_db(probes)
            cells = ["-" if not np.isfinite(v) else f"{v:.2f}" for v in values]
            table.add_row(name, *cells)
        return table

    def create_diagnostics_table(self, diagnostics: KurokawaDiagnostics) -> Table:
        """Validity conditions with their thresholds."""
        t = diagnostics.thresholds
        table = Table(title="Reduced-Model Validity")
        table.add_column("Condition", style="cyan")
        table.add_column("Value", justify="right")
        table.add_column("Limit", justify="right", style="dim")
        table.add_column("Status")
        rows = [
            (1, "DC share of Lambda_1", diagnostics.dc_ratio_lambda1, t.dc_ratio),
            (2, "Off-band share of Lambda_2", diagnostics.offband_ratio_lambda2, t.offband_ratio),
            (3, "w0^2 c / |mu2|", diagnostics.drive_ratio, t.drive_ratio),
        ]
        for number, label, value, limit in rows:
            ok = number not in diagnostics.violations
            table.add_row(f"{number}. {label}", f"{value:.3e}", f"{limit:.3e}",
                          "[green]ok[/green]" if ok else "[red]violated[/red]")
        table.add_row(
            "Multiplier margin", f"{diagnostics.margin:.3e}", f">= {t.margin:.3g}",
            "[green]ok[/green]" if diagnostics.margin_satisfied else "[yellow]low[/yellow]",
        )
        verdict = "[green]" if diagnostics.valid else "[red]"
        table.caption = f"Verdict: {verdict}{diagnostics.verdict}[/]"
        return table

    def create_fit_table(self, fits: Dict[str, Dict[str, Any]]) -> Table:
        """Standard-form fit parameters per spectrum."""
        table = Table(title="Standard-Form Fit")
        table.add_column("Spectrum", style="cyan")
        table.add_column("f_3dB (Hz)", justify="right")
        table.add_column("N_S", justify="right")
        table.add_column("Residual (dB)", justify="right")
        for name, fit in fits.items():
            residual = f"{fit['residual_db']:.2f}"
            if fit.get("poor"):
                residual = f"[red]{residual}[/red]"
            table.add_row(name, f"{fit['f_3db_hz']:.4e}", f"{fit['n_s']:.3e}", residual)
        return table

    def create_comparison_table(
        self, comparisons: List[SpectrumComparison], gates: Optional[List[Dict[str, Any]]] = None
    ) -> Table:
        """Pairwise deviations followed by gate verdicts."""
        table = Table(title="Spectrum Comparisons")
        table.add_column("Pair", style="cyan")
        table.add_column("Band (Hz)", style="dim")
        table.add_column("Max |dB|", justify="right")
        table.add_column("Mean |dB|", justify="right")
        table.add_column("Gate")
        for c in comparisons:
            table.add_row(f"{c.reference} vs {c.other}", f"{c.band_hz[0]:.1e}..{c.band_hz[1]:.1e}",
                          f"{c.max_abs_db:.2f}", f"{c.mean_abs_db:.2f}", "")
        for gate in gates or []:
            bounds = []
            if gate.get("min_db") is not None:
                bounds.append(f">= {gate['min_db']:g}")
            if gate.get("max_db") is not None:
                bounds.append(f"<= {gate['max_db']:g}")
            if gate["passed"] is None:
                status = f"[yellow]skipped[/yellow] {gate.get('reason', '')}"
            elif gate["passed"]:
                status = "[green]pass[/green]"
            else:
                status = f"[red]fail[/red] {gate.get('reason', '')}"
            band = gate["band_hz"]
            deviation = gate.get("max_abs_db")
            table.add_row(
                " vs ".join(gate["pair"]),
                f"{band[0]:.1e}..{band[1]:.1e}",
                "-" if deviation is None else f"{deviation:.2f}",
                "-" if gate.get("mean_abs_db") is None else f"{gate['mean_abs_db']:.2f}",
                f"{' and '.join(bounds)}: {status}",
            )
        return table


class ScenarioTable:
    """Bundled scenario listing and run summaries."""

    def __init__(self, console: Console):
        self.console = console

    def create_scenarios_table(self, scenarios: List[Dict[str, Any]]) -> Table:
        table = Table(title="Bundled Scenarios")
        table.add_column("Name", style="cyan", no_wrap=True)
        table.add_column("Topology", style="dim")
        table.add_column("Points")
        table.add_column("Oracle", justify="center")
        table.add_column("Description")
        for s in scenarios:
            table.add_row(
                s["name"],
                s["topology"],
                ", ".join(s["points"]) or "[dim]base[/dim]",
                "yes" if s["oracle"] else "-",
                s["description"] or "[dim]No description[/dim]",
            )
        return table

    def create_run_table(self, summaries: List[Dict[str, Any]]) -> Table:
        """One row per point of a finished run."""
        table = Table(title="Run Summary")
        table.add_column("Point", style="cyan", no_wrap=True)
        table.add_column("f0 (Hz)", justify="right")
        table.add_column("mu2 (1/s)", justify="right")
        table.add_column("c (s)", justify="right")
        table.add_column("Verdict")
        table.add_column("Gates")
        for s in summaries:
            mu2 = "-" if s.get("mu2") is None else f"{s['mu2']:.4e}"
            verdict = s.get("verdict") or "-"
            if verdict == "VIOLATION":
                verdict = f"[yellow]{verdict}[/yellow]"
            gates = "[green]pass[/green]" if s.get("gates_passed", True) else "[red]fail[/red]"
            table.add_row(s["point"], f"{s['f0_hz']:.6e}", mu2, f"{s['c_s']:.4e}", verdict, gates)
        return table
