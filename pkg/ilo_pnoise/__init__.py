"""
ILO PNoise Library

Phase-noise analysis of injection-locked and generally coupled oscillator
circuits. The periodic steady state of a circuit is found by shooting, its
Floquet decomposition yields the phase-diffusion constant and the noise
projection vectors, and closed-form spectra (ILO-PMM, COSC-PMM, K-ILO,
Lorentzian, Q-SINUS) are evaluated from their harmonics. A stochastic
transient Monte-Carlo oracle checks the closed forms.

Key Features:
- Reference circuits: cubic negative-resistance LC oscillator, CMOS
  cross-coupled LC oscillator, unilateral buffer coupling
- Shooting-Newton periodic steady state with harmonic extraction
- Floquet exponents, vectors, Lambda waveforms and phase diffusion
- Closed-form spectra, reduced-model validity diagnostics, standard-form fit
- Ensemble SDE oracle with Welch spectrum estimation
- Config-driven scenario runs with CSV/JSON artifacts

Author: ILO PNoise Team
Version: 0.1.0
"""

from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from .core import (
    BufferCoupling,
    FloquetDecomposition,
    FloquetSettings,
    HarmonicSet,
    ModeHarmonics,
    PeriodicSteadyState,
    PrimaryOscillatorParams,
    SecondaryOscillatorParams,
    SolverSettings,
    StateSpaceModel,
    analyze_floquet,
    assemble_ilo,
    build_primary_oscillator,
    build_secondary_oscillator,
    floquet_vectors,
    fourier_harmonics,
    solve_periodic_steady_state,
)
from .oracle import EnsembleRun, OracleSettings, diffusion_slope, estimate_psd, simulate_paths
from .spectrum import (
    KurokawaDiagnostics,
    Method,
    SpectrumResult,
    compare_spectra,
    cosc_pmm_spectrum,
    free_running_lorentzian,
    ilo_pmm_spectrum,
    kilo_spectrum,
    kurokawa_diagnostics,
    offset_grid,
    qsinus_spectrum,
    standard_form_fit,
)
from .utils.exceptions import (
    ComparisonThresholdError,
    FloquetError,
    OracleError,
    PNoiseError,
    SolverError,
    SpectrumError,
)

__version__ = "0.1.0"
__author__ = "ILO PNoise Team"

__all__ = [
    # Circuits
    "BufferCoupling",
    "PrimaryOscillatorParams",
    "SecondaryOscillatorParams",
    "StateSpaceModel",
    "assemble_ilo",
    "build_primary_oscillator",
    "build_secondary_oscillator",
    # Steady state and Floquet
    "SolverSettings",
    "PeriodicSteadyState",
    "HarmonicSet",
    "FloquetSettings",
    "FloquetDecomposition",
    "ModeHarmonics",
    "solve_periodic_steady_state",
    "fourier_harmonics",
    "floquet_vectors",
    "analyze_floquet",
    # Spectra
    "Method",
    "SpectrumResult",
    "KurokawaDiagnostics",
    "offset_grid",
    "ilo_pmm_spectrum",
    "cosc_pmm_spectrum",
    "kilo_spectrum",
    "qsinus_spectrum",
    "free_running_lorentzian",
    "kurokawa_diagnostics",
    "standard_form_fit",
    "compare_spectra",
    # Oracle
    "OracleSettings",
    "EnsembleRun",
    "simulate_paths",
    "estimate_psd",
    "diffusion_slope",
    # Exceptions
    "PNoiseError",
    "SolverError",
    "FloquetError",
    "SpectrumError",
    "OracleError",
    "ComparisonThresholdError",
    # Convenience functions
    "analyze_oscillator",
    "compute_spectrum",
    "run_bundled_scenario",
]


def _run_config(config: Optional[Union[Mapping[str, Any], Any]]):
    from .cli.config.loader import ConfigLoader
    from .cli.config.schemas import RunConfig

    if config is None:
        return RunConfig()
    if isinstance(config, RunConfig):
        return config
    return ConfigLoader().validate_config(dict(config))


def analyze_oscillator(
    config: Optional[Union[Mapping[str, Any], Any]] = None,
    point: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Periodic steady state and Floquet summary of a configured circuit.

    Args:
        config: RunConfig or mapping in the run-configuration schema (defaults if None)
        point: Scenario point to analyze (base configuration if None)

    Returns:
        Dictionary with 'model', 'T0_s', 'f0_hz', 'mu', 'iota', 'c_s', 'omega0_sq_c' and
        decomposition checks

    Raises:
        ConfigError: If the configuration is invalid
        PNoiseError: If the steady state or the decomposition fails
    """
    from .cli.pipeline import PointAnalysis, floquet_report, select_point

    name, resolved = select_point(_run_config(config), point)
    analysis = PointAnalysis(resolved, name)
    report = floquet_report(analysis)
    report["state_labels"] = list(analysis.pss.state_labels)
    report["closure_residual"] = analysis.pss.closure_residual
    return report


def compute_spectrum(
    methods: Sequence[str] = ("ilo-pmm",),
    config: Optional[Union[Mapping[str, Any], Any]] = None,
    offsets: Optional[np.ndarray] = None,
    point: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Closed-form spectra of a configured circuit.

    Args:
        methods: Method names (ilo-pmm, cosc-pmm, k-ilo, lorentzian, q-sinus)
        config: RunConfig or mapping in the run-configuration schema (defaults if None)
        offsets: Offset frequencies (Hz); the configured grid if None
        point: Scenario point to analyze (base configuration if None)

    Returns:
        Dictionary with 'offsets_hz', 'spectra' (method -> dBc/Hz list) and 'diagnostics'

    Raises:
        ConfigError: If the configuration or a method name is invalid
        PNoiseError: If a pipeline stage fails
    """
    from .cli.pipeline import PointAnalysis, select_point, spectrum_report

    name, resolved = select_point(_run_config(config), point)
    analysis = PointAnalysis(resolved, name)
    spectra = analysis.spectra([m.lower() for m in methods], offsets)
    grid = next(iter(spectra.values())).offsets_hz
    return {
        "offsets_hz": grid.tolist(),
        "spectra": {m: s.dbc_per_hz.tolist() for m, s in spectra.items()},
        "diagnostics": spectrum_report(analysis, spectra),
    }


def run_bundled_scenario(
    name: str,
    output_dir: Optional[Union[str, Path]] = None,
    oracle: Optional[bool] = None,
) -> Dict[str, Any]:
    """
    Run a bundled scenario end to end and write its artifacts.

    Args:
        name: Scenario name (fig4, fig5, fig6)
        output_dir: Artifact root (the scenario's output directory if None)
        oracle: Force the oracle on or off (scenario setting if None)

    Returns:
        Dictionary with 'scenario', 'output', 'points' (summaries) and 'gates'; gate
        failures are reported in 'gates' rather than raised

    Raises:
        ConfigError: If the scenario does not exist
        PNoiseError: If a pipeline stage fails
    """
    from .cli.config.loader import ConfigLoader
    from .cli.pipeline import PhaseNoisePipeline

    config = ConfigLoader().validate_config(ConfigLoader().load_scenario_data(name))
    pipeline = PhaseNoisePipeline(config, Path(output_dir) if output_dir else None, f"scenario:{name}")
    try:
        pipeline.run(oracle=oracle)
    except ComparisonThresholdError:
        pass
    return {
        "scenario": name,
        "output": str(pipeline.output_dir),
        "points": [r.summary for r in pipeline.results],
        "gates": [{"point": r.name, **g} for r in pipeline.results for g in r.gates],
    }
