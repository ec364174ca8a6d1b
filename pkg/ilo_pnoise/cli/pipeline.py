"""
Pipeline Orchestration

Runs the analysis chain for every point of a run configuration:

    circuit -> periodic steady state -> Floquet -> spectra -> diagnostics
            -> standard-form fit -> Monte-Carlo oracle -> comparisons

and writes the artifact bundle of each point to <output>/<point>/.
Stages are computed lazily by PointAnalysis so that the single-stage CLI
commands reuse the same code.

Author: ILO PNoise Team
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.circuits import (
    BufferCoupling,
    SecondaryOscillatorParams,
    StateSpaceModel,
    assemble_ilo,
    build_primary_oscillator,
    build_secondary_oscillator,
    params_as_dict,
)
from ..core.floquet import FloquetDecomposition, FloquetSettings, ModeHarmonics, analyze_floquet
from ..core.harmonics import HarmonicSet, fourier_harmonics
from ..core.pss import (
    PeriodicSteadyState,
    SolverSettings,
    solve_periodic_steady_state,
    tune_tank_inductance,
)
from ..oracle.psd import estimate_psd
from ..oracle.sde import EnsembleRun, OracleSettings, simulate_paths
from ..spectrum.diagnostics import DiagnosticThresholds, KurokawaDiagnostics, kurokawa_diagnostics
from ..spectrum.fit import standard_form_fit
from ..spectrum.models import (
    cosc_pmm_spectrum,
    free_running_lorentzian,
    ilo_pmm_spectrum,
    kilo_spectrum,
    qsinus_spectrum,
)
from ..spectrum.result import SpectrumComparison, SpectrumResult, compare_spectra, offset_grid
from ..utils.exceptions import ComparisonThresholdError, PNoiseError, PoorFit, SpectrumError
from ..writers import CSVArtifactWriter, JSONArtifactWriter, ManifestWriter
from .config.loader import ConfigError, resolve_point
from .config.schemas import PointConfig, RunConfig
from .formatting.progress import BatchProgressTracker

logger = logging.getLogger(__name__)

SINGLE_OSCILLATOR_METHODS = {"lorentzian"}


@dataclass
class PrimaryReference:
    """
    Free-running primary oscillator analyzed on its own.

    Attributes:
        pss: Periodic steady state of the primary alone
        decomposition: Its Floquet decomposition
    """

    pss: PeriodicSteadyState
    decomposition: FloquetDecomposition

    @property
    def c(self) -> float:
        return self.decomposition.c

    def spectrum(self, offsets: np.ndarray) -> SpectrumResult:
        """Free-running Lorentzian L_P on a grid."""
        return free_running_lorentzian(self.c, self.pss.omega0, offsets)


@dataclass
class PointResult:
    """
    Outcome of one scenario point.

    Attributes:
        name: Point name
        directory: Artifact directory
        spectra: Spectra by method name (plus 'oracle' and 'primary' when computed)
        comparisons: Configured pair comparisons
        gates: Gate evaluations, each with a 'passed' flag (None when skipped)
        artifacts: Written files
        summary: Headline numbers for tables and JSON output
    """

    name: str
    directory: Path
    spectra: Dict[str, SpectrumResult] = field(default_factory=dict)
    comparisons: List[SpectrumComparison] = field(default_factory=list)
    gates: List[Dict[str, Any]] = field(default_factory=list)
    artifacts: List[Path] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def failed_gates(self) -> List[Dict[str, Any]]:
        return [g for g in self.gates if g["passed"] is False]


def _strip_prefix(label: str) -> str:
    return label.split(".", 1)[1] if label[:2] in ("p.", "s.") else label


class PointAnalysis:
    """
    Lazily evaluated analysis chain of one resolved configuration.

    Every stage is computed on first access and cached.
    """

    def __init__(self, config: RunConfig, name: str = "base"):
        self.config = config
        self.name = name
        self.topology = config.circuit.topology
        self._model: Optional[StateSpaceModel] = None
        self._primary_model: Optional[StateSpaceModel] = None
        self._secondary_params: Optional[SecondaryOscillatorParams] = None
        self._pss: Optional[PeriodicSteadyState] = None
        self._floquet: Optional[Tuple[FloquetDecomposition, ModeHarmonics]] = None
        self._primary: Optional[PrimaryReference] = None

    # settings

    def solver_settings(self, model: StateSpaceModel) -> SolverSettings:
        solver = self.config.solver
        anchor = 0
        if solver.anchor_node:
            anchor = model.index_of(self._label_for(model, solver.anchor_node))
        return SolverSettings(
            rtol=solver.rtol,
            closure_tol=solver.closure_tol,
            max_iterations=solver.max_iterations,
            n_samples=solver.n_samples,
            ringup_periods=solver.ringup_periods,
            anchor_index=anchor,
        )

    def floquet_settings(self) -> FloquetSettings:
        solver = self.config.solver
        return FloquetSettings(
            rtol=solver.rtol,
            n_modes=solver.n_modes,
            phase_mode=solver.phase_mode,
            n_harmonics=solver.n_harmonics,
        )

    def offsets(self) -> np.ndarray:
        grid = self.config.spectrum.offsets
        return offset_grid(grid.f_min, grid.f_max, grid.points_per_decade)

    def _label_for(self, model: StateSpaceModel, label: str) -> str:
        if self.topology == "ilo" or label in model.state_labels:
            return label
        return _strip_prefix(label)

    # circuit

    def _primary_params(self) -> Dict[str, Any]:
        return {**self.config.circuit.primary.model_dump(), "w_rms": self.config.noise.w_rms}

    def secondary_params(self) -> SecondaryOscillatorParams:
        if self._secondary_params is None:
            params = SecondaryOscillatorParams(
                **self.config.circuit.secondary.model_dump(), n_rms=self.config.noise.n_rms
            )
            if self.config.circuit.tune_secondary and params.L is None:
                params, _ = tune_tank_inductance(
                    params, build_secondary_oscillator, self.solver_settings(build_secondary_oscillator(params))
                )
            self._secondary_params = params
        return self._secondary_params

    @property
    def primary_model(self) -> StateSpaceModel:
        if self._primary_model is None:
            self._primary_model = build_primary_oscillator(self._primary_params())
        return self._primary_model

    @property
    def model(self) -> StateSpaceModel:
        """Model analyzed at this point, observation node applied."""
        if self._model is None:
            q = self.config.observation_node
            if self.topology == "ilo":
                coupling = BufferCoupling(
                    g_c=tuple(self.config.coupling.g_c),
                    input_node=self.config.coupling.input_node,
                    output_node=self.config.coupling.output_node,
                )
                model = assemble_ilo(
                    self.primary_model, build_secondary_oscillator(self.secondary_params()), coupling, q
                )
            else:
                model = (
                    self.primary_model
                    if self.topology == "primary"
                    else build_secondary_oscillator(self.secondary_params())
                )
                label = self._label_for(model, q)
                if label in model.state_labels:
                    model = model.with_observation(label)
                else:
                    logger.warning(
                        f"Observation node '{q}' is not a state of the {self.topology} oscillator; "
                        f"observing '{model.state_labels[model.observation_index]}'"
                    )
            self._model = model
        return self._model

    @property
    def observation_label(self) -> str:
        return self.model.state_labels[self.model.observation_index]

    # stages

    @property
    def primary(self) -> PrimaryReference:
        """Standalone primary, the reference of K-ILO and the standard-form fit."""
        if self._primary is None:
            if self.topology == "primary" and self._pss is not None and self._floquet is not None:
                self._primary = PrimaryReference(self._pss, self._floquet[0])
            else:
                model = self.primary_model
                pss = solve_periodic_steady_state(model, self.solver_settings(model))
                decomp, _ = analyze_floquet(model, pss, self.floquet_settings())
                self._primary = PrimaryReference(pss, decomp)
                logger.info(f"Primary alone: f0={pss.f0:.6e} Hz, c={decomp.c:.4e} s")
        return self._primary

    @property
    def pss(self) -> PeriodicSteadyState:
        if self._pss is None:
            guess = self.primary.pss.T0 if self.topology == "ilo" else None
            model = self.model
            self._pss = solve_periodic_steady_state(model, self.solver_settings(model), guess)
            logger.info(
                f"{self.name}: PSS of {model.name} at f0={self._pss.f0:.6e} Hz "
                f"(closure {self._pss.closure_residual:.2e}, {self._pss.iterations} iterations)"
            )
        return self._pss

    def harmonics(self, n_harmonics: Optional[int] = None) -> HarmonicSet:
        return fourier_harmonics(self.pss, n_harmonics or self.config.solver.n_harmonics)

    @property
    def floquet(self) -> Tuple[FloquetDecomposition, ModeHarmonics]:
        if self._floquet is None:
            self._floquet = analyze_floquet(self.model, self.pss, self.floquet_settings())
            decomp = self._floquet[0]
            logger.info(
                f"{self.name}: mu={', '.join(f'{complex(m):.4e}' for m in decomp.mu)} 1/s, "
                f"c={decomp.c:.4e} s"
            )
        return self._floquet

    def check_methods(self, methods: Sequence[str]) -> None:
        """
        Raises:
            ConfigError: If a method needs the coupled assembly but the topology is a single oscillator
        """
        if self.topology != "ilo":
            bad = [m for m in methods if m not in SINGLE_OSCILLATOR_METHODS]
            if bad:
                raise ConfigError(
                    f"Methods {', '.join(bad)} need the 'ilo' topology; a free-running "
                    f"{self.topology} oscillator supports only: lorentzian"
                )

    def spectrum(self, method: str, offsets: np.ndarray) -> SpectrumResult:
        """Evaluate one closed-form method by its configuration name."""
        spec = self.config.spectrum
        decomp, mh = self.floquet
        q = self.model.observation_index
        if method == "lorentzian":
            return free_running_lorentzian(decomp.c, self.pss.omega0, offsets)
        if method == "ilo-pmm":
            return ilo_pmm_spectrum(mh, q, offsets, spec.rho_max, spec.p_max)
        if method == "cosc-pmm":
            return cosc_pmm_spectrum(mh, q, offsets, spec.carrier_harmonic, spec.phase_modes,
                                     spec.rho_max, spec.p_max)
        if method == "k-ilo":
            return kilo_spectrum(mh, q, offsets, self.primary.spectrum(offsets))
        if method == "q-sinus":
            return qsinus_spectrum(mh, q, offsets)
        raise ConfigError(f"Unknown spectrum method '{method}'")

    def spectra(self, methods: Sequence[str], offsets: Optional[np.ndarray] = None) -> Dict[str, SpectrumResult]:
        self.check_methods(methods)
        offsets = self.offsets() if offsets is None else offsets
        return {m: self.spectrum(m, offsets) for m in methods}

    def diagnostics(self) -> Optional[KurokawaDiagnostics]:
        if self.topology != "ilo":
            return None
        t = self.config.spectrum.thresholds
        thresholds = DiagnosticThresholds(
            dc_ratio=t.dc_ratio, offband_ratio=t.offband_ratio, drive_ratio=t.drive_ratio, margin=t.margin
        )
        return kurokawa_diagnostics(self.floquet[1], thresholds)

    def fits(self, spectra: Dict[str, SpectrumResult]) -> Dict[str, Dict[str, Any]]:
        """Standard-form fits of the configured methods; poor fits are reported, not raised."""
        if self.topology != "ilo":
            return {}
        out: Dict[str, Dict[str, Any]] = {}
        limit = self.config.spectrum.thresholds.fit_residual_db
        for method in self.config.spectrum.fit:
            if method not in spectra:
                continue
            reference = self.primary.spectrum(spectra[method].offsets_hz)
            try:
                fit = standard_form_fit(spectra[method], reference, limit)
                out[method] = {**fit.as_dict(), "poor": False}
            except PoorFit as e:
                logger.warning(f"{self.name}: {e}")
                out[method] = {**e.fit.as_dict(), "poor": True}
        return out

    def oracle_settings(self, **overrides: Any) -> OracleSettings:
        o = self.config.oracle
        values = dict(
            n_paths=o.n_paths,
            duration_periods=o.duration_periods,
            steps_per_period=o.steps_per_period,
            dt=o.dt,
            settle_periods=o.settle_periods,
            seed=o.seed,
            scheme=o.scheme,
            workers=o.workers,
            block_periods=o.block_periods,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return OracleSettings(**values)

    def oracle_offsets(self, run: EnsembleRun, offsets: np.ndarray) -> np.ndarray:
        """Offsets of the grid that the record resolves."""
        segment = min(self.config.oracle.nperseg, 2 ** int(np.floor(np.log2(run.n_periods))))
        low = max(10.0 / run.T_total, 1.0 / (run.T0 * segment))
        high = 0.5 / run.T0
        keep = (offsets >= low) & (offsets <= high)
        if not keep.all():
            logger.info(
                f"Oracle spectrum restricted to {low:.3e}..{high:.3e} Hz "
                f"({int(keep.sum())} of {offsets.size} offsets)"
            )
        return offsets[keep]

    def oracle(
        self,
        offsets: Optional[np.ndarray] = None,
        strict: bool = False,
        progress: Optional[BatchProgressTracker] = None,
        **overrides: Any,
    ) -> Tuple[EnsembleRun, SpectrumResult]:
        """
        Run the Monte-Carlo oracle and estimate its spectrum.

        Args:
            offsets: Requested offsets (configured grid if None)
            strict: Pass the offsets unfiltered (InsufficientRecord on short records)
            progress: Progress tracker fed with path-periods
            **overrides: OracleSettings fields replacing configured values

        Returns:
            (ensemble run, ORACLE spectrum)
        """
        settings = self.oracle_settings(**overrides)
        model, pss = self.model, self.pss
        total = settings.n_paths * (settings.settle_periods + settings.duration_periods)
        if progress is not None:
            with progress.track_operation(total, f"Oracle {self.name}"):
                run = simulate_paths(model, pss, settings, progress.callback())
        else:
            run = simulate_paths(model, pss, settings)
        offsets = self.offsets() if offsets is None else np.asarray(offsets, dtype=float)
        if not strict:
            offsets = self.oracle_offsets(run, offsets)
        o = self.config.oracle
        result = estimate_psd(run, pss.omega0, offsets, o.nperseg, o.overlap, o.window)
        return run, result


def evaluate_gates(
    config: RunConfig, spectra: Dict[str, SpectrumResult]
) -> Tuple[List[SpectrumComparison], List[Dict[str, Any]]]:
    """Configured pair comparisons and gate verdicts."""
    band = config.compare.band
    comparisons = []
    for a, b in config.compare.pairs:
        if a in spectra and b in spectra:
            try:
                comparisons.append(compare_spectra(spectra[a], spectra[b], band))
            except SpectrumError as e:
                logger.warning(f"Skipping comparison {a} vs {b}: {e}")

    gates = []
    for gate in config.compare.gates:
        a, b = gate.pair
        entry: Dict[str, Any] = {
            "pair": [a, b],
            "band_hz": list(gate.band or band),
            "max_db": gate.max_db,
            "min_db": gate.min_db,
        }
        if a not in spectra or b not in spectra:
            missing = [m for m in (a, b) if m not in spectra]
            # an oracle gate without an oracle run is not a failure
            verdict = None if missing == ["oracle"] else False
            entry.update(passed=verdict, reason=f"missing spectra: {', '.join(missing)}")
            gates.append(entry)
            continue
        try:
            comparison = compare_spectra(spectra[a], spectra[b], gate.band or band)
        except SpectrumError as e:
            entry.update(passed=False, reason=str(e))
            gates.append(entry)
            continue
        deviation = comparison.max_abs_db
        passed = True
        reasons = []
        if gate.max_db is not None and deviation > gate.max_db:
            passed = False
            reasons.append(f"deviation {deviation:.2f} dB > {gate.max_db:.2f} dB")
        if gate.min_db is not None and deviation < gate.min_db:
            passed = False
            reasons.append(f"deviation {deviation:.2f} dB < {gate.min_db:.2f} dB")
        entry.update(passed=passed, max_abs_db=deviation, mean_abs_db=comparison.mean_abs_db,
                     reason="; ".join(reasons))
        gates.append(entry)
    return comparisons, gates


def floquet_report(analysis: PointAnalysis) -> Dict[str, Any]:
    """Floquet summary written to floquet.json."""
    decomp, _ = analysis.floquet
    report: Dict[str, Any] = {
        "model": analysis.model.name,
        "T0_s": decomp.T0,
        "f0_hz": 1.0 / decomp.T0,
        "mu": [complex(m) for m in decomp.mu],
        "iota": [complex(m) for m in decomp.iota],
        "c_s": decomp.c,
        "omega0_sq_c": decomp.omega0**2 * decomp.c,
        "n_modes": decomp.n_modes,
        "biorthogonality_error": decomp.biorthogonality_error,
        "u1_deviation": decomp.u1_deviation,
        "flow_dual_error": decomp.flow_dual_error,
        "zero_mode_error": decomp.zero_mode_error,
        "near_degenerate": [list(p) for p in decomp.near_degenerate],
        "warnings": list(decomp.warnings),
    }
    if analysis.topology == "ilo":
        primary = analysis.primary
        report["primary"] = {"f0_hz": primary.pss.f0, "c_s": primary.c,
                             "omega0_sq_c": primary.pss.omega0**2 * primary.c}
        report["secondary_params"] = params_as_dict(analysis.secondary_params())
    return report


def write_pss_artifacts(analysis: PointAnalysis, directory: Path, n_harmonics: Optional[int] = None) -> List[Path]:
    csv = CSVArtifactWriter()
    return [
        csv.write_pss(analysis.pss, directory / "pss.csv"),
        csv.write_harmonics(analysis.harmonics(n_harmonics), directory / "harmonics.csv"),
    ]


def write_floquet_artifacts(analysis: PointAnalysis, directory: Path) -> List[Path]:
    decomp, _ = analysis.floquet
    return [
        JSONArtifactWriter().write(floquet_report(analysis), directory / "floquet.json"),
        CSVArtifactWriter().write_lambda(decomp, analysis.model.noise_labels, directory / "lambda.csv"),
    ]


def write_spectra(spectra: Dict[str, SpectrumResult], directory: Path) -> List[Path]:
    csv = CSVArtifactWriter()
    paths = []
    for name, spectrum in spectra.items():
        slug = "primary" if name == "primary" else spectrum.method.slug
        paths.append(csv.write(spectrum, directory / f"spectrum_{slug}.csv"))
    return paths


def spectrum_report(
    analysis: PointAnalysis,
    spectra: Dict[str, SpectrumResult],
    oracle_summary: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Validity diagnostics, standard-form fits and spectrum metadata of a point."""
    diagnostics = analysis.diagnostics()
    decomp, _ = analysis.floquet
    return {
        "point": analysis.name,
        "observation_node": analysis.observation_label,
        "f0_hz": analysis.pss.f0,
        "mu": [complex(m) for m in decomp.mu],
        "c_s": decomp.c,
        "kurokawa": diagnostics.as_dict() if diagnostics else None,
        "standard_form": analysis.fits(spectra),
        "spectra": {k: s.summary() for k, s in spectra.items()},
        "oracle": oracle_summary,
    }


def write_manifest(config: RunConfig, root: Path, point: str, source: Optional[str]) -> Path:
    """Resolved configuration of a point; running it writes the same files again."""
    data = config.model_dump(mode="json")
    data["output"]["directory"] = str(root)
    header = (
        f"ilo-pnoise run manifest for point '{point}'\n"
        f"source: {source or 'unknown'}\n"
        "Re-run with: ilo-pnoise --config manifest.yaml run"
    )
    return ManifestWriter().write(data, root / point / "manifest.yaml", header=header)


def select_point(
    config: RunConfig, point: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
) -> Tuple[str, RunConfig]:
    """
    Configuration used by the single-stage commands.

    Args:
        config: Loaded configuration
        point: Point name, or None for the base configuration
        overrides: Extra dotted-key overrides; None values are ignored

    Returns:
        (name, resolved configuration)

    Raises:
        ConfigError: If the point does not exist or the overrides are invalid
    """
    if point is not None:
        matches = [p for p in config.points if p.name == point]
        if not matches:
            available = ", ".join(p.name for p in config.points) or "none"
            raise ConfigError(f"Unknown point '{point}'; available points: {available}")
        config = resolve_point(config, matches[0])
    extra = {k: v for k, v in (overrides or {}).items() if v is not None}
    if extra or config.points:
        config = resolve_point(config, PointConfig(name=config.name, description=config.description,
                                                   overrides=extra))
    return config.name, config


class PhaseNoisePipeline:
    """
    Full pipeline over the points of a run configuration.

    Attributes:
        config: Base configuration
        output_dir: Root artifact directory
        source: Where the configuration came from (recorded in manifests)
        results: Results of the last run, also set when gates fail
    """

    def __init__(
        self,
        config: RunConfig,
        output_dir: Optional[Path] = None,
        source: Optional[str] = None,
        progress: Optional[BatchProgressTracker] = None,
    ):
        self.config = config
        self.output_dir = Path(output_dir or config.output.directory)
        self.source = source
        self.progress = progress
        self.results: List[PointResult] = []
        self.logger = logging.getLogger(__name__)

    def resolved_points(self) -> List[Tuple[str, RunConfig]]:
        """(name, configuration) of every point; the base configuration when none are listed."""
        if not self.config.points:
            return [(self.config.name, self.config)]
        return [(p.name, resolve_point(self.config, p)) for p in self.config.points]

    def run_point(
        self,
        name: str,
        config: RunConfig,
        oracle: Optional[bool] = None,
        methods: Optional[Sequence[str]] = None,
        offsets: Optional[np.ndarray] = None,
        **oracle_overrides: Any,
    ) -> PointResult:
        """
        Run every stage of one point and write its artifacts.

        Raises:
            PNoiseError: Stage failures, with the point name attached as context
        """
        directory = self.output_dir / name
        result = PointResult(name=name, directory=directory)
        analysis = PointAnalysis(config, name)
        methods = list(methods or config.spectrum.methods)
        analysis.check_methods(methods)
        try:
            offsets = analysis.offsets() if offsets is None else offsets
            result.artifacts += write_pss_artifacts(analysis, directory)
            result.artifacts += write_floquet_artifacts(analysis, directory)

            spectra = analysis.spectra(methods, offsets)
            if analysis.topology == "ilo":
                spectra["primary"] = analysis.primary.spectrum(offsets)

            oracle_summary = None
            if config.oracle.enabled if oracle is None else oracle:
                _, oracle_spectrum = analysis.oracle(offsets, progress=self.progress, **oracle_overrides)
                spectra["oracle"] = oracle_spectrum
                oracle_summary = dict(oracle_spectrum.metadata)

            report = spectrum_report(analysis, spectra, oracle_summary)
            result.spectra = spectra
            result.artifacts += write_spectra(spectra, directory)
            result.comparisons, result.gates = evaluate_gates(config, spectra)

            json_writer = JSONArtifactWriter()
            result.artifacts.append(json_writer.write(report, directory / "diagnostics.json"))
            result.artifacts.append(json_writer.write(
                {
                    "point": name,
                    "comparisons": [c.as_dict() for c in result.comparisons],
                    "gates": result.gates,
                },
                directory / "compare.json",
            ))
            result.artifacts.append(write_manifest(config, self.output_dir, name, self.source))
        except PNoiseError as e:
            raise e.with_context(name)

        decomp, _ = analysis.floquet
        kurokawa = report["kurokawa"]
        result.summary = {
            "point": name,
            "f0_hz": analysis.pss.f0,
            "mu2": float(decomp.mu2.real) if decomp.mu.size > 1 else None,
            "c_s": decomp.c,
            "verdict": kurokawa["verdict"] if kurokawa else None,
            "fit": report["standard_form"],
            "gates_passed": not result.failed_gates,
        }
        self.logger.info(f"Point {name}: {len(result.artifacts)} artifacts in {directory}")
        return result

    def run(
        self,
        oracle: Optional[bool] = None,
        methods: Optional[Sequence[str]] = None,
        offsets: Optional[np.ndarray] = None,
        **oracle_overrides: Any,
    ) -> List[PointResult]:
        """
        Run every point.

        Raises:
            ComparisonThresholdError: If any configured gate failed (after all artifacts are written)
        """
        self.results = []
        for name, config in self.resolved_points():
            self.results.append(self.run_point(name, config, oracle, methods, offsets, **oracle_overrides))
        failures = [{"point": r.name, **gate} for r in self.results for gate in r.failed_gates]
        if failures:
            raise ComparisonThresholdError(
                f"{len(failures)} comparison gate(s) failed in scenario '{self.config.name}'",
                failures=failures,
                context=self.config.name,
            )
        return self.results


def run_scenario(
    config: RunConfig, output_dir: Optional[Path] = None, source: Optional[str] = None
) -> List[PointResult]:
    """Run the full pipeline over every point of a configuration."""
    return PhaseNoisePipeline(config, output_dir, source).run()
