"""
Configuration Schemas

Pydantic models for run configuration validation. A run configuration
describes the circuit, the coupling and noise sources, the numerical
settings of every pipeline stage and the scenario points to evaluate.
Every physical quantity is in SI units, named in the field description.

Author: ILO PNoise Team
"""

from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

METHOD_NAMES = ("ilo-pmm", "cosc-pmm", "k-ilo", "lorentzian", "q-sinus")
COMPARABLE_NAMES = METHOD_NAMES + ("oracle",)

MethodName = Literal["ilo-pmm", "cosc-pmm", "k-ilo", "lorentzian", "q-sinus"]


def _normalize_method(value: str) -> str:
    key = str(value).strip().lower().replace("_", "-")
    if key not in COMPARABLE_NAMES:
        raise ValueError(f"unknown method '{value}'; expected one of {', '.join(COMPARABLE_NAMES)}")
    return key


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class PrimaryCircuitConfig(_Section):
    """
    Primary oscillator (OSC1): parallel L-C-G tank with a cubic
    voltage-controlled negative-resistance current i = a1 v + a3 v^3.
    """

    C: float = Field(default=0.3035e-12, gt=0.0, description="Tank capacitance (F).")
    L: Optional[float] = Field(
        default=None,
        gt=0.0,
        description="Tank inductance (H). When null it is derived from f0 and C.",
    )
    f0: float = Field(
        default=900.9e6,
        gt=0.0,
        description="Target oscillation frequency (Hz), used when L is null.",
    )
    G: float = Field(default=0.8e-3, ge=0.0, description="Tank loss conductance (S).")
    a1: float = Field(default=-1.0e-3, description="Linear coefficient of the active current (S).")
    a3: float = Field(default=100e-6, description="Cubic coefficient of the active current (A/V^3).")


class SecondaryCircuitConfig(_Section):
    """
    Secondary oscillator (OSC2): square-law CMOS cross-coupled pair on an
    L-C-G tank with a tail current source on the common node.
    """

    C: float = Field(default=0.3e-12, gt=0.0, description="Tank capacitance (F).")
    L: Optional[float] = Field(
        default=None,
        gt=0.0,
        description="Tank inductance (H). When null it is derived from f0 and C.",
    )
    f0: float = Field(default=892.86e6, gt=0.0, description="Target oscillation frequency (Hz).")
    G: float = Field(default=1.0e-3, ge=0.0, description="Tank loss conductance (S).")
    vth0: float = Field(default=0.5, description="Threshold voltage (V).")
    lam: float = Field(default=0.05, ge=0.0, description="Channel-length modulation (1/V).")
    kp: float = Field(default=120e-6, gt=0.0, description="Process transconductance (A/V^2).")
    w_over_l: float = Field(default=100.0, gt=0.0, description="Device aspect ratio W/L.")
    vdd: float = Field(default=1.8, gt=0.0, description="Supply voltage (V).")
    i_tail: float = Field(default=1.0e-3, gt=0.0, description="Tail current (A).")
    c_cg: float = Field(default=2.0e-12, gt=0.0, description="Common-node capacitance (F).")


class CircuitConfig(_Section):
    """Circuit selection and parameters."""

    topology: Literal["ilo", "primary", "secondary"] = Field(
        default="ilo",
        description=(
            "'ilo' assembles the primary driving the secondary through the buffer; "
            "'primary' and 'secondary' analyze a single free-running oscillator."
        ),
    )
    primary: PrimaryCircuitConfig = Field(default_factory=PrimaryCircuitConfig)
    secondary: SecondaryCircuitConfig = Field(default_factory=SecondaryCircuitConfig)
    tune_secondary: bool = Field(
        default=True,
        description=(
            "Re-tune the secondary tank inductance so that its free-running frequency "
            "equals secondary.f0 after the nonlinear frequency pull (only when L is null)."
        ),
    )


class CouplingConfig(_Section):
    """Unilateral buffer from the primary to the secondary."""

    g_c: List[float] = Field(
        default_factory=lambda: [0.0, 35e-6, 0.0, 0.0],
        description="Buffer polynomial coefficients g_c0..g_c3 (A, A/V, A/V^2, A/V^3).",
    )
    input_node: str = Field(default="v", description="Primary state driving the buffer.")
    output_node: str = Field(default="v_d", description="Secondary node receiving the current.")

    @field_validator("g_c")
    @classmethod
    def four_coefficients(cls, v: List[float]) -> List[float]:
        if len(v) != 4:
            raise ValueError(f"g_c needs exactly four coefficients, got {len(v)}")
        return [float(x) for x in v]


class NoiseConfig(_Section):
    """White-noise current sources (unit-intensity sources scaled by their rms density)."""

    w_rms: float = Field(default=1e-12, ge=0.0, description="Primary tank source (A/sqrt(Hz)).")
    n_rms: float = Field(default=70.7e-12, ge=0.0, description="Secondary tail source (A/sqrt(Hz)).")


class SolverConfig(_Section):
    """Periodic steady state and Floquet settings."""

    rtol: float = Field(default=1e-10, gt=0.0, lt=1e-3, description="Integrator relative tolerance.")
    closure_tol: float = Field(default=1e-9, gt=0.0, description="Scaled closure tolerance of the shooting Newton.")
    max_iterations: int = Field(default=30, ge=1, le=500, description="Newton iteration cap.")
    n_samples: int = Field(default=1024, ge=16, description="Samples per period N_t.")
    n_harmonics: int = Field(default=32, ge=1, description="Harmonic truncation N_h.")
    ringup_periods: int = Field(default=200, ge=10, description="Periods integrated before shooting.")
    anchor_node: Optional[str] = Field(
        default=None, description="State held fixed on the Poincare section (default: first state)."
    )
    n_modes: int = Field(default=2, ge=1, description="Retained Floquet modes k.")
    phase_mode: Optional[int] = Field(
        default=None, ge=1, description="Override of the Floquet index used as the second phase mode."
    )


class OffsetsConfig(_Section):
    """Logarithmic offset grid."""

    f_min: float = Field(default=1e3, gt=0.0, description="Lowest offset (Hz).")
    f_max: float = Field(default=1e8, gt=0.0, description="Highest offset (Hz).")
    points_per_decade: int = Field(default=60, ge=1, le=1000, description="Grid density.")

    @model_validator(mode="after")
    def ordered(self) -> "OffsetsConfig":
        if self.f_max <= self.f_min:
            raise ValueError("f_max must exceed f_min")
        return self


class ThresholdsConfig(_Section):
    """Validity-diagnostic thresholds and the fit residual limit."""

    dc_ratio: float = Field(default=0.05, ge=0.0, description="Limit on |Lambda_1,0| / |Lambda_1,1|.")
    offband_ratio: float = Field(default=0.1, ge=0.0, description="Limit on the off-band energy share of Lambda_2.")
    drive_ratio: float = Field(default=1e-2, ge=0.0, description="Limit on w0^2 c / |mu2|.")
    margin: float = Field(default=100.0, ge=0.0, description="Minimum multiplier margin reported as satisfied.")
    fit_residual_db: float = Field(default=3.0, gt=0.0, description="RMS residual limit of the standard-form fit (dB).")


class SpectrumConfig(_Section):
    """Closed-form spectra to evaluate."""

    methods: List[MethodName] = Field(
        default_factory=lambda: ["ilo-pmm", "k-ilo", "lorentzian"],
        description="Spectra to compute.",
    )
    offsets: OffsetsConfig = Field(default_factory=OffsetsConfig)
    rho_max: int = Field(default=16, ge=0, description="Truncation of the rho sum.")
    p_max: int = Field(default=16, ge=0, description="Truncation of the inner harmonic sums.")
    carrier_harmonic: int = Field(default=1, ge=1, description="Carrier harmonic nu of the ensemble model.")
    phase_modes: Optional[int] = Field(
        default=None, ge=2, description="Phase modes k of the ensemble model (default: all retained)."
    )
    fit: List[MethodName] = Field(
        default_factory=lambda: ["ilo-pmm"],
        description="Spectra fitted to the single-pole standard form.",
    )
    thresholds: ThresholdsConfig = Field(default_factory=ThresholdsConfig)

    @field_validator("methods", "fit", mode="before")
    @classmethod
    def normalize(cls, v: Any) -> Any:
        if isinstance(v, str):
            v = [s for s in v.split(",") if s.strip()]
        return [str(s).strip().lower().replace("_", "-") for s in v]


class OracleConfig(_Section):
    """Monte-Carlo oracle settings."""

    enabled: bool = Field(default=False, description="Run the oracle in the pipeline.")
    n_paths: int = Field(default=64, ge=1, description="Independent paths.")
    duration_periods: int = Field(default=10_000, ge=16, description="Recorded periods per path.")
    steps_per_period: int = Field(default=500, ge=200, description="Integration steps per period.")
    dt: Optional[float] = Field(default=None, gt=0.0, description="Explicit step (s); overrides steps_per_period.")
    settle_periods: int = Field(default=20, ge=0, description="Discarded periods before recording.")
    seed: int = Field(default=0, ge=0, description="Generator seed.")
    scheme: Literal["euler-maruyama", "heun"] = Field(default="euler-maruyama")
    nperseg: int = Field(default=2**16, ge=16, description="Welch segment length (periods).")
    overlap: float = Field(default=0.5, ge=0.0, lt=1.0, description="Welch segment overlap fraction.")
    window: str = Field(default="hann", description="Welch window.")
    workers: int = Field(default=1, ge=1, description="Worker processes.")
    block_periods: int = Field(default=64, ge=1, description="Periods per noise block.")


class GateConfig(_Section):
    """Acceptance bound on the largest deviation between two spectra."""

    pair: Tuple[str, str] = Field(description="Methods compared, e.g. ['k-ilo', 'ilo-pmm'].")
    band: Optional[Tuple[float, float]] = Field(default=None, description="Band (Hz); defaults to compare.band.")
    max_db: Optional[float] = Field(default=None, ge=0.0, description="Largest deviation must not exceed this (dB).")
    min_db: Optional[float] = Field(default=None, ge=0.0, description="Largest deviation must reach this (dB).")

    @field_validator("pair", mode="before")
    @classmethod
    def normalize_pair(cls, v: Any) -> Any:
        return tuple(_normalize_method(s) for s in v)

    @model_validator(mode="after")
    def has_bound(self) -> "GateConfig":
        if self.max_db is None and self.min_db is None:
            raise ValueError("a gate needs max_db or min_db")
        return self


class CompareConfig(_Section):
    """Spectrum comparisons written to compare.json."""

    band: Tuple[float, float] = Field(default=(1e5, 1e7), description="Default comparison band (Hz).")
    pairs: List[Tuple[str, str]] = Field(
        default_factory=lambda: [("k-ilo", "ilo-pmm"), ("ilo-pmm", "oracle")],
        description="Method pairs to compare when both spectra exist.",
    )
    gates: List[GateConfig] = Field(default_factory=list)

    @field_validator("pairs", mode="before")
    @classmethod
    def normalize_pairs(cls, v: Any) -> Any:
        return [tuple(_normalize_method(s) for s in pair) for pair in v]


class PointConfig(_Section):
    """Named scenario point: dotted-key overrides applied to the base configuration."""

    name: str = Field(description="Point name; also the artifact subdirectory.")
    description: str = Field(default="")
    overrides: Dict[str, Any] = Field(
        default_factory=dict, description="Dotted keys, e.g. {'circuit.primary.C': 0.295e-12}."
    )

    @field_validator("name")
    @classmethod
    def safe_name(cls, v: str) -> str:
        if not v or any(ch in v for ch in "/\\:"):
            raise ValueError(f"point name '{v}' is not a valid directory name")
        return v


class OutputConfig(_Section):
    """Artifact location."""

    directory: str = Field(default="out", description="Root directory of the artifact bundle.")


class LoggingConfig(_Section):
    """Logging configuration."""

    level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(default="INFO")
    file: Optional[str] = Field(default=None, description="Rotating log file; console only when null.")
    max_size_mb: int = Field(default=10, ge=1, le=1000)
    backup_count: int = Field(default=3, ge=1, le=10)


class RunConfig(_Section):
    """
    Root run configuration.

    Configuration files are YAML and can be placed in:
    - Current directory: ilo-pnoise.yaml or .ilo-pnoise.yaml
    - ~/.config/ilo-pnoise/config.yaml
    - $XDG_CONFIG_HOME/ilo-pnoise/config.yaml
    """

    version: str = Field(default="1.0")
    name: str = Field(default="custom", description="Scenario name.")
    description: str = Field(default="")
    circuit: CircuitConfig = Field(default_factory=CircuitConfig)
    coupling: CouplingConfig = Field(default_factory=CouplingConfig)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    observation_node: str = Field(default="s.v_d", description="State label of the observation node q.")
    solver: SolverConfig = Field(default_factory=SolverConfig)
    spectrum: SpectrumConfig = Field(default_factory=SpectrumConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    compare: CompareConfig = Field(default_factory=CompareConfig)
    points: List[PointConfig] = Field(default_factory=list)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    env_prefix: str = Field(default="ILO_PNOISE_")

    @field_validator("points")
    @classmethod
    def unique_points(cls, v: List[PointConfig]) -> List[PointConfig]:
        names = [p.name for p in v]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate point names: {', '.join(duplicates)}")
        return v


__all__ = [
    "METHOD_NAMES",
    "COMPARABLE_NAMES",
    "RunConfig",
    "CircuitConfig",
    "PrimaryCircuitConfig",
    "SecondaryCircuitConfig",
    "CouplingConfig",
    "NoiseConfig",
    "SolverConfig",
    "OffsetsConfig",
    "ThresholdsConfig",
    "SpectrumConfig",
    "OracleConfig",
    "GateConfig",
    "CompareConfig",
    "PointConfig",
    "OutputConfig",
    "LoggingConfig",
]
