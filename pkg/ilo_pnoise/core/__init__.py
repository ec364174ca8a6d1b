"""Core numerics: circuit models, periodic steady state, harmonics and Floquet analysis."""

from .circuits import (
    BufferCoupling,
    PrimaryOscillatorParams,
    SecondaryOscillatorParams,
    StateSpaceModel,
    assemble_ilo,
    build_primary_oscillator,
    build_reference_circuits,
    build_secondary_oscillator,
    check_jacobian,
    eval_vector_field,
    linear_model,
)
from .floquet import (
    FloquetDecomposition,
    FloquetExponents,
    FloquetSettings,
    ModeHarmonics,
    analyze_floquet,
    floquet_exponents,
    floquet_vectors,
    lambda_vectors,
    monodromy,
    phase_diffusion_constant,
)
from .harmonics import HarmonicSet, fourier_harmonics, harmonics_from_samples
from .pss import (
    PeriodicSteadyState,
    SolverSettings,
    find_limit_cycle,
    solve_periodic_steady_state,
    tune_tank_inductance,
)

__all__ = [
    "BufferCoupling",
    "PrimaryOscillatorParams",
    "SecondaryOscillatorParams",
    "StateSpaceModel",
    "assemble_ilo",
    "build_primary_oscillator",
    "build_reference_circuits",
    "build_secondary_oscillator",
    "check_jacobian",
    "eval_vector_field",
    "linear_model",
    "FloquetDecomposition",
    "FloquetExponents",
    "FloquetSettings",
    "ModeHarmonics",
    "analyze_floquet",
    "floquet_exponents",
    "floquet_vectors",
    "lambda_vectors",
    "monodromy",
    "phase_diffusion_constant",
    "HarmonicSet",
    "fourier_harmonics",
    "harmonics_from_samples",
    "PeriodicSteadyState",
    "SolverSettings",
    "find_limit_cycle",
    "solve_periodic_steady_state",
    "tune_tank_inductance",
]
